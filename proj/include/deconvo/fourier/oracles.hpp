#pragma once

#include "../core/kernels.hpp"
#include "../core/measure.hpp"
#include "quadrature.hpp"
#include "transforms.hpp"

#include <cmath>

namespace deconvo {

//! Reference integrals for the two-dimensional Laplace(lambda) / sinc /
//! uniform-Q configuration, in closed form and by quadrature.
//!
//!   first  = int |Phi_K| / |Phi_psi(w/h)|
//!   second = int |Phi_K|^2 / |Phi_psi(w/h)|^2
//!   third  = int |L_1(w_1/h)|^2 |Phi_K|^2 / |Phi_psi(w/h)|^2
//!   fourth = int |L_1(w_1/h)|^2 |L_2(w_2/h)|^2 |Phi_K|^2 / |Phi_psi(w/h)|^2
//!
//! The third and fourth are only known through their small-h leading terms.
struct ClosedFormOracles
{
  double h;
  double lambda;
  double first_closed;
  double second_closed;
  double third_leading;
  double fourth_leading;
  double first_quadrature;
  double second_quadrature;
  double third_quadrature;
  double fourth_quadrature;
};

inline ClosedFormOracles
closed_form_oracles(double h, double lambda = 1.0, std::size_t order = 64)
{
  const double c = 1.0 / (lambda * lambda * h * h);
  ClosedFormOracles out{};
  out.h = h;
  out.lambda = lambda;
  out.first_closed = std::pow(2.0 * c / 3.0 + 2.0, 2);
  out.second_closed = std::pow(2.0 * c * c / 5.0 + 4.0 * c / 3.0 + 2.0, 2);
  out.third_leading = 8.0 / (15.0 * std::pow(lambda, 8) * std::pow(h, 6));
  out.fourth_leading = 16.0 / (9.0 * std::pow(lambda, 8) * std::pow(h, 4));

  const auto psi = ConvolutionKernel::laplace(2, lambda);
  const auto K = SmoothingKernel::sinc(2);
  const auto Q = BlockMeasure::uniform(1);
  auto ratio = [&](std::span<const double> w) {
    const double s[2] = { w[0] / h, w[1] / h };
    return transform_eval(K, w).real() / transform_eval(psi, s).real();
  };
  auto L2 = [&](double w) {
    const double y = w / h;
    return std::norm(l_functional(Q, std::span<const double>(&y, 1)));
  };

  const auto box = Box::cube(2, 1.0);
  // sin^2(w/h) oscillates with frequency 2/h
  const std::size_t panels =
    static_cast<std::size_t>(std::max(1.0, std::ceil((2.0 / h) / (0.5 * order))));
  out.first_quadrature = tensor_quadrature([&](auto w) { return std::complex<double>(ratio(w)); },
                                           box,
                                           { order })
                           .real();
  out.second_quadrature =
    tensor_quadrature([&](auto w) { return std::complex<double>(std::pow(ratio(w), 2)); },
                      box,
                      { order })
      .real();
  out.third_quadrature = tensor_quadrature(
                           [&](auto w) {
                             return std::complex<double>(L2(w[0]) * std::pow(ratio(w), 2));
                           },
                           box,
                           { order },
                           { panels, 1 })
                           .real();
  out.fourth_quadrature =
    tensor_quadrature(
      [&](auto w) { return std::complex<double>(L2(w[0]) * L2(w[1]) * std::pow(ratio(w), 2)); },
      box,
      { order },
      { panels, panels })
      .real();
  return out;
}

} // namespace deconvo
