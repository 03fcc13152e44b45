#pragma once

#include "../core/kernels.hpp"
#include "../core/measure.hpp"
#include "../error.hpp"

#include <complex>
#include <span>

namespace deconvo {

inline std::complex<double>
transform_eval(const ConvolutionKernel& psi, std::span<const double> w)
{
  return psi.transform(w);
}

inline std::complex<double>
transform_eval(const SmoothingKernel& K, std::span<const double> w)
{
  return K.transform(w);
}

//! L(y) = int exp(-i<y,x>) dQ(x) for a product measure Q.
inline std::complex<double>
l_functional(const BlockMeasure& Q, std::span<const double> y)
{
  if (y.size() != Q.dim())
    throw StructuralError("L-functional argument does not match the measure dimension");
  std::complex<double> v = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    v *= Q.axes[i].transform(y[i]);
  return v;
}

//! Phi_K(u) / Phi_psi(u/h) on one axis; throws when the divisor vanishes.
inline double
axis_profile(const ConvolutionKernel& psi,
             std::size_t axis,
             const SmoothingKernel& K,
             double h,
             double u)
{
  const double k = K.axis_transform(u);
  if (k == 0.0)
    return 0.0;
  const auto den = psi.axis_transform(axis, u / h);
  if (std::abs(den) < 1e-14)
    throw NumericalError("|Phi_psi| below 1e-14 at w = " + format_double(u / h) +
                         " (division singularity)");
  if (den.imag() != 0.0)
    throw NumericalError("non-symmetric transform: Phi_psi is complex at w = " +
                         format_double(u / h));
  return k / den.real();
}

} // namespace deconvo
