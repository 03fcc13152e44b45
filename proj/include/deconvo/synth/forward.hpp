#pragma once

#include "../core/design.hpp"
#include "../core/kernels.hpp"
#include "../core/signal.hpp"
#include "../error.hpp"
#include "../fourier/quadrature.hpp"
#include "../util.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace deconvo {

//! Product kernels marginalize exactly by dropping the other axes.
inline ConvolutionKernel
marginal_kernel(const ConvolutionKernel& psi, std::span<const std::size_t> block)
{
  return psi.marginal(block);
}

namespace detail {

//! Rule for s in int psi_a(s) theta(z - s) ds: the kernel's support, split at
//! its own kinks and at z - (signal kinks).
inline QuadratureRule
convolution_rule(const ConvolutionKernel& psi,
                 std::size_t axis,
                 double z,
                 const std::vector<double>& signal_kinks)
{
  const auto sup = psi.axis_support(axis);
  auto breaks = sup.kinks;
  for (double k : signal_kinks)
    breaks.push_back(z - k);
  return piecewise_rule(sup.lo, sup.hi, std::move(breaks), sup.scale, 24);
}

} // namespace detail

//! (psi_{I_j} * theta_{I_j})(z) for one signal component.
inline double
convolve_component(const SignalComponent& c,
                   const ConvolutionKernel& psi,
                   std::span<const double> z)
{
  const std::size_t dj = c.axes.size();
  if (z.size() != dj)
    throw StructuralError("component convolution point has wrong dimension");
  const auto kernel = marginal_kernel(psi, c.axes);
  std::vector<QuadratureRule> rules;
  for (std::size_t i = 0; i < dj; ++i)
    rules.push_back(detail::convolution_rule(kernel, i, z[i], dj == 1 ? c.kinks : std::vector<double>{}));

  std::vector<std::size_t> idx(dj, 0);
  std::vector<double> t(dj);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < dj; ++i) {
      const double s = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]] * kernel.axis_density(i, s);
      t[i] = z[i] - s;
    }
    const double v = c.fn(t);
    if (!std::isfinite(v))
      throw NumericalError("signal is not finite on the convolution window");
    total += w * v;
    std::size_t axis = dj;
    while (axis-- > 0) {
      if (++idx[axis] < rules[axis].order())
        break;
      idx[axis] = 0;
    }
    if (axis == static_cast<std::size_t>(-1))
      break;
  }
  return total;
}

//! Observable signal g = psi * theta = g_0 + sum_j g_{I_j}; g_0 = theta_0
//! because psi integrates to one.
class ForwardSignal
{
public:
  ForwardSignal(AdditiveSignal signal, ConvolutionKernel psi)
    : signal_(std::move(signal))
    , psi_(std::move(psi))
  {
    if (signal_.dim() != psi_.dim())
      throw StructuralError("signal and kernel dimensions differ");
  }

  double g0() const { return signal_.theta0(); }
  const AdditiveSignal& signal() const { return signal_; }
  const ConvolutionKernel& kernel() const { return psi_; }

  double component(std::size_t j, std::span<const double> zj) const
  {
    return convolve_component(signal_.components().at(j), psi_, zj);
  }

  double operator()(std::span<const double> z) const
  {
    if (z.size() != signal_.dim())
      throw StructuralError("forward signal evaluated at a point of wrong dimension");
    double v = g0();
    std::vector<double> sub;
    for (const auto& c : signal_.components()) {
      sub.resize(c.axes.size());
      for (std::size_t i = 0; i < c.axes.size(); ++i)
        sub[i] = z[c.axes[i]];
      v += convolve_component(c, psi_, sub);
    }
    return v;
  }

private:
  AdditiveSignal signal_;
  ConvolutionKernel psi_;
};

inline double
forward_convolve(const AdditiveSignal& signal, const ConvolutionKernel& psi, std::span<const double> z)
{
  return ForwardSignal(signal, psi)(z);
}

//! g on the full lattice of a fixed-grid design, in lexicographic order.
//! Each component is evaluated once per block sub-lattice point.
inline std::vector<double>
forward_on_lattice(const AdditiveSignal& signal, const ConvolutionKernel& psi, const Design& design)
{
  if (design.kind != DesignKind::fixed_grid)
    throw StructuralError("lattice evaluation needs a fixed-grid design");
  if (design.dim != signal.dim())
    throw StructuralError("design and signal dimensions differ");
  const ForwardSignal g(signal, psi);
  const LatticeIndex full(design.n, design.dim);
  const auto axis = design.axis_grid();
  std::vector<double> out(full.count(), g.g0());
  std::vector<std::size_t> offs, sub_offs;
  std::vector<double> zj;
  for (std::size_t j = 0; j < signal.components().size(); ++j) {
    const auto& axes = signal.components()[j].axes;
    const LatticeIndex block(design.n, axes.size());
    std::vector<double> values(block.count());
    for (std::size_t b = 0; b < block.count(); ++b) {
      block.offsets(b, sub_offs);
      zj.resize(axes.size());
      for (std::size_t i = 0; i < axes.size(); ++i)
        zj[i] = axis[sub_offs[i]];
      values[b] = g.component(j, zj);
    }
    for (std::size_t k = 0; k < full.count(); ++k) {
      full.offsets(k, offs);
      sub_offs.resize(axes.size());
      for (std::size_t i = 0; i < axes.size(); ++i)
        sub_offs[i] = offs[axes[i]];
      out[k] += values[block.flat(sub_offs)];
    }
  }
  return out;
}

} // namespace deconvo
