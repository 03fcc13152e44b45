#pragma once

#include "../error.hpp"
#include "../util.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

enum class KernelFamily
{
  laplace,
  gaussian,
  gamma
};

//! Integration window used when convolving with one axis of a kernel.
struct AxisSupport
{
  double lo;
  double hi;
  std::vector<double> kinks;
  double scale; // natural length scale, sets the panel width
};

//! Product-form point spread function psi with its Fourier transform
//! Phi_psi(w) = int exp(i<w,x>) psi(x) dx.
//!
//! laplace: per-axis rate lambda, density lambda/2 exp(-lambda|t|)
//! gaussian: per-axis standard deviation sigma
//! gamma: per-axis shape alpha and rate beta (complex transform, usable only
//!   for data generation)
class ConvolutionKernel
{
public:
  ConvolutionKernel() = default;
  ConvolutionKernel(KernelFamily family,
                    std::vector<double> first,
                    std::vector<double> second = {});

  static ConvolutionKernel laplace(std::size_t dim, double lambda)
  {
    return { KernelFamily::laplace, std::vector<double>(dim, lambda) };
  }
  static ConvolutionKernel gaussian(std::size_t dim, double sigma)
  {
    return { KernelFamily::gaussian, std::vector<double>(dim, sigma) };
  }
  static ConvolutionKernel gamma(std::size_t dim, double shape, double rate)
  {
    return { KernelFamily::gamma,
             std::vector<double>(dim, shape),
             std::vector<double>(dim, rate) };
  }

  KernelFamily family() const { return family_; }
  std::size_t dim() const { return first_.size(); }
  const std::vector<double>& first() const { return first_; }
  const std::vector<double>& second() const { return second_; }

  //! Real and even transform; required by every estimator.
  bool has_symmetric_transform() const { return family_ != KernelFamily::gamma; }

  double axis_density(std::size_t axis, double t) const;
  std::complex<double> axis_transform(std::size_t axis, double w) const;

  double density(std::span<const double> x) const;
  std::complex<double> transform(std::span<const double> w) const;

  //! Exact marginal on the listed axes (product families marginalize by
  //! dropping factors).
  ConvolutionKernel marginal(std::span<const std::size_t> axes) const;

  AxisSupport axis_support(std::size_t axis) const;

  //! Preset-style identifier, e.g. "laplace:3".
  std::string id() const;

  bool operator==(const ConvolutionKernel&) const = default;

private:
  void check_dim(std::size_t n) const
  {
    if (n != dim())
      throw StructuralError("kernel dimension " + std::to_string(dim()) +
                            " does not match argument dimension " +
                            std::to_string(n));
  }

  KernelFamily family_ = KernelFamily::laplace;
  std::vector<double> first_;
  std::vector<double> second_;
};

inline ConvolutionKernel::ConvolutionKernel(KernelFamily family,
                                            std::vector<double> first,
                                            std::vector<double> second)
  : family_(family)
  , first_(std::move(first))
  , second_(std::move(second))
{
  if (first_.empty())
    throw StructuralError("kernel needs at least one axis");
  if (family_ == KernelFamily::gamma) {
    if (second_.size() != first_.size())
      throw StructuralError("gamma kernel needs shape and rate per axis");
  } else {
    second_.clear();
  }
  for (double p : first_)
    if (!(p > 0))
      throw std::invalid_argument("kernel parameters must be positive");
  for (double p : second_)
    if (!(p > 0))
      throw std::invalid_argument("kernel parameters must be positive");
}

inline double
ConvolutionKernel::axis_density(std::size_t axis, double t) const
{
  const double p = first_.at(axis);
  switch (family_) {
    case KernelFamily::laplace:
      return 0.5 * p * std::exp(-p * std::abs(t));
    case KernelFamily::gaussian:
      return std::exp(-0.5 * t * t / (p * p)) /
             (p * std::sqrt(2 * std::numbers::pi));
    case KernelFamily::gamma: {
      if (t <= 0)
        return 0.0;
      const double rate = second_[axis];
      return std::exp((p - 1) * std::log(t) - rate * t + p * std::log(rate) -
                      std::lgamma(p));
    }
  }
  return 0.0;
}

inline std::complex<double>
ConvolutionKernel::axis_transform(std::size_t axis, double w) const
{
  const double p = first_.at(axis);
  switch (family_) {
    case KernelFamily::laplace:
      return 1.0 / (1.0 + w * w / (p * p));
    case KernelFamily::gaussian:
      return std::exp(-0.5 * p * p * w * w);
    case KernelFamily::gamma:
      return std::pow(std::complex<double>(1.0, -w / second_[axis]), -p);
  }
  return 0.0;
}

inline double
ConvolutionKernel::density(std::span<const double> x) const
{
  check_dim(x.size());
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    v *= axis_density(i, x[i]);
  return v;
}

inline std::complex<double>
ConvolutionKernel::transform(std::span<const double> w) const
{
  check_dim(w.size());
  std::complex<double> v = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    v *= axis_transform(i, w[i]);
  return v;
}

inline ConvolutionKernel
ConvolutionKernel::marginal(std::span<const std::size_t> axes) const
{
  if (axes.empty())
    throw StructuralError("marginal over an empty block");
  std::vector<double> a, b;
  for (auto axis : axes) {
    if (axis >= dim())
      throw StructuralError("marginal axis outside kernel dimension");
    a.push_back(first_[axis]);
    if (!second_.empty())
      b.push_back(second_[axis]);
  }
  return { family_, std::move(a), std::move(b) };
}

inline AxisSupport
ConvolutionKernel::axis_support(std::size_t axis) const
{
  const double p = first_.at(axis);
  switch (family_) {
    case KernelFamily::laplace:
      return { -25.0 / p, 25.0 / p, { 0.0 }, 2.0 / p };
    case KernelFamily::gaussian:
      return { -8.0 * p, 8.0 * p, {}, p };
    case KernelFamily::gamma: {
      const double rate = second_[axis];
      return { 0.0, (p + 10.0 * std::sqrt(p) + 30.0) / rate, {}, 1.0 / rate };
    }
  }
  return { 0, 0, {}, 1 };
}


inline std::string
ConvolutionKernel::id() const
{
  // Presets carry one parameter set for all axes.
  switch (family_) {
    case KernelFamily::laplace:
      return "laplace:" + format_double(first_[0]);
    case KernelFamily::gaussian:
      return "gauss:" + format_double(first_[0]);
    case KernelFamily::gamma:
      return "gamma:" + format_double(first_[0]) + "," +
             format_double(second_[0]);
  }
  return {};
}

//! Smoothing kernel K described through Phi_K, a product of identical
//! symmetric per-axis profiles supported on [-1, 1].
//!
//! The default sinc kernel K(x) = prod sin(x_i)/(pi x_i) has Phi_K equal to
//! the indicator of the cube. A table kernel linearly interpolates a profile
//! given at equispaced nodes on [0, 1].
class SmoothingKernel
{
public:
  SmoothingKernel() = default;

  static SmoothingKernel sinc(std::size_t dim)
  {
    SmoothingKernel k;
    k.dim_ = dim;
    return k;
  }
  static SmoothingKernel table(std::size_t dim, std::vector<double> profile);

  std::size_t dim() const { return dim_; }
  bool is_sinc() const { return profile_.empty(); }
  const std::vector<double>& profile() const { return profile_; }

  //! Same profile in another dimension (block-wise use in the additive
  //! estimators).
  SmoothingKernel with_dim(std::size_t dim) const
  {
    SmoothingKernel k = *this;
    k.dim_ = dim;
    return k;
  }

  double axis_transform(double u) const;
  double transform(std::span<const double> w) const;

  //! Largest b with Phi_K = 1 on [-b, b].
  double flat_radius() const;

  bool operator==(const SmoothingKernel&) const = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> profile_;
};

inline SmoothingKernel
SmoothingKernel::table(std::size_t dim, std::vector<double> profile)
{
  if (profile.size() < 2)
    throw std::invalid_argument("Phi_K table needs at least two nodes");
  SmoothingKernel k;
  k.dim_ = dim;
  k.profile_ = std::move(profile);
  return k;
}

inline double
SmoothingKernel::axis_transform(double u) const
{
  const double a = std::abs(u);
  if (a > 1.0)
    return 0.0;
  if (profile_.empty())
    return 1.0;
  const double pos = a * static_cast<double>(profile_.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), profile_.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return profile_[i] * (1 - frac) + profile_[i + 1] * frac;
}

inline double
SmoothingKernel::transform(std::span<const double> w) const
{
  if (w.size() != dim_)
    throw StructuralError("smoothing kernel dimension mismatch");
  double v = 1.0;
  for (double u : w)
    v *= axis_transform(u);
  return v;
}

inline double
SmoothingKernel::flat_radius() const
{
  if (profile_.empty())
    return 1.0;
  std::size_t i = 0;
  while (i + 1 < profile_.size() && profile_[i + 1] == 1.0 && profile_[i] == 1.0)
    ++i;
  if (profile_[0] != 1.0)
    return 0.0;
  return static_cast<double>(i) / static_cast<double>(profile_.size() - 1);
}

} // namespace deconvo
