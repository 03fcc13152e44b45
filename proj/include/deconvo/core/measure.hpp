#pragma once

#include "../error.hpp"

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace deconvo {

//! Piecewise-constant density on [edges.front(), edges.back()]; the uniform
//! measure is the single-bin case.
class AxisMeasure
{
public:
  AxisMeasure() = default;
  AxisMeasure(std::vector<double> edges, std::vector<double> densities);

  static AxisMeasure uniform(double lo = -1.0, double hi = 1.0, double density = 1.0)
  {
    return AxisMeasure({ lo, hi }, { density });
  }

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& densities() const { return densities_; }

  double mass() const;
  //! Largest |x| in the support.
  double radius() const { return std::max(std::abs(edges_.front()), std::abs(edges_.back())); }

  //! int exp(-i y x) dQ(x)
  std::complex<double> transform(double y) const;

  bool operator==(const AxisMeasure&) const = default;

private:
  std::vector<double> edges_{ -1.0, 1.0 };
  std::vector<double> densities_{ 1.0 };
};

inline AxisMeasure::AxisMeasure(std::vector<double> edges,
                                std::vector<double> densities)
  : edges_(std::move(edges))
  , densities_(std::move(densities))
{
  if (edges_.size() < 2 || densities_.size() + 1 != edges_.size())
    throw StructuralError("weight measure needs k+1 edges for k bins");
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
    if (!(edges_[i] < edges_[i + 1]))
      throw std::invalid_argument("weight measure edges must increase");
  for (double d : densities_)
    if (d < 0)
      throw std::invalid_argument("weight measure densities must be >= 0");
}

inline double
AxisMeasure::mass() const
{
  double m = 0;
  for (std::size_t i = 0; i < densities_.size(); ++i)
    m += densities_[i] * (edges_[i + 1] - edges_[i]);
  return m;
}

inline std::complex<double>
AxisMeasure::transform(double y) const
{
  std::complex<double> v = 0.0;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    const double lo = edges_[i], hi = edges_[i + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    const double t = y * half;
    const double sinc = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    v += densities_[i] * 2.0 * half * sinc * std::polar(1.0, -y * mid);
  }
  return v;
}

//! Product measure Q_{I_j} on one partition block.
struct BlockMeasure
{
  std::vector<AxisMeasure> axes;

  static BlockMeasure uniform(std::size_t dim)
  {
    return { std::vector<AxisMeasure>(dim, AxisMeasure::uniform()) };
  }

  std::size_t dim() const { return axes.size(); }
  double mass() const
  {
    double m = 1.0;
    for (const auto& a : axes)
      m *= a.mass();
    return m;
  }

  bool operator==(const BlockMeasure&) const = default;
};

} // namespace deconvo
