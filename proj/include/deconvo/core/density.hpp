#pragma once

#include "../error.hpp"
#include "../util.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

enum class DensityFamily
{
  uniform,    // uniform on [-1/a_n, 1/a_n]^d
  gaussian,   // product standard normal
  student_t2, // product Student t with 2 degrees of freedom
  heavy_tail  // product g_{a,b}
};

//! Product design density. The uniform family depends on the design scale a_n.
class DensitySpec
{
public:
  DensitySpec() = default;
  explicit DensitySpec(DensityFamily family, double tail_b = 2.0);

  static DensitySpec uniform() { return DensitySpec(DensityFamily::uniform); }
  static DensitySpec gaussian() { return DensitySpec(DensityFamily::gaussian); }
  static DensitySpec student_t2() { return DensitySpec(DensityFamily::student_t2); }
  static DensitySpec heavy_tail(double b)
  {
    return DensitySpec(DensityFamily::heavy_tail, b);
  }

  DensityFamily family() const { return family_; }
  double tail_b() const { return b_; }
  //! a = (2 + 2/(b-1))^{-1}, the level of g_{a,b} on [-1, 1].
  double tail_a() const { return 1.0 / (2.0 + 2.0 / (b_ - 1.0)); }

  double axis_density(double t, double a_n) const;
  double density(std::span<const double> x, double a_n) const;
  //! f(1/a_n, ..., 1/a_n), the truncation level used by the random-design
  //! weights.
  double truncation_level(std::size_t dim, double a_n) const;

  double axis_cdf(double t, double a_n) const;
  //! Per-axis inverse CDF; defined for the uniform and heavy-tail families.
  double axis_quantile(double p, double a_n) const;

  //! Points where the per-axis density is not smooth.
  std::vector<double> axis_kinks(double a_n) const;

  std::string id() const;

  bool operator==(const DensitySpec&) const = default;

private:
  DensityFamily family_ = DensityFamily::uniform;
  double b_ = 2.0;
};

inline DensitySpec::DensitySpec(DensityFamily family, double tail_b)
  : family_(family)
  , b_(tail_b)
{
  if (family_ == DensityFamily::heavy_tail && !(b_ > 1.0))
    throw std::invalid_argument(
      "heavy-tail density needs b > 1 (g_{a,b} is not integrable otherwise)");
}

inline double
DensitySpec::axis_density(double t, double a_n) const
{
  switch (family_) {
    case DensityFamily::uniform:
      return std::abs(t) <= 1.0 / a_n ? 0.5 * a_n : 0.0;
    case DensityFamily::gaussian:
      return std::exp(-0.5 * t * t) / std::sqrt(2 * std::numbers::pi);
    case DensityFamily::student_t2:
      return 1.0 / (2.0 * std::sqrt(2.0) * std::pow(1.0 + 0.5 * t * t, 1.5));
    case DensityFamily::heavy_tail: {
      const double a = tail_a();
      const double at = std::abs(t);
      return at <= 1.0 ? a : a / std::pow(at, b_);
    }
  }
  return 0.0;
}

inline double
DensitySpec::density(std::span<const double> x, double a_n) const
{
  double v = 1.0;
  for (double t : x)
    v *= axis_density(t, a_n);
  return v;
}

inline double
DensitySpec::truncation_level(std::size_t dim, double a_n) const
{
  return std::pow(axis_density(1.0 / a_n, a_n), static_cast<double>(dim));
}

inline double
DensitySpec::axis_cdf(double t, double a_n) const
{
  switch (family_) {
    case DensityFamily::uniform: {
      const double r = 1.0 / a_n;
      if (t <= -r)
        return 0.0;
      if (t >= r)
        return 1.0;
      return 0.5 * (t + r) / r;
    }
    case DensityFamily::gaussian:
      return 0.5 * std::erfc(-t / std::sqrt(2.0));
    case DensityFamily::student_t2:
      return 0.5 + t / (2.0 * std::sqrt(2.0 + t * t));
    case DensityFamily::heavy_tail: {
      const double a = tail_a();
      const double tail = a / (b_ - 1.0); // mass of (-inf, -1]
      if (t <= -1.0)
        return a * std::pow(-t, 1.0 - b_) / (b_ - 1.0);
      if (t <= 1.0)
        return tail + a * (t + 1.0);
      return 1.0 - a * std::pow(t, 1.0 - b_) / (b_ - 1.0);
    }
  }
  return 0.0;
}

inline double
DensitySpec::axis_quantile(double p, double a_n) const
{
  switch (family_) {
    case DensityFamily::uniform:
      return (2.0 * p - 1.0) / a_n;
    case DensityFamily::heavy_tail: {
      const double a = tail_a();
      const double tail = a / (b_ - 1.0);
      if (p <= tail)
        return -std::pow(p * (b_ - 1.0) / a, 1.0 / (1.0 - b_));
      if (p <= 1.0 - tail)
        return (p - tail) / a - 1.0;
      return std::pow((1.0 - p) * (b_ - 1.0) / a, 1.0 / (1.0 - b_));
    }
    case DensityFamily::student_t2: {
      const double q = 2.0 * p - 1.0;
      return q * std::sqrt(2.0 / (1.0 - q * q));
    }
    case DensityFamily::gaussian:
      break;
  }
  throw UnsupportedError("no closed-form quantile for density " + id());
}

inline std::vector<double>
DensitySpec::axis_kinks(double a_n) const
{
  switch (family_) {
    case DensityFamily::uniform:
      return { -1.0 / a_n, 1.0 / a_n };
    case DensityFamily::heavy_tail:
      return { -1.0, 1.0 };
    default:
      return {};
  }
}

inline std::string
DensitySpec::id() const
{
  switch (family_) {
    case DensityFamily::uniform:
      return "uniform";
    case DensityFamily::gaussian:
      return "gauss";
    case DensityFamily::student_t2:
      return "t2";
    case DensityFamily::heavy_tail:
      return "heavytail:" + format_double(b_);
  }
  return {};
}

} // namespace deconvo
