#pragma once

#include "../error.hpp"
#include "../util.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace deconvo {

//! Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
};

namespace detail {

inline QuadratureRule
compute_gauss_legendre(std::size_t m)
{
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double mm = static_cast<double>(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    // Chebyshev-like initial guess, refined by Newton on P_m
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (mm + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2 * kk - 1) * x * p1 - (kk - 1) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = mm * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= m; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2 * kk - 1) * x * p1 - (kk - 1) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = mm * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1)
    rule.nodes[m / 2] = 0.0;
  return rule;
}

} // namespace detail

//! Cached Gauss-Legendre rule of order m (m >= 1).
inline const QuadratureRule&
gauss_legendre(std::size_t m)
{
  if (m == 0)
    throw std::invalid_argument("quadrature order must be positive");
  static std::mutex mu;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end())
    it = cache.emplace(m, detail::compute_gauss_legendre(m)).first;
  return it->second;
}

//! Order-m rule repeated over `panels` equal panels of [lo, hi].
inline QuadratureRule
composite_rule(double lo, double hi, std::size_t m, std::size_t panels = 1)
{
  const auto& base = gauss_legendre(m);
  QuadratureRule out;
  out.nodes.reserve(m * panels);
  out.weights.reserve(m * panels);
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < m; ++i) {
      out.nodes.push_back(a + half * (base.nodes[i] + 1.0));
      out.weights.push_back(half * base.weights[i]);
    }
  }
  return out;
}

//! Composite rule on [lo, hi] split at `breaks`, each piece subdivided into
//! panels no wider than `max_width`.
inline QuadratureRule
piecewise_rule(double lo,
               double hi,
               std::vector<double> breaks,
               double max_width,
               std::size_t m)
{
  std::vector<double> cuts{ lo };
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks)
    if (b > cuts.back() && b < hi)
      cuts.push_back(b);
  cuts.push_back(hi);
  QuadratureRule out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const auto panels =
      static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_width)));
    auto piece = composite_rule(cuts[i], cuts[i + 1], m, panels);
    out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return out;
}

struct Box
{
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t dim, double r) { return { std::vector<double>(dim, -r), std::vector<double>(dim, r) }; }
  std::size_t dim() const { return lo.size(); }
};

//! Tensor Gauss-Legendre integral of `f` over `box` with orders[i] nodes on
//! axis i (a single order applies to every axis).
inline std::complex<double>
tensor_quadrature(const std::function<std::complex<double>(std::span<const double>)>& f,
                  const Box& box,
                  std::vector<std::size_t> orders,
                  std::vector<std::size_t> panels = {})
{
  const std::size_t d = box.dim();
  if (d == 0 || box.hi.size() != d)
    throw StructuralError("quadrature box is malformed");
  if (orders.size() == 1)
    orders.assign(d, orders[0]);
  if (panels.empty())
    panels.assign(d, 1);
  if (orders.size() != d || panels.size() != d)
    throw StructuralError("one quadrature order per box axis required");
  std::vector<QuadratureRule> rules;
  for (std::size_t i = 0; i < d; ++i) {
    if (!(box.hi[i] > box.lo[i]) || !std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i]))
      throw StructuralError("quadrature box must be bounded and nonempty");
    rules.push_back(composite_rule(box.lo[i], box.hi[i], orders[i], panels[i]));
  }

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  std::complex<double> total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]];
    }
    const auto v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::string where;
      for (std::size_t i = 0; i < d; ++i)
        where += (i ? "," : "") + format_double(x[i]);
      throw NumericalError("non-finite integrand at node (" + where + ")");
    }
    total += w * v;
    std::size_t axis = d;
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

} // namespace deconvo
