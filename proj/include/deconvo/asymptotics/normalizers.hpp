#pragma once

#include "../core/config.hpp"
#include "../core/design.hpp"
#include "../core/noise.hpp"
#include "../core/signal.hpp"
#include "../error.hpp"
#include "../fourier/quadrature.hpp"
#include "../fourier/weights.hpp"
#include "../synth/forward.hpp"
#include "../util.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace deconvo {

enum class NormalizerKind
{
  V1,     // unrestricted random design
  V2,     // one additive component, random design
  V3,     // additive random design (sum of components)
  U_nj,   // one additive component, fixed design
  U_n,    // additive fixed design
  U_full, // unrestricted fixed design, sigma^2 sum v_k^2
  V1_MA,
  V3_MA,
  V_MA // additive fixed design under MA noise
};

inline std::string
to_string(NormalizerKind k)
{
  switch (k) {
    case NormalizerKind::V1:
      return "V1";
    case NormalizerKind::V2:
      return "V2";
    case NormalizerKind::V3:
      return "V3";
    case NormalizerKind::U_nj:
      return "U_nj";
    case NormalizerKind::U_n:
      return "U_n";
    case NormalizerKind::U_full:
      return "U_full";
    case NormalizerKind::V1_MA:
      return "V1_MA";
    case NormalizerKind::V3_MA:
      return "V3_MA";
    case NormalizerKind::V_MA:
      return "V_MA";
  }
  return {};
}

inline bool
is_ma_kind(NormalizerKind k)
{
  return k == NormalizerKind::V1_MA || k == NormalizerKind::V3_MA || k == NormalizerKind::V_MA;
}

struct NormalizerRequest
{
  NormalizerKind kind = NormalizerKind::U_n;
  EstimatorConfig config;
  Design design;
  NoiseSpec noise = NoiseSpec::iid(1.0);
  //! Signal entering (sigma^2 + g^2); absent means g = 0.
  std::optional<AdditiveSignal> signal;
  //! Kernel generating g; defaults to config.psi.
  std::optional<ConvolutionKernel> true_kernel;
  std::vector<double> x;
  std::size_t block = 0;
  //! Outer box half-width beyond 1/a_n, in units of h.
  double margin = 10.0;
  std::size_t outer_order = 12;
  //! V3 only: also carry the -(m-1) c-hat weight, giving the exact
  //! first-order variance of the full additive estimator rather than its
  //! leading term.
  bool include_constant = false;
};

namespace detail {

inline void
check_request(const NormalizerRequest& r)
{
  r.config.validate();
  r.design.validate();
  r.noise.validate();
  if (r.design.dim != r.config.dim())
    throw StructuralError("normalizer design and kernel dimensions differ");
  const bool random = r.kind == NormalizerKind::V1 || r.kind == NormalizerKind::V2 ||
                      r.kind == NormalizerKind::V3 || r.kind == NormalizerKind::V1_MA ||
                      r.kind == NormalizerKind::V3_MA;
  if (random && r.design.kind != DesignKind::random)
    throw StructuralError(to_string(r.kind) + " needs a random design with a density");
  if (!random && r.design.kind != DesignKind::fixed_grid)
    throw StructuralError(to_string(r.kind) + " needs fixed-grid lattice parameters");
  if (r.kind != NormalizerKind::U_nj && r.kind != NormalizerKind::V2 && r.x.size() != r.design.dim)
    throw StructuralError("normalizer evaluation point has the wrong dimension");
}

//! sigma^2 with the MA long-run factor folded in (exactly sigma^2 for q = 0).
inline double
effective_sigma2(const NormalizerRequest& r)
{
  if (!is_ma_kind(r.kind) || r.noise.kind == NoiseKind::iid)
    return r.noise.sigma2;
  return r.noise.sigma2 * r.noise.long_run_factor();
}

//! Per-axis outer rule on [-1/a_n - margin h, 1/a_n + margin h] clipped to
//! the support of the design density.
inline QuadratureRule
outer_rule(const NormalizerRequest& r, double margin, double x_a)
{
  const double h = r.config.h, a = r.design.a_n;
  double lo = -1.0 / a - margin * h, hi = 1.0 / a + margin * h;
  if (r.design.density.family() == DensityFamily::uniform) {
    lo = -1.0 / a;
    hi = 1.0 / a;
  }
  auto breaks = r.design.density.axis_kinks(a);
  breaks.push_back(x_a);
  breaks.push_back(1.0 / a);
  breaks.push_back(-1.0 / a);
  return piecewise_rule(lo, hi, breaks, h, r.outer_order);
}

//! n int W(y)^2 (s2 + g(y)^2) f(y) dy where W is the random-design weight of
//! an observation at y (V1: unrestricted; V2: block j; V3: sum of blocks).
inline double
random_design_normalizer(const NormalizerRequest& r, double margin)
{
  const auto& cfg = r.config;
  const std::size_t d = cfg.dim();
  const WeightEngine engine(cfg);
  const auto& f = r.design.density;
  const std::size_t n = r.design.n;
  const bool component = r.kind == NormalizerKind::V2;
  const bool additive = component || r.kind == NormalizerKind::V3 || r.kind == NormalizerKind::V3_MA;
  if (additive)
    cfg.require_partition();

  std::vector<double> xfull(d, 0.0);
  if (component) {
    const auto& block = cfg.require_partition().block(r.block);
    if (r.x.size() != block.size() && r.x.size() != d)
      throw StructuralError("V2 evaluation point must be a block or full vector");
    for (std::size_t i = 0; i < block.size(); ++i)
      xfull[block[i]] = r.x.size() == d ? r.x[block[i]] : r.x[i];
  } else {
    xfull = r.x;
  }

  std::vector<QuadratureRule> rules(d);
  std::vector<std::vector<double>> J(d), C(d);
  for (std::size_t a = 0; a < d; ++a) {
    rules[a] = outer_rule(r, margin, xfull[a]);
    J[a].resize(rules[a].order());
    if (additive)
      C[a].resize(rules[a].order());
    for (std::size_t i = 0; i < rules[a].order(); ++i) {
      const double y = rules[a].nodes[i];
      J[a][i] = engine.axis_integral(a, (xfull[a] - y) / cfg.h);
      if (additive)
        C[a][i] = engine.axis_integral(a, -y / cfg.h, &engine.axis_measure(a));
    }
  }

  // g on the outer grid, one table per signal component
  const double s2 = effective_sigma2(r);
  std::optional<ForwardSignal> g;
  std::vector<std::vector<double>> gtab;
  if (r.signal) {
    g.emplace(*r.signal, r.true_kernel.value_or(cfg.psi));
    for (std::size_t j = 0; j < r.signal->components().size(); ++j) {
      const auto& axes = r.signal->components()[j].axes;
      std::size_t count = 1;
      for (auto a : axes)
        count *= rules[a].order();
      gtab.emplace_back(count);
      std::vector<std::size_t> idx(axes.size(), 0);
      std::vector<double> zj(axes.size());
      for (std::size_t c = 0; c < count; ++c) {
        std::size_t rem = c;
        for (std::size_t i = axes.size(); i-- > 0;) {
          idx[i] = rem % rules[axes[i]].order();
          rem /= rules[axes[i]].order();
          zj[i] = rules[axes[i]].nodes[idx[i]];
        }
        gtab[j][c] = g->component(j, zj);
      }
    }
  }

  const double level = f.truncation_level(d, r.design.a_n);
  const double base = 1.0 / (static_cast<double>(n) * std::pow(2.0 * std::numbers::pi * cfg.h, static_cast<double>(d)));
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> y(d);
  double total = 0.0;
  while (true) {
    double wq = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      y[a] = rules[a].nodes[idx[a]];
      wq *= rules[a].weights[idx[a]];
    }
    const double fy = f.density(y, r.design.a_n);
    if (fy > 0) {
      const double scale = base / std::max(fy, level);
      double W = 0.0;
      if (!additive) {
        W = 1.0;
        for (std::size_t a = 0; a < d; ++a)
          W *= J[a][idx[a]];
      } else {
        const auto& p = cfg.require_partition();
        for (std::size_t j = 0; j < p.size(); ++j) {
          if (component && j != r.block)
            continue;
          double t = 1.0;
          for (std::size_t a = 0; a < d; ++a)
            t *= p.block_of(a) == j ? J[a][idx[a]] : C[a][idx[a]];
          W += t;
        }
        if (r.include_constant && !component) {
          double t = static_cast<double>(p.size() - 1);
          for (std::size_t a = 0; a < d; ++a)
            t *= C[a][idx[a]];
          W -= t;
        }
      }
      W *= scale;
      double gy = 0.0;
      if (g) {
        gy = g->g0();
        for (std::size_t j = 0; j < gtab.size(); ++j) {
          const auto& axes = r.signal->components()[j].axes;
          std::size_t flat = 0;
          for (auto a : axes)
            flat = flat * rules[a].order() + idx[a];
          gy += gtab[j][flat];
        }
      }
      total += wq * W * W * (s2 + gy * gy) * fy;
    }
    std::size_t axis = d;
    while (axis-- > 0) {
      if (++idx[axis] < rules[axis].order())
        break;
      idx[axis] = 0;
    }
    if (axis == static_cast<std::size_t>(-1))
      break;
  }
  return static_cast<double>(n) * total;
}

//! Per-axis tables of J((x_a - z_i)/h) over the lattice coordinates.
inline std::vector<std::vector<double>>
lattice_tables(const WeightEngine& engine, const Design& design, std::span<const double> x)
{
  const auto z = design.axis_grid();
  std::vector<std::vector<double>> t(x.size(), std::vector<double>(z.size()));
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t i = 0; i < z.size(); ++i)
      t[a][i] = engine.axis_integral(a, (x[a] - z[i]) / engine.h());
  return t;
}

//! sum_k (sum_j (2n+1)^{-(d-d_j)} w_{k_{I_j}} - (m-1)/N)^2
inline double
additive_lattice_square_sum(const NormalizerRequest& r)
{
  const auto& cfg = r.config;
  const auto& p = cfg.require_partition();
  const WeightEngine engine(cfg);
  const std::size_t n = r.design.n, d = cfg.dim();
  const auto t = lattice_tables(engine, r.design, r.x);
  const LatticeIndex full(n, d);
  const double N = static_cast<double>(full.count());
  const double side = static_cast<double>(2 * n + 1);
  std::vector<double> block_factor(p.size());
  for (std::size_t j = 0; j < p.size(); ++j)
    block_factor[j] = engine.fd_scale(p.block_dim(j), n) *
                      std::pow(side, -static_cast<double>(d - p.block_dim(j)));
  const double shift = static_cast<double>(p.size() - 1) / N;
  std::vector<std::size_t> offs;
  double s = 0.0;
  for (std::size_t k = 0; k < full.count(); ++k) {
    full.offsets(k, offs);
    double c = -shift;
    for (std::size_t j = 0; j < p.size(); ++j) {
      double w = block_factor[j];
      for (auto a : p.block(j))
        w *= t[a][offs[a]];
      c += w;
    }
    s += c * c;
  }
  return s;
}

//! sum_{||l|| <= 2q} sum_r beta_r beta_{l+r}, literally (beta_0 = 1 for
//! sequences).
inline double
ma_autocovariance_sum(const NoiseSpec& noise)
{
  if (noise.kind == NoiseKind::iid)
    return 1.0;
  const std::size_t q = noise.q;
  if (noise.kind == NoiseKind::ma_sequence) {
    auto beta = [&](long i) { return i == 0 ? 1.0 : (i < 0 || i > static_cast<long>(q) ? 0.0 : noise.beta[i - 1]); };
    double s = 0.0;
    for (long l = -2 * static_cast<long>(q); l <= 2 * static_cast<long>(q); ++l)
      for (long r = 0; r <= static_cast<long>(q); ++r)
        s += beta(r) * beta(l + r);
    return s;
  }
  const std::size_t d = noise.dim;
  const LatticeIndex lags(2 * q, d), coef(q, d);
  std::vector<std::size_t> l_offs, r_offs, sum(d);
  double s = 0.0;
  for (std::size_t l = 0; l < lags.count(); ++l) {
    lags.offsets(l, l_offs);
    for (std::size_t r = 0; r < coef.count(); ++r) {
      coef.offsets(r, r_offs);
      // (l + r) + q in offset form; outside {0..2q} means a zero coefficient
      bool inside = true;
      for (std::size_t i = 0; i < d; ++i) {
        const long v = static_cast<long>(l_offs[i]) - 2 * static_cast<long>(q) + static_cast<long>(r_offs[i]);
        inside = inside && v >= 0 && v <= 2 * static_cast<long>(q);
        sum[i] = inside ? static_cast<std::size_t>(v) : 0;
      }
      if (inside)
        s += noise.beta[r] * noise.beta[coef.flat(sum)];
    }
  }
  return s;
}

} // namespace detail

//! Normalizing sequences for iid errors: V1, V2, V3 (random design, outer
//! integral over a truncated box with a tail check) and U_nj, U_n, U_full
//! (fixed design, exact lattice sums).
inline double
normalizer_iid(const NormalizerRequest& request)
{
  detail::check_request(request);
  NormalizerRequest r = request;
  r.config.a_n = r.design.a_n;
  const auto& cfg = r.config;
  switch (r.kind) {
    case NormalizerKind::V1:
    case NormalizerKind::V2:
    case NormalizerKind::V3:
    case NormalizerKind::V1_MA:
    case NormalizerKind::V3_MA: {
      const double v = detail::random_design_normalizer(r, r.margin);
      if (r.design.density.family() == DensityFamily::uniform)
        return v;
      const double wider = detail::random_design_normalizer(r, 2.0 * r.margin);
      if (std::abs(wider - v) > 0.01 * std::abs(wider))
        throw NumericalError("truncation box too small for " + to_string(r.kind) + ": tail " +
                             format_double(std::abs(wider - v) / std::abs(wider)) + " of the value");
      return v;
    }
    case NormalizerKind::U_nj: {
      const WeightEngine engine(cfg);
      const auto& p = cfg.require_partition();
      const auto& block = p.block(r.block);
      std::vector<double> xj(r.x);
      if (xj.size() == cfg.dim()) {
        xj.clear();
        for (auto a : block)
          xj.push_back(r.x[a]);
      }
      if (xj.size() != block.size())
        throw StructuralError("U_nj evaluation point must be a block or full vector");
      const auto z = r.design.axis_grid();
      double s = 1.0;
      // block weights are products over the block axes, so the sum of
      // squares factorizes
      for (std::size_t i = 0; i < block.size(); ++i) {
        double axis = 0.0;
        for (double zi : z) {
          const double v = engine.axis_integral(block[i], (xj[i] - zi) / cfg.h);
          axis += v * v;
        }
        s *= axis;
      }
      const double scale = engine.fd_scale(block.size(), r.design.n);
      const double share = std::pow(static_cast<double>(2 * r.design.n + 1), -static_cast<double>(cfg.dim() - block.size()));
      return r.noise.sigma2 * share * scale * scale * s;
    }
    case NormalizerKind::U_full: {
      const WeightEngine engine(cfg);
      const auto t = detail::lattice_tables(engine, r.design, r.x);
      double s = 1.0;
      for (const auto& axis : t) {
        double a = 0.0;
        for (double v : axis)
          a += v * v;
        s *= a;
      }
      const double scale = engine.fd_scale(cfg.dim(), r.design.n);
      return r.noise.sigma2 * scale * scale * s;
    }
    case NormalizerKind::U_n:
    case NormalizerKind::V_MA: {
      const double sum = detail::additive_lattice_square_sum(r);
      const double s2 = r.kind == NormalizerKind::V_MA ? r.noise.sigma2 * detail::ma_autocovariance_sum(r.noise) : r.noise.sigma2;
      return s2 * sum;
    }
  }
  return 0.0;
}

//! MA counterparts: V1_MA and V3_MA replace sigma^2 by sigma^2 sum_{k,l}
//! beta_k beta_l; V_MA multiplies the lattice square sum by the summed MA
//! autocovariances.
inline double
normalizer_ma(const NormalizerRequest& r)
{
  if (!is_ma_kind(r.kind))
    throw std::invalid_argument("normalizer_ma needs V1_MA, V3_MA or V_MA");
  return normalizer_iid(r);
}

//! Maps an MA kind to the iid kind it generalizes.
inline NormalizerKind
iid_counterpart(NormalizerKind k)
{
  switch (k) {
    case NormalizerKind::V1_MA:
      return NormalizerKind::V1;
    case NormalizerKind::V3_MA:
      return NormalizerKind::V3;
    case NormalizerKind::V_MA:
      return NormalizerKind::U_n;
    default:
      return k;
  }
}

} // namespace deconvo
