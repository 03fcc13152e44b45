#pragma once

#include "../core/config.hpp"
#include "../core/design.hpp"
#include "../error.hpp"
#include "../fourier/weights.hpp"
#include "../util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace deconvo {

enum class EstimatorKind
{
  fd,          // unrestricted, fixed design
  fd_additive, // additive, fixed design (marginal averaging)
  rd,          // unrestricted, random design
  rd_additive  // additive, random design (marginal integration)
};

inline std::string
to_string(EstimatorKind k)
{
  switch (k) {
    case EstimatorKind::fd:
      return "fd";
    case EstimatorKind::fd_additive:
      return "fd-additive";
    case EstimatorKind::rd:
      return "rd";
    case EstimatorKind::rd_additive:
      return "rd-additive";
  }
  return {};
}

inline EstimatorKind
parse_estimator_kind(const std::string& s)
{
  for (auto k : { EstimatorKind::fd, EstimatorKind::fd_additive, EstimatorKind::rd, EstimatorKind::rd_additive })
    if (to_string(k) == s)
      return k;
  throw std::invalid_argument("unknown estimator '" + s + "' (fd, fd-additive, rd, rd-additive)");
}

inline bool
is_fixed_design(EstimatorKind k)
{
  return k == EstimatorKind::fd || k == EstimatorKind::fd_additive;
}

inline bool
is_additive(EstimatorKind k)
{
  return k == EstimatorKind::fd_additive || k == EstimatorKind::rd_additive;
}

//! Each estimator is a linear functional sum_k c_k(x) Y_k. A plan holds
//! everything that does not depend on the responses: the weight engine, the
//! grid or the random locations, per-observation scales and complement
//! factors. Plans are immutable and shareable across threads.
class EstimatorPlan
{
public:
  EstimatorPlan(EstimatorKind kind, EstimatorConfig cfg, Design design, std::vector<double> locations = {});

  static EstimatorPlan for_dataset(EstimatorKind kind, const EstimatorConfig& cfg, const Dataset& ds)
  {
    return EstimatorPlan(kind, cfg, ds.design, ds.design.kind == DesignKind::random ? ds.locations : std::vector<double>{});
  }

  EstimatorKind kind() const { return kind_; }
  const WeightEngine& engine() const { return engine_; }
  const EstimatorConfig& config() const { return engine_.config(); }
  const Design& design() const { return design_; }
  std::size_t dim() const { return design_.dim; }
  std::size_t size() const { return design_.sample_size(); }

  //! Combined weights c_k(x), one per observation.
  std::vector<double> weights(std::span<const double> x) const;

  //! Estimates at `points` (flat, stride d).
  std::vector<double> evaluate(std::span<const double> points, std::span<const double> Y) const;

  double evaluate_one(std::span<const double> x, std::span<const double> Y) const
  {
    return evaluate(x, Y).front();
  }

private:
  using AxisTables = std::vector<std::map<double, std::vector<double>>>;

  //! J((x_a - z)/h) over the grid values z (fixed design) or the observed
  //! coordinates X_{k,a} (random design).
  std::vector<double> axis_table(std::size_t axis, double coord) const;
  AxisTables tables_for(std::span<const double> points) const;

  double fd_full_fast(std::span<const double> x, std::span<const double> Y, const AxisTables& t) const;
  double fd_additive_fast(std::span<const double> x,
                          const std::vector<std::vector<double>>& Z,
                          const AxisTables& t) const;
  double rd_fast(std::span<const double> x, std::span<const double> Y, const AxisTables& t) const;
  std::vector<std::vector<double>> block_averages(std::span<const double> Y) const;

  std::vector<double> weights_naive(std::span<const double> x) const;
  std::vector<double> weights_fast(std::span<const double> x) const;

  EstimatorKind kind_;
  Design design_;
  WeightEngine engine_;
  std::vector<double> locations_;
  std::vector<double> grid_;                      // axis grid (fixed design)
  std::vector<double> scale_;                     // per observation (random design)
  std::vector<std::vector<double>> complement_;   // per axis, per observation (rd_additive)
  std::vector<double> constant_;                  // c-hat weight per observation (rd_additive)
};

inline EstimatorPlan::EstimatorPlan(EstimatorKind kind,
                                    EstimatorConfig cfg,
                                    Design design,
                                    std::vector<double> locations)
  : kind_(kind)
  , design_(std::move(design))
  , engine_((cfg.a_n = design_.a_n, std::move(cfg)))
  , locations_(std::move(locations))
{
  design_.validate();
  const auto& c = engine_.config();
  if (c.dim() != design_.dim)
    throw StructuralError("estimator kernel dimension does not match the design");
  if (is_additive(kind_))
    c.require_partition();
  if (is_fixed_design(kind_)) {
    if (design_.kind != DesignKind::fixed_grid)
      throw StructuralError(to_string(kind_) + " estimator needs a fixed-grid design");
    grid_ = design_.axis_grid();
    if (!c.fast_path)
      locations_ = grid_locations(design_);
    return;
  }
  if (design_.kind != DesignKind::random)
    throw StructuralError(to_string(kind_) + " estimator needs a random design");
  if (locations_.size() != design_.n * design_.dim)
    throw StructuralError("random-design plan needs n locations");
  const std::size_t N = design_.n, d = design_.dim;
  scale_.resize(N);
  for (std::size_t k = 0; k < N; ++k)
    scale_[k] = engine_.rd_scale({ &locations_[k * d], d }, N, design_.density);
  if (kind_ == EstimatorKind::rd_additive && c.fast_path) {
    complement_.assign(d, std::vector<double>(N));
    constant_.assign(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      double prod = scale_[k];
      for (std::size_t a = 0; a < d; ++a) {
        const double X = locations_[k * d + a];
        complement_[a][k] = engine_.axis_integral(a, -X / c.h, &engine_.axis_measure(a));
        prod *= complement_[a][k];
      }
      constant_[k] = prod;
    }
  }
}

inline std::vector<double>
EstimatorPlan::axis_table(std::size_t axis, double coord) const
{
  const double h = engine_.h();
  if (is_fixed_design(kind_)) {
    std::vector<double> t(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i)
      t[i] = engine_.axis_integral(axis, (coord - grid_[i]) / h);
    return t;
  }
  const std::size_t N = design_.n, d = design_.dim;
  std::vector<double> t(N);
  for (std::size_t k = 0; k < N; ++k)
    t[k] = engine_.axis_integral(axis, (coord - locations_[k * d + axis]) / h);
  return t;
}

inline EstimatorPlan::AxisTables
EstimatorPlan::tables_for(std::span<const double> points) const
{
  const std::size_t d = dim();
  AxisTables tables(d);
  for (std::size_t p = 0; p * d < points.size(); ++p)
    for (std::size_t a = 0; a < d; ++a) {
      const double c = points[p * d + a];
      if (!tables[a].contains(c))
        tables[a].emplace(c, axis_table(a, c));
    }
  return tables;
}

inline std::vector<std::vector<double>>
EstimatorPlan::block_averages(std::span<const double> Y) const
{
  const auto& p = config().require_partition();
  const LatticeIndex full(design_.n, dim());
  std::vector<std::vector<double>> Z(p.size());
  std::vector<std::size_t> offs, sub;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& block = p.block(j);
    const LatticeIndex bl(design_.n, block.size());
    Z[j].assign(bl.count(), 0.0);
    for (std::size_t k = 0; k < full.count(); ++k) {
      full.offsets(k, offs);
      sub.resize(block.size());
      for (std::size_t i = 0; i < block.size(); ++i)
        sub[i] = offs[block[i]];
      Z[j][bl.flat(sub)] += Y[k];
    }
    const double inv = static_cast<double>(bl.count()) / static_cast<double>(full.count());
    for (auto& z : Z[j])
      z *= inv;
  }
  return Z;
}

inline double
EstimatorPlan::fd_full_fast(std::span<const double> x, std::span<const double> Y, const AxisTables& t) const
{
  const std::size_t d = dim();
  std::vector<const std::vector<double>*> tab(d);
  for (std::size_t a = 0; a < d; ++a)
    tab[a] = &t[a].at(x[a]);
  const LatticeIndex full(design_.n, d);
  std::vector<std::size_t> offs;
  double s = 0.0;
  for (std::size_t k = 0; k < full.count(); ++k) {
    full.offsets(k, offs);
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a)
      w *= (*tab[a])[offs[a]];
    s += w * Y[k];
  }
  return engine_.fd_scale(d, design_.n) * s;
}

inline double
EstimatorPlan::fd_additive_fast(std::span<const double> x,
                                const std::vector<std::vector<double>>& Z,
                                const AxisTables& t) const
{
  const auto& p = config().require_partition();
  double total = 0.0, theta0 = 0.0;
  std::vector<std::size_t> offs;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& block = p.block(j);
    const LatticeIndex bl(design_.n, block.size());
    double s = 0.0, zsum = 0.0;
    for (std::size_t b = 0; b < bl.count(); ++b) {
      bl.offsets(b, offs);
      double w = 1.0;
      for (std::size_t i = 0; i < block.size(); ++i)
        w *= t[block[i]].at(x[block[i]])[offs[i]];
      s += w * Z[j][b];
      zsum += Z[j][b];
    }
    total += engine_.fd_scale(block.size(), design_.n) * s;
    if (j == 0)
      theta0 = zsum / static_cast<double>(bl.count());
  }
  // every Z_j carries the overall level once; keep it a single time
  return total - static_cast<double>(p.size() - 1) * theta0;
}

inline double
EstimatorPlan::rd_fast(std::span<const double> x, std::span<const double> Y, const AxisTables& t) const
{
  const std::size_t d = dim(), N = design_.n;
  if (kind_ == EstimatorKind::rd) {
    std::vector<const std::vector<double>*> tab(d);
    for (std::size_t a = 0; a < d; ++a)
      tab[a] = &t[a].at(x[a]);
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      double w = scale_[k];
      for (std::size_t a = 0; a < d; ++a)
        w *= (*tab[a])[k];
      s += w * Y[k];
    }
    return s;
  }
  const auto& p = config().require_partition();
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& block = p.block(j);
    const auto comp = p.complement(j);
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      double w = scale_[k];
      for (auto a : block)
        w *= t[a].at(x[a])[k];
      for (auto a : comp)
        w *= complement_[a][k];
      s += w * Y[k];
    }
    total += s;
  }
  double c = 0.0;
  for (std::size_t k = 0; k < N; ++k)
    c += constant_[k] * Y[k];
  return total - static_cast<double>(p.size() - 1) * c;
}

inline std::vector<double>
EstimatorPlan::evaluate(std::span<const double> points, std::span<const double> Y) const
{
  const std::size_t d = dim();
  if (points.size() % d != 0)
    throw StructuralError("evaluation points do not match the estimator dimension");
  if (Y.size() != size())
    throw StructuralError("response count does not match the design");
  const std::size_t P = points.size() / d;
  std::vector<double> out(P);
  if (!config().fast_path) {
    for (std::size_t p = 0; p < P; ++p) {
      const auto c = weights(points.subspan(p * d, d));
      double s = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k)
        s += c[k] * Y[k];
      out[p] = s;
    }
    return out;
  }
  const auto tables = tables_for(points);
  std::vector<std::vector<double>> Z;
  if (kind_ == EstimatorKind::fd_additive)
    Z = block_averages(Y);
  for (std::size_t p = 0; p < P; ++p) {
    const auto x = points.subspan(p * d, d);
    switch (kind_) {
      case EstimatorKind::fd:
        out[p] = fd_full_fast(x, Y, tables);
        break;
      case EstimatorKind::fd_additive:
        out[p] = fd_additive_fast(x, Z, tables);
        break;
      case EstimatorKind::rd:
      case EstimatorKind::rd_additive:
        out[p] = rd_fast(x, Y, tables);
        break;
    }
  }
  return out;
}

inline std::vector<double>
EstimatorPlan::weights(std::span<const double> x) const
{
  if (x.size() != dim())
    throw StructuralError("evaluation point does not match the estimator dimension");
  return config().fast_path ? weights_fast(x) : weights_naive(x);
}

inline std::vector<double>
EstimatorPlan::weights_fast(std::span<const double> x) const
{
  const std::size_t d = dim(), N = size();
  const auto t = tables_for(x);
  std::vector<double> c(N, 0.0);
  std::vector<std::size_t> offs;
  switch (kind_) {
    case EstimatorKind::fd: {
      const LatticeIndex full(design_.n, d);
      const double scale = engine_.fd_scale(d, design_.n);
      for (std::size_t k = 0; k < N; ++k) {
        full.offsets(k, offs);
        double w = scale;
        for (std::size_t a = 0; a < d; ++a)
          w *= t[a].at(x[a])[offs[a]];
        c[k] = w;
      }
      return c;
    }
    case EstimatorKind::fd_additive: {
      const auto& p = config().require_partition();
      const LatticeIndex full(design_.n, d);
      const double m1 = static_cast<double>(p.size() - 1) / static_cast<double>(N);
      for (std::size_t k = 0; k < N; ++k) {
        full.offsets(k, offs);
        double s = -m1;
        for (std::size_t j = 0; j < p.size(); ++j) {
          const auto& block = p.block(j);
          const LatticeIndex bl(design_.n, block.size());
          double w = engine_.fd_scale(block.size(), design_.n) * static_cast<double>(bl.count()) /
                     static_cast<double>(N);
          for (auto a : block)
            w *= t[a].at(x[a])[offs[a]];
          s += w;
        }
        c[k] = s;
      }
      return c;
    }
    case EstimatorKind::rd: {
      for (std::size_t k = 0; k < N; ++k) {
        double w = scale_[k];
        for (std::size_t a = 0; a < d; ++a)
          w *= t[a].at(x[a])[k];
        c[k] = w;
      }
      return c;
    }
    case EstimatorKind::rd_additive: {
      const auto& p = config().require_partition();
      const double m1 = static_cast<double>(p.size() - 1);
      for (std::size_t k = 0; k < N; ++k) {
        double s = -m1 * constant_[k];
        for (std::size_t j = 0; j < p.size(); ++j) {
          double w = scale_[k];
          for (auto a : p.block(j))
            w *= t[a].at(x[a])[k];
          for (auto a : p.complement(j))
            w *= complement_[a][k];
          s += w;
        }
        c[k] = s;
      }
      return c;
    }
  }
  return c;
}

inline std::vector<double>
EstimatorPlan::weights_naive(std::span<const double> x) const
{
  const std::size_t d = dim(), N = size();
  std::vector<double> c(N, 0.0);
  const auto& f = design_.density;
  std::vector<double> xj, zj;
  for (std::size_t k = 0; k < N; ++k) {
    const std::span<const double> loc(&locations_[k * d], d);
    switch (kind_) {
      case EstimatorKind::fd:
        c[k] = engine_.fd_full(x, loc, design_.n);
        break;
      case EstimatorKind::rd:
        c[k] = engine_.rd(x, loc, design_.n, f);
        break;
      case EstimatorKind::fd_additive:
      case EstimatorKind::rd_additive: {
        const auto& p = config().require_partition();
        double s = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
          const auto& block = p.block(j);
          xj.clear();
          zj.clear();
          for (auto a : block) {
            xj.push_back(x[a]);
            zj.push_back(loc[a]);
          }
          if (kind_ == EstimatorKind::fd_additive) {
            const double share = std::pow(static_cast<double>(2 * design_.n + 1),
                                          static_cast<double>(block.size())) /
                                 static_cast<double>(N);
            s += share * engine_.fd_block(j, xj, zj, design_.n);
          } else {
            s += engine_.rd_additive(j, xj, loc, design_.n, f);
          }
        }
        const double m1 = static_cast<double>(p.size() - 1);
        if (kind_ == EstimatorKind::fd_additive)
          s -= m1 / static_cast<double>(N);
        else if (m1 > 0)
          s -= m1 * engine_.rd_constant(loc, design_.n, f);
        c[k] = s;
        break;
      }
    }
  }
  return c;
}

} // namespace deconvo
