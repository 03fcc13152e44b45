#pragma once

#include "../asymptotics/cumulants.hpp"
#include "../asymptotics/normalizers.hpp"
#include "monte_carlo.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace deconvo {

//! 41 x 41 uniform grid over [-2, 2]^2.
inline std::vector<double>
mise_grid()
{
  return square_grid(-2.0, 2.0, 41);
}

struct MiseTable
{
  std::vector<double> h;
  std::vector<double> mise;

  double argmin() const
  {
    std::size_t best = 0;
    for (std::size_t i = 1; i < mise.size(); ++i)
      if (mise[i] < mise[best])
        best = i;
    return h.at(best);
  }
};

//! MISE(h): squared error averaged over the integration grid and the
//! replicates. Every bandwidth sees the same replicate datasets.
inline MiseTable
mise_scan(const Scenario& s, std::span<const double> h_grid, std::span<const double> grid, std::size_t threads = 0)
{
  if (h_grid.empty())
    throw std::invalid_argument("MISE scan needs at least one bandwidth");
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (!(h_grid[i] > h_grid[i - 1]))
      throw std::invalid_argument("MISE bandwidth grid must be ascending");
  if (grid.empty() || grid.size() % s.dim() != 0)
    throw StructuralError("MISE integration grid does not match the dimension");
  Scenario base = s;
  base.points.assign(grid.begin(), grid.end());
  base.config.h = h_grid.front();
  base.validate();

  const auto signal = base.make_signal();
  const std::size_t P = grid.size() / s.dim();
  std::vector<double> truth(P);
  for (std::size_t p = 0; p < P; ++p)
    truth[p] = signal(grid.subspan(p * s.dim(), s.dim()));

  std::vector<EstimatorConfig> cfgs;
  std::vector<std::optional<EstimatorPlan>> plans;
  for (double h : h_grid) {
    auto c = base.estimator_config();
    c.h = h;
    cfgs.push_back(c);
    if (s.design.kind == DesignKind::fixed_grid)
      plans.emplace_back(EstimatorPlan(s.kind, c, s.design));
    else
      plans.emplace_back();
  }
  const ReplicateSampler sample(base);
  auto res = run_replicates<std::vector<double>>(base.reps, threads, [&](std::size_t r) {
    const auto ds = sample(r);
    std::vector<double> ise(h_grid.size());
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
      const auto est = plans[i] ? plans[i]->evaluate(grid, ds.responses)
                                : EstimatorPlan::for_dataset(s.kind, cfgs[i], ds).evaluate(grid, ds.responses);
      double acc = 0;
      for (std::size_t p = 0; p < P; ++p)
        acc += (est[p] - truth[p]) * (est[p] - truth[p]);
      ise[i] = acc / static_cast<double>(P);
    }
    return ise;
  });
  MiseTable t;
  t.h.assign(h_grid.begin(), h_grid.end());
  t.mise.assign(h_grid.size(), 0.0);
  std::size_t used = 0;
  for (const auto& slot : res.slots)
    if (slot) {
      ++used;
      for (std::size_t i = 0; i < h_grid.size(); ++i)
        t.mise[i] += (*slot)[i];
    }
  for (auto& m : t.mise)
    m /= static_cast<double>(used);
  return t;
}

//! Normalizer request matching a scenario at one point: U-forms for fixed
//! designs (V_MA under MA noise), V1 and V3 for random designs.
inline NormalizerRequest
scenario_normalizer(const Scenario& s, std::span<const double> x)
{
  NormalizerRequest r;
  r.config = s.estimator_config();
  r.design = s.design;
  r.noise = s.noise;
  r.signal = s.make_signal();
  r.true_kernel = s.make_true_kernel();
  r.x.assign(x.begin(), x.end());
  const bool ma = s.noise.kind != NoiseKind::iid;
  switch (s.kind) {
    case EstimatorKind::fd:
      r.kind = NormalizerKind::U_full;
      break;
    case EstimatorKind::fd_additive:
      r.kind = ma ? NormalizerKind::V_MA : NormalizerKind::U_n;
      break;
    case EstimatorKind::rd:
      r.kind = ma ? NormalizerKind::V1_MA : NormalizerKind::V1;
      break;
    case EstimatorKind::rd_additive:
      r.kind = ma ? NormalizerKind::V3_MA : NormalizerKind::V3;
      r.include_constant = true;
      break;
  }
  return r;
}

inline double
scenario_normalizer_value(const Scenario& s, std::span<const double> x)
{
  const auto r = scenario_normalizer(s, x);
  if (s.kind == EstimatorKind::fd && s.noise.kind != NoiseKind::iid) {
    // no closed U-form for the unrestricted estimator under MA noise: use
    // the exact variance of the linear statistic
    const EstimatorPlan plan(s.kind, r.config, s.design);
    return linear_noise_variance(plan.weights(x), s.noise, s.design);
  }
  return is_ma_kind(r.kind) ? normalizer_ma(r) : normalizer_iid(r);
}

struct NormalityThresholds
{
  double k3 = 0.2;
  double k4 = 0.4;
  double k2_lo = 0.8;
  double k2_hi = 1.2;
};

struct NormalityReport
{
  std::vector<double> standardized;
  std::vector<double> cumulants; // k_1..k_4
  double normalizer = 0;
  double mc_mean = 0;
  bool shape_ok = false;
  bool variance_mismatch = false;

  bool pass() const { return shape_ok && !variance_mismatch; }

  nlohmann::json to_json() const
  {
    return { { "normalizer", normalizer },
             { "mc_mean", mc_mean },
             { "kappa", cumulants },
             { "samples", standardized.size() },
             { "shape_ok", shape_ok },
             { "variance_mismatch", variance_mismatch },
             { "verdict", pass() ? "pass" : "fail" } };
  }
};

//! Standardizes the estimates at the first scenario point by the scenario's
//! normalizer (times `normalizer_scale`) and checks the k-statistics.
inline NormalityReport
normality_diagnostics(const Scenario& s,
                      double normalizer_scale = 1.0,
                      NormalityThresholds th = {},
                      std::size_t threads = 0)
{
  Scenario one = s;
  one.points.assign(s.points.begin(), s.points.begin() + s.dim());
  const auto run = simulate_estimates(one, threads);
  NormalityReport rep;
  rep.normalizer = scenario_normalizer_value(one, one.points) * normalizer_scale;
  for (const auto& e : run.estimates)
    rep.mc_mean += e[0];
  rep.mc_mean /= static_cast<double>(run.estimates.size());
  const double sd = std::sqrt(rep.normalizer);
  for (const auto& e : run.estimates)
    rep.standardized.push_back((e[0] - rep.mc_mean) / sd);
  rep.cumulants = empirical_cumulants(rep.standardized, 4);
  rep.shape_ok = std::abs(rep.cumulants[2]) <= th.k3 && std::abs(rep.cumulants[3]) <= th.k4;
  rep.variance_mismatch = rep.cumulants[1] < th.k2_lo || rep.cumulants[1] > th.k2_hi;
  return rep;
}

//! Fits under the assumed kernel and, when it admits estimation, under the
//! true kernel, both on the same dataset and grid.
struct MisspecResult
{
  EstimateField misspecified;
  std::optional<EstimateField> true_fit;
};

inline MisspecResult
misspecification_run(const Scenario& s, std::span<const double> grid)
{
  Scenario g = s;
  g.points.assign(grid.begin(), grid.end());
  g.validate();
  const ReplicateSampler sample(g);
  const auto ds = sample(0);
  MisspecResult out;
  out.misspecified = estimate_field(ds, g.estimator_config(), g.kind, grid);
  const auto truth = g.make_true_kernel();
  if (truth.has_symmetric_transform()) {
    auto cfg = g.estimator_config();
    cfg.psi = truth;
    out.true_fit = estimate_field(ds, cfg, g.kind, grid);
  }
  return out;
}

} // namespace deconvo
