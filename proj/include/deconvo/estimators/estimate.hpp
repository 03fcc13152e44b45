#pragma once

#include "../core/config.hpp"
#include "../core/design.hpp"
#include "../core/noise.hpp"
#include "../error.hpp"
#include "../synth/dataset_io.hpp"
#include "../util.hpp"
#include "plan.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

namespace deconvo {

inline double
estimate_fd(const Dataset& ds, const EstimatorConfig& cfg, std::span<const double> x)
{
  return EstimatorPlan::for_dataset(EstimatorKind::fd, cfg, ds).evaluate_one(x, ds.responses);
}

inline double
estimate_fd_additive(const Dataset& ds, const EstimatorConfig& cfg, std::span<const double> x)
{
  return EstimatorPlan::for_dataset(EstimatorKind::fd_additive, cfg, ds).evaluate_one(x, ds.responses);
}

inline double
estimate_rd(const Dataset& ds, const EstimatorConfig& cfg, std::span<const double> x)
{
  return EstimatorPlan::for_dataset(EstimatorKind::rd, cfg, ds).evaluate_one(x, ds.responses);
}

inline double
estimate_rd_additive(const Dataset& ds, const EstimatorConfig& cfg, std::span<const double> x)
{
  return EstimatorPlan::for_dataset(EstimatorKind::rd_additive, cfg, ds).evaluate_one(x, ds.responses);
}

//! Var(sum_k c_k eps_k) for the noise model, evaluated exactly: the noise is
//! a linear map of iid shocks, so the variance is sigma2 times the squared
//! norm of the weights pulled back onto the shocks.
inline double
linear_noise_variance(std::span<const double> c, const NoiseSpec& noise, const Design& design)
{
  switch (noise.kind) {
    case NoiseKind::iid: {
      double s = 0.0;
      for (double v : c)
        s += v * v;
      return noise.sigma2 * s;
    }
    case NoiseKind::ma_sequence: {
      // eps_t = sum_{i=0}^q beta_i Z_{t-i}; shock s (shifted by q) feeds t = s - q + i
      const std::size_t q = noise.q, N = c.size();
      double s = 0.0;
      for (std::size_t shock = 0; shock < N + q; ++shock) {
        double v = 0.0;
        for (std::size_t i = 0; i <= q; ++i) {
          if (shock + i < q || shock + i - q >= N)
            continue;
          v += (i == 0 ? 1.0 : noise.beta[i - 1]) * c[shock + i - q];
        }
        s += v * v;
      }
      return noise.sigma2 * s;
    }
    case NoiseKind::ma_lattice: {
      const std::size_t q = noise.q, d = design.dim;
      const LatticeIndex lat(design.n, d), halo(design.n + q, d), coef(q, d);
      if (lat.count() != c.size())
        throw StructuralError("weights do not cover the lattice");
      std::vector<double> pulled(halo.count(), 0.0);
      std::vector<std::size_t> k_offs, r_offs, src(d);
      for (std::size_t k = 0; k < c.size(); ++k) {
        lat.offsets(k, k_offs);
        for (std::size_t r = 0; r < coef.count(); ++r) {
          coef.offsets(r, r_offs);
          for (std::size_t i = 0; i < d; ++i)
            src[i] = k_offs[i] + 2 * q - r_offs[i];
          pulled[halo.flat(src)] += noise.beta[r] * c[k];
        }
      }
      double s = 0.0;
      for (double v : pulled)
        s += v * v;
      return noise.sigma2 * s;
    }
  }
  return 0.0;
}

//! Estimates on a set of points with the estimator configuration that
//! produced them.
struct EstimateField
{
  std::size_t dim = 0;
  std::vector<double> points;
  std::vector<double> estimates;
  std::optional<std::vector<double>> variances;
  EstimatorKind kind = EstimatorKind::fd;
  EstimatorConfig config;

  std::size_t size() const { return estimates.size(); }
  std::span<const double> point(std::size_t i) const { return { points.data() + i * dim, dim }; }
};

//! Applies one estimator at every point; with `predict_variance` and a noise
//! model on the dataset, attaches the exact finite-sample variance of each
//! estimate given the design.
inline EstimateField
estimate_field(const Dataset& ds,
               const EstimatorConfig& cfg,
               EstimatorKind kind,
               std::span<const double> points,
               bool predict_variance = false)
{
  const EstimatorPlan plan = EstimatorPlan::for_dataset(kind, cfg, ds);
  EstimateField field;
  field.dim = ds.design.dim;
  field.points.assign(points.begin(), points.end());
  field.estimates = plan.evaluate(points, ds.responses);
  field.kind = kind;
  field.config = plan.config();
  if (predict_variance && ds.noise && ds.noise->sigma2 > 0) {
    std::vector<double> v(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
      v[i] = linear_noise_variance(plan.weights(field.point(i)), *ds.noise, ds.design);
    field.variances = std::move(v);
  }
  return field;
}

//! Square grid of side `count` over [lo, hi]^2 (first coordinate slowest).
inline std::vector<double>
square_grid(double lo, double hi, std::size_t count)
{
  std::vector<double> pts;
  pts.reserve(2 * count * count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) {
      const double step = count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0;
      pts.push_back(lo + step * static_cast<double>(i));
      pts.push_back(lo + step * static_cast<double>(j));
    }
  return pts;
}

inline nlohmann::json
to_json(const EstimatorConfig& c)
{
  nlohmann::json j{ { "h", c.h },
                    { "a_n", c.a_n },
                    { "kernel", c.psi.id() },
                    { "smoothing", c.K.is_sinc() ? nlohmann::json("sinc") : nlohmann::json(c.K.profile()) },
                    { "order", c.order },
                    { "fast_path", c.fast_path },
                    { "imag_tolerance", c.imag_tolerance } };
  if (c.partition)
    j["partition"] = c.partition->to_string();
  return j;
}

//! CSV with columns x_1..x_d, estimate[, predicted_var] and a JSON sidecar
//! holding the estimator configuration.
inline void
write_field(const std::filesystem::path& csv, const EstimateField& field)
{
  std::ofstream out(csv);
  if (!out)
    throw IoError("cannot write " + csv.string());
  for (std::size_t i = 1; i <= field.dim; ++i)
    out << "x_" << i << ',';
  out << "estimate" << (field.variances ? ",predicted_var" : "") << '\n';
  for (std::size_t p = 0; p < field.size(); ++p) {
    for (double x : field.point(p))
      out << format_double(x) << ',';
    out << format_double(field.estimates[p]);
    if (field.variances)
      out << ',' << format_double((*field.variances)[p]);
    out << '\n';
  }
  if (!out)
    throw IoError("write failed for " + csv.string());
  std::ofstream side(sidecar_path(csv));
  side << nlohmann::json{ { "estimator", to_string(field.kind) }, { "config", to_json(field.config) }, { "rows", field.size() } }
            .dump(2)
       << '\n';
}

} // namespace deconvo
