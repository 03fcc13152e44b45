#pragma once

#include "../core/config.hpp"
#include "../core/design.hpp"
#include "../core/noise.hpp"
#include "../core/presets.hpp"
#include "../estimators/estimate.hpp"
#include "../estimators/plan.hpp"
#include "../synth/dataset_io.hpp"
#include "../synth/rng.hpp"

#include <json.hpp>

#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace deconvo {

//! One simulation setting. Kernels and signals are preset identifiers so the
//! scenario echoes verbatim into a manifest.
struct Scenario
{
  std::string signal = "theta1";
  std::string true_kernel = "laplace:3";
  //! Kernel the estimator assumes; defaults to the true kernel.
  std::optional<std::string> assumed_kernel;
  Design design = Design::fixed_grid(50, 0.25, 2);
  NoiseSpec noise = NoiseSpec::iid(0.25);
  EstimatorKind kind = EstimatorKind::fd_additive;
  //! h, K, partition, Q and quadrature settings; psi and a_n are filled in
  //! from the kernels and the design.
  EstimatorConfig config;
  std::vector<double> points; // flat, stride design.dim
  std::size_t reps = 200;
  std::uint64_t seed = 1;

  std::size_t dim() const { return design.dim; }
  std::size_t point_count() const { return dim() ? points.size() / dim() : 0; }

  AdditiveSignal make_signal() const { return presets::signal(signal); }
  ConvolutionKernel make_true_kernel() const { return presets::kernel(true_kernel, dim()); }

  EstimatorConfig estimator_config() const
  {
    EstimatorConfig c = config;
    c.psi = presets::kernel(assumed_kernel.value_or(true_kernel), dim());
    c.a_n = design.a_n;
    if (c.K.dim() != dim())
      c.K = c.K.with_dim(dim());
    if (is_additive(kind) && !c.partition)
      c.partition = Partition::singletons(dim());
    return c;
  }

  void validate() const
  {
    if (reps < 1)
      throw std::invalid_argument("reps must be at least 1");
    design.validate();
    noise.validate();
    if (points.empty() || points.size() % dim() != 0)
      throw StructuralError("evaluation points must be a nonempty multiple of the dimension");
    if (is_fixed_design(kind) != (design.kind == DesignKind::fixed_grid))
      throw StructuralError("estimator " + to_string(kind) + " does not match the " +
                            (design.kind == DesignKind::fixed_grid ? "fixed" : "random") + " design");
    if (make_signal().dim() != dim())
      throw StructuralError("signal dimension does not match the design");
    const auto cfg = estimator_config();
    if (!cfg.psi.has_symmetric_transform())
      throw UnsupportedError("assumed kernel " + cfg.psi.id() +
                             " has a non-symmetric transform and cannot be used for estimation");
    cfg.validate();
  }

  bool operator==(const Scenario&) const = default;
};

inline nlohmann::json
to_json(const Scenario& s)
{
  nlohmann::json j{ { "signal", s.signal },
                    { "true_kernel", s.true_kernel },
                    { "assumed_kernel", s.assumed_kernel.value_or(s.true_kernel) },
                    { "design", to_json(s.design) },
                    { "noise", to_json(s.noise) },
                    { "estimator", to_string(s.kind) },
                    { "config", to_json(s.estimator_config()) },
                    { "points", s.points },
                    { "reps", s.reps },
                    { "seed", s.seed } };
  return j;
}

//! Seed of replicate r; independent of the worker schedule.
inline std::uint64_t
replicate_seed(std::uint64_t master, std::size_t r)
{
  return derive_seed(master, 0x1000 + r);
}

//! Worker count: explicit request, else DECONVO_THREADS, else the hardware.
inline std::size_t
worker_count(std::size_t requested = 0)
{
  if (requested)
    return requested;
  if (const char* env = std::getenv("DECONVO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0)
      return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace points {

//! 5 x 5 layout on {-1.6, -0.8, 0, 0.8, 1.6}^2, listed block by block with
//! the second coordinate fixed within a block.
inline std::vector<double>
grid25()
{
  const double v[] = { -1.6, -0.8, 0.0, 0.8, 1.6 };
  std::vector<double> p;
  for (double block : v)
    for (double row : v) {
      p.push_back(row);
      p.push_back(block);
    }
  return p;
}

inline std::vector<double>
probe4()
{
  return { 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.8 };
}

} // namespace points

} // namespace deconvo
