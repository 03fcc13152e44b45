#pragma once

#include "../synth/forward.hpp"
#include "../synth/sampling.hpp"
#include "scenario.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace deconvo {

//! Outcome of replicate-parallel work: one result slot per replicate, in
//! replicate order, plus the diagnostics of failed replicates.
template<class T>
struct ReplicateResults
{
  std::vector<std::optional<T>> slots;
  std::vector<std::string> diagnostics;

  std::size_t failed() const
  {
    std::size_t f = 0;
    for (const auto& s : slots)
      f += !s.has_value();
    return f;
  }
};

//! Runs fn(r) for r < reps on a pool of workers. A replicate that throws a
//! numerical error is dropped with a diagnostic; any other exception aborts.
//! More than 1% dropped replicates aborts the run.
template<class T>
ReplicateResults<T>
run_replicates(std::size_t reps, std::size_t threads, const std::function<T(std::size_t)>& fn)
{
  ReplicateResults<T> out;
  out.slots.resize(reps);
  std::vector<std::string> notes(reps);
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < reps;) {
      try {
        out.slots[r] = fn(r);
      } catch (const NumericalError& e) {
        notes[r] = "replicate " + std::to_string(r) + ": " + e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal)
          fatal = std::current_exception();
        next = reps;
      }
    }
  };
  const std::size_t n = std::min(worker_count(threads), reps);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  if (fatal)
    std::rethrow_exception(fatal);
  for (auto& s : notes)
    if (!s.empty()) {
      std::cerr << "deconvo: " << s << '\n';
      out.diagnostics.push_back(std::move(s));
    }
  if (100 * out.failed() > reps)
    throw NumericalError(std::to_string(out.failed()) + " of " + std::to_string(reps) +
                         " replicates failed (limit 1%); first: " + out.diagnostics.front());
  return out;
}

//! Draws replicate datasets for a scenario. Fixed designs share one
//! noiseless forward signal across replicates.
class ReplicateSampler
{
public:
  explicit ReplicateSampler(const Scenario& s)
    : scenario_(s)
    , signal_(s.make_signal())
    , psi_(s.make_true_kernel())
  {
    if (s.design.kind == DesignKind::fixed_grid)
      g_ = forward_on_lattice(signal_, psi_, s.design);
  }

  Dataset operator()(std::size_t r) const
  {
    const auto seed = replicate_seed(scenario_.seed, r);
    if (scenario_.design.kind == DesignKind::fixed_grid)
      return sample_fixed_design(scenario_.design, signal_, psi_, scenario_.noise, seed, &g_);
    return sample_random_design(scenario_.design, signal_, psi_, scenario_.noise, seed);
  }

  const AdditiveSignal& signal() const { return signal_; }

private:
  const Scenario& scenario_;
  AdditiveSignal signal_;
  ConvolutionKernel psi_;
  std::vector<double> g_;
};

//! Estimates at every scenario point for every replicate (replicate-major).
struct McRun
{
  std::size_t points = 0;
  std::vector<std::vector<double>> estimates; // successful replicates, in order
  std::size_t failed = 0;
  std::vector<std::string> diagnostics;
};

inline McRun
simulate_estimates(const Scenario& s, std::size_t threads = 0)
{
  s.validate();
  const auto cfg = s.estimator_config();
  const ReplicateSampler sample(s);
  std::optional<EstimatorPlan> fixed_plan;
  if (s.design.kind == DesignKind::fixed_grid)
    fixed_plan.emplace(s.kind, cfg, s.design);
  auto res = run_replicates<std::vector<double>>(s.reps, threads, [&](std::size_t r) {
    const auto ds = sample(r);
    if (fixed_plan)
      return fixed_plan->evaluate(s.points, ds.responses);
    return EstimatorPlan::for_dataset(s.kind, cfg, ds).evaluate(s.points, ds.responses);
  });
  McRun run;
  run.points = s.point_count();
  run.failed = res.failed();
  run.diagnostics = std::move(res.diagnostics);
  for (auto& slot : res.slots)
    if (slot)
      run.estimates.push_back(std::move(*slot));
  return run;
}

struct McRow
{
  std::vector<double> x;
  double theta = 0;
  double mean = 0;
  double var = 0; // population variance over replicates, so mse = var + bias^2
  double mse = 0;
};

struct McSummary
{
  std::size_t dim = 0;
  std::vector<McRow> rows;
  std::size_t reps = 0;
  std::size_t failed = 0;
  double runtime_seconds = 0;
  std::vector<std::string> diagnostics;

  //! Rows only; runtime and diagnostics are excluded.
  bool same_statistics(const McSummary& o) const
  {
    if (rows.size() != o.rows.size() || reps != o.reps || failed != o.failed)
      return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto &a = rows[i], &b = o.rows[i];
      if (a.x != b.x || a.theta != b.theta || a.mean != b.mean || a.var != b.var || a.mse != b.mse)
        return false;
    }
    return true;
  }
};

//! Ordered reduction of a run into per-point mean, variance and MSE.
inline McSummary
summarize(const Scenario& s, const McRun& run)
{
  McSummary out;
  out.dim = s.dim();
  out.failed = run.failed;
  out.reps = run.estimates.size();
  out.diagnostics = run.diagnostics;
  const auto signal = s.make_signal();
  const double R = static_cast<double>(out.reps);
  for (std::size_t p = 0; p < run.points; ++p) {
    McRow row;
    row.x.assign(s.points.begin() + p * s.dim(), s.points.begin() + (p + 1) * s.dim());
    row.theta = signal(row.x);
    for (const auto& e : run.estimates)
      row.mean += e[p];
    row.mean /= R;
    for (const auto& e : run.estimates) {
      const double d = e[p] - row.mean, err = e[p] - row.theta;
      row.var += d * d;
      row.mse += err * err;
    }
    row.var /= R;
    row.mse /= R;
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline McSummary
run_monte_carlo(const Scenario& s, std::size_t threads = 0)
{
  const auto t0 = std::chrono::steady_clock::now();
  auto out = summarize(s, simulate_estimates(s, threads));
  out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

} // namespace deconvo
