#pragma once

#include "../estimators/estimate.hpp"
#include "../harness/io.hpp"
#include "../harness/monte_carlo.hpp"
#include "../harness/studies.hpp"
#include "../synth/dataset_io.hpp"
#include "config.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace deconvo {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int
{
  exit_ok = 0,
  exit_other = 1,
  exit_config = 2,
  exit_numerical = 3,
  exit_io = 4
};

//! `<output>.manifest.json`, next to the primary artifact.
inline std::filesystem::path
manifest_path(const std::filesystem::path& output)
{
  auto p = output;
  p += ".manifest.json";
  return p;
}

inline std::filesystem::path
with_suffix(const std::filesystem::path& p, const std::string& suffix)
{
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

namespace execute_detail {

inline nlohmann::json
summary_json(const McSummary& s)
{
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows)
    rows.push_back({ { "x", r.x }, { "theta_true", r.theta }, { "mean", r.mean }, { "var", r.var }, { "mse", r.mse } });
  return { { "reps", s.reps }, { "failed", s.failed }, { "rows", rows } };
}

inline nlohmann::json
field_json(const EstimateField& f)
{
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = f.point(i);
    nlohmann::json row{ { "x", std::vector<double>(p.begin(), p.end()) }, { "estimate", f.estimates[i] } };
    if (f.variances)
      row["predicted_var"] = (*f.variances)[i];
    rows.push_back(std::move(row));
  }
  return { { "estimator", to_string(f.kind) }, { "config", to_json(f.config) }, { "rows", rows } };
}

inline void
write_field_as(const RunConfig& c, const std::filesystem::path& path, const EstimateField& f)
{
  if (c.format == OutputFormat::csv)
    write_field(path, f);
  else
    write_json(path, field_json(f));
}

//! The supplied dataset, or replicate 0 of the scenario.
inline Dataset
dataset_for(const RunConfig& c)
{
  if (c.input) {
    auto ds = read_dataset(*c.input);
    if (ds.design.dim != c.scenario.dim())
      throw ConfigError("input dataset dimension " + std::to_string(ds.design.dim) +
                        " does not match design.dim " + std::to_string(c.scenario.dim()));
    if (is_fixed_design(c.scenario.kind) != (ds.design.kind == DesignKind::fixed_grid))
      throw ConfigError("estimator " + to_string(c.scenario.kind) + " does not match the input dataset design");
    return ds;
  }
  return ReplicateSampler(c.scenario)(0);
}

inline EstimatorConfig
config_for(const RunConfig& c, const Dataset& ds)
{
  auto cfg = c.scenario.estimator_config();
  cfg.a_n = ds.design.a_n;
  return cfg;
}

} // namespace execute_detail

//! Runs one command, writes its artifacts and a manifest, and returns the
//! list of files written (manifest last).
inline std::vector<std::filesystem::path>
execute(const RunConfig& c, std::size_t threads = 0)
{
  using namespace execute_detail;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& s = c.scenario;
  std::vector<std::filesystem::path> written{ c.output };
  nlohmann::json result;

  if (!c.output.parent_path().empty() && !std::filesystem::is_directory(c.output.parent_path()))
    throw IoError("output directory " + c.output.parent_path().string() + " does not exist");

  switch (c.command) {
    case Command::estimate: {
      const auto ds = dataset_for(c);
      const auto field = estimate_field(ds, config_for(c, ds), s.kind, s.points, true);
      write_field_as(c, c.output, field);
      if (c.format == OutputFormat::csv)
        written.push_back(sidecar_path(c.output));
      result["points"] = field.size();
      break;
    }
    case Command::simulate: {
      write_dataset(c.output, ReplicateSampler(s)(0));
      written.push_back(sidecar_path(c.output));
      break;
    }
    case Command::mc_table: {
      const auto summary = run_monte_carlo(s, threads);
      if (c.format == OutputFormat::csv)
        write_summary_csv(c.output, summary);
      else
        write_json(c.output, summary_json(summary));
      result = { { "rows", summary.rows.size() }, { "failed", summary.failed } };
      break;
    }
    case Command::mise_scan: {
      const auto grid = square_grid(c.grid.lo, c.grid.hi, c.grid.count);
      const auto table = mise_scan(s, c.mise_h, grid, threads);
      if (c.format == OutputFormat::csv)
        write_mise_csv(c.output, table);
      else
        write_json(c.output, { { "h", table.h }, { "mise", table.mise }, { "argmin", table.argmin() } });
      result["argmin"] = table.argmin();
      break;
    }
    case Command::normality: {
      const auto report = normality_diagnostics(s, c.normality_scale, {}, threads);
      write_json(c.output, report.to_json());
      result["pass"] = report.pass();
      break;
    }
    case Command::misspec: {
      const auto grid = square_grid(c.grid.lo, c.grid.hi, c.grid.count);
      const auto run = misspecification_run(s, grid);
      write_field_as(c, c.output, run.misspecified);
      if (c.format == OutputFormat::csv)
        written.push_back(sidecar_path(c.output));
      if (run.true_fit) {
        const auto other = with_suffix(c.output, "_true");
        write_field_as(c, other, *run.true_fit);
        written.push_back(other);
        if (c.format == OutputFormat::csv)
          written.push_back(sidecar_path(other));
      }
      result["true_fit"] = run.true_fit.has_value();
      break;
    }
    case Command::field_export: {
      const auto ds = dataset_for(c);
      const auto grid = square_grid(c.grid.lo, c.grid.hi, c.grid.count);
      const auto field = estimate_field(ds, config_for(c, ds), s.kind, grid);
      write_field_as(c, c.output, field);
      if (c.format == OutputFormat::csv)
        written.push_back(sidecar_path(c.output));
      result["points"] = field.size();
      break;
    }
  }

  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<std::string> files;
  for (const auto& p : written)
    files.push_back(p.string());
  const auto manifest = manifest_path(c.output);
  write_json(manifest,
             { { "command", to_string(c.command) },
               { "seed", s.seed },
               { "config", serialize(c) },
               { "scenario", to_json(s) },
               { "version", version },
               { "compiler", __VERSION__ },
               { "runtime_seconds", runtime },
               { "outputs", files },
               { "result", result } });
  written.push_back(manifest);
  return written;
}

} // namespace deconvo
