#pragma once

#include "../error.hpp"
#include "config.hpp"
#include "design.hpp"
#include "kernels.hpp"
#include "signal.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace deconvo {

enum class CheckStatus
{
  satisfied,
  unchecked,
  violated
};

inline const char*
to_string(CheckStatus s)
{
  switch (s) {
    case CheckStatus::satisfied:
      return "satisfied";
    case CheckStatus::unchecked:
      return "unchecked";
    case CheckStatus::violated:
      return "violated";
  }
  return "";
}

struct AssumptionCheck
{
  std::string name;
  CheckStatus status;
  std::string detail;
};

struct ValidationReport
{
  std::vector<AssumptionCheck> checks;

  bool ok() const
  {
    for (const auto& c : checks)
      if (c.status == CheckStatus::violated)
        return false;
    return true;
  }

  const AssumptionCheck* find(const std::string& name) const
  {
    for (const auto& c : checks)
      if (c.name == name)
        return &c;
    return nullptr;
  }
};

//! Diagnostic check of a scenario against the estimator's assumptions.
//! Dimension mismatches throw; everything else is reported.
inline ValidationReport
validate_scenario(const AdditiveSignal& signal,
                  const ConvolutionKernel& kernel,
                  const SmoothingKernel& K,
                  const Design& design,
                  const EstimatorConfig& config)
{
  const std::size_t d = kernel.dim();
  auto mismatch = [&](const char* what, std::size_t got) {
    if (got != d)
      throw StructuralError(std::string(what) + " has dimension " + std::to_string(got) +
                            ", kernel has " + std::to_string(d));
  };
  mismatch("signal", signal.dim());
  mismatch("smoothing kernel", K.dim());
  mismatch("design", design.dim);
  if (config.partition)
    mismatch("partition", config.partition->dim());

  ValidationReport report;
  auto add = [&](std::string name, CheckStatus s, std::string detail) {
    report.checks.push_back({ std::move(name), s, std::move(detail) });
  };

  // ill-posedness: real, even, non-vanishing transform on the frequency window
  {
    std::vector<double> w(d, 1.0);
    const auto at_one = kernel.transform(w);
    if (!kernel.has_symmetric_transform() || std::abs(at_one.imag()) > 1e-12) {
      add("ill-posedness",
          CheckStatus::violated,
          "non-symmetric transform: Im Phi_psi(1) = " + format_double(at_one.imag()));
    } else {
      bool vanishes = false;
      const double top = config.h > 0 ? 1.0 / config.h : 1.0;
      for (std::size_t axis = 0; axis < d; ++axis)
        if (std::abs(kernel.axis_transform(axis, top)) < 1e-14)
          vanishes = true;
      add("ill-posedness",
          vanishes ? CheckStatus::violated : CheckStatus::satisfied,
          vanishes ? "Phi_psi vanishes inside the frequency window"
                   : "real, even, positive transform");
    }
  }

  {
    bool ok = K.flat_radius() > 0;
    for (double p : K.profile())
      ok = ok && std::abs(p) <= 1.0;
    add("smoothing kernel",
        ok ? CheckStatus::satisfied : CheckStatus::violated,
        ok ? "Phi_K supported on the cube, flat near 0, bounded by 1"
           : "Phi_K must equal 1 near the origin and stay within [-1, 1]");
  }

  add("smoothness", CheckStatus::unchecked, "signal regularity is not decidable numerically");

  if (design.kind == DesignKind::random) {
    const double level = design.density.truncation_level(d, design.a_n);
    add("design density",
        level > 0 ? CheckStatus::satisfied : CheckStatus::violated,
        "f(1/a_n) = " + format_double(level));
  } else {
    add("design density", CheckStatus::satisfied, "fixed grid");
  }

  if (config.partition) {
    const auto& p = *config.partition;
    bool compatible = true;
    for (const auto& c : signal.components()) {
      const auto block = p.block_of(c.axes.front());
      for (auto a : c.axes)
        compatible = compatible && p.block_of(a) == block;
    }
    add("additive structure",
        compatible ? CheckStatus::satisfied : CheckStatus::violated,
        compatible ? "signal components lie within partition blocks"
                   : "a signal component spans several partition blocks");
  }

  add("rate conditions", CheckStatus::unchecked, "asymptotic in n, h, a_n; unchecked at finite n");

  bool config_ok = true;
  std::string why;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    config_ok = false;
    why = e.what();
  }
  add("configuration", config_ok ? CheckStatus::satisfied : CheckStatus::violated, why);

  return report;
}

} // namespace deconvo
