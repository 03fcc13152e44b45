#pragma once

#include "../core/config.hpp"
#include "normalizers.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

namespace deconvo {

enum class LadderParameter
{
  n,
  h,
  a_n
};

inline std::string
to_string(LadderParameter p)
{
  switch (p) {
    case LadderParameter::n:
      return "n";
    case LadderParameter::h:
      return "h";
    case LadderParameter::a_n:
      return "a_n";
  }
  return {};
}

inline double
ladder_value(const NormalizerRequest& r, LadderParameter p)
{
  switch (p) {
    case LadderParameter::n:
      return static_cast<double>(r.design.n);
    case LadderParameter::h:
      return r.config.h;
    case LadderParameter::a_n:
      return r.design.a_n;
  }
  return 0.0;
}

//! Exponent e in normalizer^{-1/2} ~ parameter^e under the uniform or
//! fixed design, from the supplied rate parameters (beta is the ill-posedness
//! degree of the full d-dimensional psi and splits evenly over the axes).
//!
//! V1: n^{1/2} h^{d/2+beta} a^{d/2}. Additive forms use the slowest block;
//! with gamma_j supplied, V2 in h follows h^{beta_j - gamma_j/2} per block
//! through the marginal-integration gain.
inline double
predicted_exponent(NormalizerKind kind,
                   LadderParameter param,
                   const RateParameters& rates,
                   std::size_t d,
                   const Partition* partition = nullptr,
                   std::size_t block = 0)
{
  rates.validate();
  const double dd = static_cast<double>(d);
  auto block_beta = [&](std::size_t j) { return rates.beta * static_cast<double>(partition->block_dim(j)) / dd; };
  const auto base = iid_counterpart(kind);
  if (base == NormalizerKind::V1) {
    switch (param) {
      case LadderParameter::n:
        return 0.5;
      case LadderParameter::h:
        return dd / 2 + rates.beta;
      case LadderParameter::a_n:
        return dd / 2;
    }
  }
  if (!partition)
    throw StructuralError(to_string(kind) + " rate needs a partition");
  // slowest block: largest d_j + 2 beta_j
  std::size_t star = block;
  if (base != NormalizerKind::V2 && base != NormalizerKind::U_nj) {
    star = 0;
    for (std::size_t j = 1; j < partition->size(); ++j)
      if (partition->block_dim(j) + 2 * block_beta(j) > partition->block_dim(star) + 2 * block_beta(star))
        star = j;
  }
  const double dj = static_cast<double>(partition->block_dim(star));
  const bool fixed = base == NormalizerKind::U_n || base == NormalizerKind::U_nj;
  switch (param) {
    case LadderParameter::n:
      return fixed ? dd / 2 : 0.5;
    case LadderParameter::h:
      if (!rates.gamma.empty()) {
        if (rates.gamma.size() != partition->size())
          throw StructuralError("one gamma_j per block is required");
        return block_beta(star) + (dj - rates.gamma[star]) / 2;
      }
      return dj / 2 + block_beta(star);
    case LadderParameter::a_n:
      return dj / 2;
  }
  return 0.0;
}

struct RateReport
{
  NormalizerKind kind;
  LadderParameter parameter;
  std::vector<double> values;
  std::vector<double> normalizers;
  double predicted_exponent = 0;
  double slope = 0;
  double bracket = 0.15;

  bool within_bracket() const { return std::abs(slope - predicted_exponent) <= bracket; }

  nlohmann::json to_json() const
  {
    return { { "kind", to_string(kind) },
             { "parameter", to_string(parameter) },
             { "values", values },
             { "normalizers", normalizers },
             { "predicted_exponent", predicted_exponent },
             { "fitted_slope", slope },
             { "bracket", bracket },
             { "verdict", within_bracket() ? "within bracket" : "outside bracket" } };
  }
};

//! Least-squares slope of log y against log x.
inline double
loglog_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs matching series of length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw NumericalError("log-log fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0))
    throw std::invalid_argument("degenerate ladder: the parameter does not vary");
  return sxy / sxx;
}

//! Evaluates the normalizer along a ladder of at least four requests that
//! differ in one parameter and fits the slope of log(normalizer^{-1/2}).
inline RateReport
rate_diagnostics(std::span<const NormalizerRequest> ladder,
                 LadderParameter parameter,
                 double predicted,
                 double bracket = 0.15)
{
  if (ladder.size() < 4)
    throw std::invalid_argument("rate ladder needs at least 4 configurations");
  RateReport rep{ ladder.front().kind, parameter, {}, {}, predicted, 0.0, bracket };
  std::vector<std::future<double>> jobs;
  for (const auto& r : ladder) {
    if (r.kind != rep.kind)
      throw StructuralError("rate ladder mixes normalizer kinds");
    rep.values.push_back(ladder_value(r, parameter));
    jobs.push_back(std::async(std::launch::async, [&r] {
      return is_ma_kind(r.kind) ? normalizer_ma(r) : normalizer_iid(r);
    }));
  }
  std::vector<double> inv;
  for (auto& j : jobs) {
    rep.normalizers.push_back(j.get());
    inv.push_back(1.0 / std::sqrt(rep.normalizers.back()));
  }
  rep.slope = loglog_slope(rep.values, inv);
  return rep;
}

} // namespace deconvo
