#pragma once

#include "../error.hpp"
#include "../util.hpp"
#include "monte_carlo.hpp"
#include "studies.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace deconvo {

//! Columns x_1..x_d, theta_true, mean, var, mse.
inline void
write_summary_csv(const std::filesystem::path& path, const McSummary& s)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  for (std::size_t i = 1; i <= s.dim; ++i)
    out << "x_" << i << ',';
  out << "theta_true,mean,var,mse\n";
  for (const auto& r : s.rows) {
    for (double x : r.x)
      out << format_double(x) << ',';
    out << format_double(r.theta) << ',' << format_double(r.mean) << ',' << format_double(r.var) << ','
        << format_double(r.mse) << '\n';
  }
  if (!out)
    throw IoError("write failed for " + path.string());
}

inline void
write_mise_csv(const std::filesystem::path& path, const MiseTable& t)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << "h,mise\n";
  for (std::size_t i = 0; i < t.h.size(); ++i)
    out << format_double(t.h[i]) << ',' << format_double(t.mise[i]) << '\n';
  if (!out)
    throw IoError("write failed for " + path.string());
}

inline void
write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out)
    throw IoError("write failed for " + path.string());
}

} // namespace deconvo
