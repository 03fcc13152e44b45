#pragma once

#include "../core/design.hpp"
#include "../core/noise.hpp"
#include "../core/presets.hpp"
#include "../error.hpp"
#include "../util.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace deconvo {

inline nlohmann::json
to_json(const NoiseSpec& s)
{
  return { { "kind", s.id() }, { "sigma2", s.sigma2 }, { "q", s.q }, { "dim", s.dim }, { "beta", s.beta } };
}

inline NoiseSpec
noise_from_json(const nlohmann::json& j)
{
  const auto kind = j.at("kind").get<std::string>();
  const double s2 = j.at("sigma2").get<double>();
  if (kind == "iid")
    return NoiseSpec::iid(s2);
  const auto beta = j.at("beta").get<std::vector<double>>();
  if (kind == "ma-sequence")
    return NoiseSpec::ma_sequence(s2, beta);
  if (kind == "ma-lattice")
    return NoiseSpec::ma_lattice(s2, j.at("q").get<std::size_t>(), j.at("dim").get<std::size_t>(), beta);
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

inline nlohmann::json
to_json(const Design& d)
{
  nlohmann::json j{ { "kind", d.kind == DesignKind::fixed_grid ? "grid" : "random" },
                    { "n", d.n },
                    { "a_n", d.a_n },
                    { "dim", d.dim } };
  if (d.kind == DesignKind::random)
    j["density"] = d.density.id();
  return j;
}

inline Design
design_from_json(const nlohmann::json& j)
{
  const auto n = j.at("n").get<std::size_t>();
  const auto a = j.at("a_n").get<double>();
  const auto dim = j.at("dim").get<std::size_t>();
  if (j.at("kind") == "grid")
    return Design::fixed_grid(n, a, dim);
  return Design::random(n, a, dim, presets::density(j.at("density").get<std::string>()));
}

//! JSON sidecar next to a dataset CSV.
inline std::filesystem::path
sidecar_path(const std::filesystem::path& csv)
{
  auto p = csv;
  return p.replace_extension(".json");
}

//! CSV columns: k_1..k_d (grid designs only), x_1..x_d, response; plus a
//! JSON sidecar with design, noise and provenance.
inline void
write_dataset(const std::filesystem::path& csv, const Dataset& ds)
{
  ds.validate();
  std::ofstream out(csv);
  if (!out)
    throw IoError("cannot write " + csv.string());
  const std::size_t d = ds.design.dim;
  const bool grid = ds.design.kind == DesignKind::fixed_grid;
  std::string header;
  if (grid)
    for (std::size_t i = 1; i <= d; ++i)
      header += "k_" + std::to_string(i) + ",";
  for (std::size_t i = 1; i <= d; ++i)
    header += "x_" + std::to_string(i) + ",";
  out << header << "response\n";
  const LatticeIndex idx(ds.design.n, d);
  std::vector<std::size_t> offs;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (grid) {
      idx.offsets(k, offs);
      for (auto o : offs)
        out << static_cast<long long>(o) - static_cast<long long>(ds.design.n) << ',';
    }
    for (double x : ds.location(k))
      out << format_double(x) << ',';
    out << format_double(ds.responses[k]) << '\n';
  }
  if (!out)
    throw IoError("write failed for " + csv.string());

  nlohmann::json meta{ { "design", to_json(ds.design) },
                       { "provenance",
                         { { "signal", ds.provenance.signal },
                           { "kernel", ds.provenance.kernel },
                           { "noise", ds.provenance.noise },
                           { "seed", ds.provenance.seed } } } };
  if (ds.noise)
    meta["noise"] = to_json(*ds.noise);
  std::ofstream side(sidecar_path(csv));
  if (!side)
    throw IoError("cannot write " + sidecar_path(csv).string());
  side << meta.dump(2) << '\n';
}

inline Dataset
read_dataset(const std::filesystem::path& csv)
{
  std::ifstream side(sidecar_path(csv));
  if (!side)
    throw IoError("missing sidecar " + sidecar_path(csv).string());
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar: " + std::string(e.what()));
  }
  Dataset ds;
  ds.design = design_from_json(meta.at("design"));
  const auto& p = meta.at("provenance");
  ds.provenance = { p.at("signal"), p.at("kernel"), p.at("noise"), p.at("seed").get<std::uint64_t>() };
  if (meta.contains("noise"))
    ds.noise = noise_from_json(meta.at("noise"));

  std::ifstream in(csv);
  if (!in)
    throw IoError("cannot read " + csv.string());
  const std::size_t d = ds.design.dim;
  const std::size_t skip = ds.design.kind == DesignKind::fixed_grid ? d : 0;
  std::string line;
  std::getline(in, line);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    std::vector<double> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto end = line.find(',', start);
      if (end == std::string::npos)
        end = line.size();
      double v = 0;
      auto res = std::from_chars(line.data() + start, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end)
        throw IoError(csv.string() + ":" + std::to_string(row) + ": bad number");
      cells.push_back(v);
      start = end + 1;
    }
    if (cells.size() != skip + d + 1)
      throw IoError(csv.string() + ":" + std::to_string(row) + ": wrong column count");
    for (std::size_t i = 0; i < d; ++i)
      ds.locations.push_back(cells[skip + i]);
    ds.responses.push_back(cells.back());
  }
  try {
    ds.validate();
  } catch (const std::exception& e) {
    throw IoError(csv.string() + ": " + e.what());
  }
  return ds;
}

} // namespace deconvo
