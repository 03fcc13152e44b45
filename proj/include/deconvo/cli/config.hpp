#pragma once

#include "../core/presets.hpp"
#include "../error.hpp"
#include "../harness/scenario.hpp"
#include "../util.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace deconvo {

enum class Command
{
  estimate,
  simulate,
  mc_table,
  mise_scan,
  normality,
  misspec,
  field_export
};

inline std::string
to_string(Command c)
{
  switch (c) {
    case Command::estimate:
      return "estimate";
    case Command::simulate:
      return "simulate";
    case Command::mc_table:
      return "mc-table";
    case Command::mise_scan:
      return "mise-scan";
    case Command::normality:
      return "normality";
    case Command::misspec:
      return "misspec";
    case Command::field_export:
      return "field-export";
  }
  return {};
}

inline std::optional<Command>
parse_command(std::string_view s)
{
  for (auto c : { Command::estimate, Command::simulate, Command::mc_table, Command::mise_scan, Command::normality,
                  Command::misspec, Command::field_export })
    if (to_string(c) == s)
      return c;
  return std::nullopt;
}

enum class OutputFormat
{
  csv,
  json
};

//! Square evaluation grid [lo, hi]^2 with `count` points per side.
struct GridSpec
{
  double lo = -2.0;
  double hi = 2.0;
  std::size_t count = 41;

  bool operator==(const GridSpec&) const = default;
};

struct RunConfig
{
  Command command = Command::estimate;
  Scenario scenario;
  std::filesystem::path output;
  OutputFormat format = OutputFormat::csv;
  //! Dataset CSV for `estimate`; absent means one simulated replicate.
  std::optional<std::filesystem::path> input;
  GridSpec grid;
  std::vector<double> mise_h;
  double normality_scale = 1.0;

  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

inline std::string_view
trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view>
split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

template<class T>
T
number(std::string_view v, const std::string& key, std::size_t line)
{
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("type mismatch for " + key + ": expected " +
                        (std::is_floating_point_v<T> ? "a number" : "a nonnegative integer") + ", got '" +
                        std::string(v) + "'",
                      line);
  return out;
}

inline std::vector<double>
number_list(std::string_view v, const std::string& key, std::size_t line)
{
  std::vector<double> out;
  if (trim(v).empty())
    return out;
  for (auto part : split(v, ','))
    out.push_back(number<double>(part, key, line));
  return out;
}

inline bool
boolean(std::string_view v, const std::string& key, std::size_t line)
{
  if (v == "true")
    return true;
  if (v == "false")
    return false;
  throw ConfigError("type mismatch for " + key + ": expected true or false", line);
}

inline std::string
join(const std::vector<double>& v, const char* sep = ", ")
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? sep : "") + format_double(v[i]);
  return s;
}

//! Raw key/value pairs with their line numbers.
struct Entries
{
  std::map<std::string, std::pair<std::string, std::size_t>> values;

  bool has(const std::string& k) const { return values.count(k) > 0; }
  const std::string& get(const std::string& k) const { return values.at(k).first; }
  std::size_t line(const std::string& k) const { return has(k) ? values.at(k).second : 0; }
};

inline const std::set<std::string>&
known_keys()
{
  static const std::set<std::string> keys{
    "command",         "seed",           "reps",           "output",         "format",
    "input",           "signal",         "kernel",         "kernel.assumed", "design.type",
    "design.n",        "design.a_n",     "design.dim",     "design.density", "noise.type",
    "noise.sigma2",    "noise.q",        "noise.beta",     "estimator.kind", "estimator.h",
    "estimator.order", "estimator.imag_tolerance",         "estimator.fast_path",
    "estimator.partition",               "estimator.smoothing",              "points",
    "points.preset",   "grid.lo",        "grid.hi",        "grid.count",     "mise.h",
    "normality.scale",
  };
  return keys;
}

inline Partition
parse_partition(std::string_view v, std::size_t dim, std::size_t line)
{
  std::vector<std::vector<std::size_t>> blocks;
  for (auto block : split(v, ';')) {
    blocks.emplace_back();
    for (auto idx : split(block, ',')) {
      const auto i = number<std::size_t>(idx, "estimator.partition", line);
      if (i == 0)
        throw ConfigError("estimator.partition indices are 1-based", line);
      blocks.back().push_back(i - 1);
    }
  }
  try {
    return Partition(dim, std::move(blocks));
  } catch (const StructuralError& e) {
    throw ConfigError(std::string("estimator.partition: ") + e.what(), line);
  }
}

inline std::vector<double>
parse_points(std::string_view v, std::size_t dim, std::size_t line)
{
  std::vector<double> out;
  for (auto pt : split(v, ';')) {
    const auto coords = number_list(pt, "points", line);
    if (coords.size() != dim)
      throw ConfigError("each point needs " + std::to_string(dim) + " coordinates", line);
    out.insert(out.end(), coords.begin(), coords.end());
  }
  return out;
}

} // namespace config_detail

//! Parses the dotted key = value format. '#' starts a comment; blank lines
//! are ignored. Every error names the offending line.
//!
//!   command = mc-table
//!   signal = theta2
//!   kernel = laplace:3
//!   design.n = 50
//!   design.a_n = 0.25
//!   estimator.h = 0.36
//!
//! A `command` argument overrides the file's command key, which is then
//! optional.
inline RunConfig
parse_config(const std::string& text, std::optional<Command> command = std::nullopt)
{
  using namespace config_detail;
  Entries e;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    std::string_view s(raw);
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = trim(s);
    if (s.empty())
      continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value'", line);
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (!known_keys().count(key))
      throw ConfigError("unknown key " + key, line);
    if (e.has(key))
      throw ConfigError("duplicate key " + key + " (first set on line " + std::to_string(e.line(key)) + ")", line);
    e.values[key] = { value, line };
  }

  RunConfig c;
  auto require = [&](const std::string& k) {
    if (!e.has(k))
      throw ConfigError("missing required key " + k);
  };
  // wraps library validation errors with the line of the key
  auto guarded = [&](const std::string& k, auto&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(k + ": " + ex.what(), e.line(k));
    }
  };

  if (!command)
    require("command");
  if (e.has("command")) {
    const auto cmd = parse_command(e.get("command"));
    if (!cmd)
      throw ConfigError("unknown command '" + e.get("command") + "'", e.line("command"));
    c.command = *cmd;
  }
  if (command)
    c.command = *command;
  auto& s = c.scenario;

  if (e.has("seed"))
    s.seed = number<std::uint64_t>(e.get("seed"), "seed", e.line("seed"));
  s.reps = e.has("reps") ? number<std::size_t>(e.get("reps"), "reps", e.line("reps")) : 200;
  if (s.reps < 1)
    throw ConfigError("reps must be at least 1", e.line("reps"));
  c.output = e.has("output") ? e.get("output") : "deconvo_" + to_string(c.command) + ".csv";
  if (e.has("format")) {
    const auto& f = e.get("format");
    if (f != "csv" && f != "json")
      throw ConfigError("format must be csv or json", e.line("format"));
    c.format = f == "csv" ? OutputFormat::csv : OutputFormat::json;
  }
  if (e.has("input"))
    c.input = e.get("input");

  s.signal = e.has("signal") ? e.get("signal") : "theta1";
  guarded("signal", [&] { return presets::signal(s.signal); });

  // design
  require("design.n");
  require("design.a_n");
  const std::string type = e.has("design.type") ? e.get("design.type") : "grid";
  if (type != "grid" && type != "random")
    throw ConfigError("design.type must be grid or random", e.line("design.type"));
  const auto n = number<std::size_t>(e.get("design.n"), "design.n", e.line("design.n"));
  const auto a = number<double>(e.get("design.a_n"), "design.a_n", e.line("design.a_n"));
  const auto dim = e.has("design.dim") ? number<std::size_t>(e.get("design.dim"), "design.dim", e.line("design.dim")) : 2;
  if (type == "grid") {
    if (e.has("design.density"))
      throw ConfigError("design.density applies to random designs only", e.line("design.density"));
    s.design = Design::fixed_grid(n, a, dim);
  } else {
    const auto f = guarded("design.density", [&] { return presets::density(e.has("design.density") ? e.get("design.density") : "uniform"); });
    s.design = Design::random(n, a, dim, f);
  }
  guarded("design.n", [&] { s.design.validate(); return 0; });
  if (const auto sd = presets::signal(s.signal).dim(); sd != dim)
    throw ConfigError("signal " + s.signal + " is " + std::to_string(sd) + "-dimensional but design.dim is " +
                        std::to_string(dim),
                      e.line("design.dim"));

  s.true_kernel = e.has("kernel") ? e.get("kernel") : "laplace:3";
  guarded("kernel", [&] { return presets::kernel(s.true_kernel, dim); });
  if (e.has("kernel.assumed")) {
    s.assumed_kernel = e.get("kernel.assumed");
    guarded("kernel.assumed", [&] { return presets::kernel(*s.assumed_kernel, dim); });
  }
  const std::string fit_key = s.assumed_kernel ? "kernel.assumed" : "kernel";
  if (c.command != Command::simulate && !presets::kernel(e.has(fit_key) ? e.get(fit_key) : s.true_kernel, dim).has_symmetric_transform())
    throw ConfigError(fit_key + " has a complex transform and cannot be used for estimation", e.line(fit_key));

  // noise
  const std::string noise = e.has("noise.type") ? e.get("noise.type") : "iid";
  const double sigma2 = e.has("noise.sigma2") ? number<double>(e.get("noise.sigma2"), "noise.sigma2", e.line("noise.sigma2")) : 0.25;
  const auto beta = e.has("noise.beta") ? number_list(e.get("noise.beta"), "noise.beta", e.line("noise.beta")) : std::vector<double>{};
  const std::size_t q = e.has("noise.q") ? number<std::size_t>(e.get("noise.q"), "noise.q", e.line("noise.q")) : 0;
  guarded("noise.type", [&] {
    if (noise == "iid")
      s.noise = NoiseSpec::iid(sigma2);
    else if (noise == "ma-sequence") {
      s.noise = NoiseSpec::ma_sequence(sigma2, beta);
      if (e.has("noise.q") && q != beta.size())
        throw StructuralError("noise.q does not match the number of coefficients");
    } else if (noise == "ma-lattice")
      s.noise = NoiseSpec::ma_lattice(sigma2, q, dim, beta);
    else
      throw std::invalid_argument("noise.type must be iid, ma-sequence or ma-lattice");
    s.noise.validate();
    return 0;
  });

  // estimator
  s.kind = type == "grid" ? EstimatorKind::fd_additive : EstimatorKind::rd;
  if (e.has("estimator.kind"))
    s.kind = guarded("estimator.kind", [&] { return parse_estimator_kind(e.get("estimator.kind")); });
  if (is_fixed_design(s.kind) != (type == "grid"))
    throw ConfigError("estimator " + to_string(s.kind) + " does not match design.type " + type,
                      e.line("estimator.kind"));
  const bool needs_h = c.command != Command::simulate && c.command != Command::mise_scan;
  if (needs_h)
    require("estimator.h");
  if (e.has("estimator.h"))
    s.config.h = number<double>(e.get("estimator.h"), "estimator.h", e.line("estimator.h"));
  else
    s.config.h = 1.0;
  if (!(s.config.h > 0))
    throw ConfigError("estimator.h must be positive", e.line("estimator.h"));
  if (e.has("estimator.order"))
    s.config.order = number<std::size_t>(e.get("estimator.order"), "estimator.order", e.line("estimator.order"));
  if (e.has("estimator.imag_tolerance"))
    s.config.imag_tolerance =
      number<double>(e.get("estimator.imag_tolerance"), "estimator.imag_tolerance", e.line("estimator.imag_tolerance"));
  if (e.has("estimator.fast_path"))
    s.config.fast_path = boolean(e.get("estimator.fast_path"), "estimator.fast_path", e.line("estimator.fast_path"));
  s.config.K = SmoothingKernel::sinc(dim);
  if (e.has("estimator.smoothing")) {
    const auto& v = e.get("estimator.smoothing");
    if (v.rfind("table:", 0) == 0)
      s.config.K = guarded("estimator.smoothing", [&] {
        return SmoothingKernel::table(dim, number_list(std::string_view(v).substr(6), "estimator.smoothing", e.line("estimator.smoothing")));
      });
    else if (v != "sinc")
      throw ConfigError("estimator.smoothing must be sinc or table:<values>", e.line("estimator.smoothing"));
  }
  if (e.has("estimator.partition"))
    s.config.partition = parse_partition(e.get("estimator.partition"), dim, e.line("estimator.partition"));
  else if (is_additive(s.kind))
    s.config.partition = Partition::singletons(dim);

  // evaluation points
  if (e.has("points") && e.has("points.preset"))
    throw ConfigError("give either points or points.preset", e.line("points.preset"));
  if (e.has("points"))
    s.points = parse_points(e.get("points"), dim, e.line("points"));
  else {
    const std::string preset = e.has("points.preset") ? e.get("points.preset") : "probe4";
    if (dim != 2)
      throw ConfigError("point presets are two-dimensional; give points explicitly", e.line("points.preset"));
    if (preset == "grid25")
      s.points = points::grid25();
    else if (preset == "probe4")
      s.points = points::probe4();
    else
      throw ConfigError("points.preset must be grid25 or probe4", e.line("points.preset"));
  }

  if (e.has("grid.lo"))
    c.grid.lo = number<double>(e.get("grid.lo"), "grid.lo", e.line("grid.lo"));
  if (e.has("grid.hi"))
    c.grid.hi = number<double>(e.get("grid.hi"), "grid.hi", e.line("grid.hi"));
  if (e.has("grid.count"))
    c.grid.count = number<std::size_t>(e.get("grid.count"), "grid.count", e.line("grid.count"));
  if (!(c.grid.hi > c.grid.lo) || c.grid.count < 1)
    throw ConfigError("grid needs lo < hi and count >= 1", e.line("grid.count"));

  if (c.command == Command::mise_scan)
    require("mise.h");
  if (e.has("mise.h")) {
    c.mise_h = number_list(e.get("mise.h"), "mise.h", e.line("mise.h"));
    if (c.mise_h.empty())
      throw ConfigError("mise.h needs at least one bandwidth", e.line("mise.h"));
    for (std::size_t i = 0; i < c.mise_h.size(); ++i)
      if (!(c.mise_h[i] > 0) || (i && !(c.mise_h[i] > c.mise_h[i - 1])))
        throw ConfigError("mise.h must be positive and ascending", e.line("mise.h"));
  }
  if (e.has("normality.scale"))
    c.normality_scale = number<double>(e.get("normality.scale"), "normality.scale", e.line("normality.scale"));

  if (c.command == Command::estimate && c.input && !std::filesystem::exists(*c.input))
    throw ConfigError("input dataset " + c.input->string() + " does not exist", e.line("input"));
  if (c.command != Command::simulate)
    guarded("estimator.kind", [&] { s.validate(); return 0; });
  return c;
}

inline RunConfig
parse_config_file(const std::filesystem::path& path, std::optional<Command> command = std::nullopt)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

//! Full explicit form of a configuration; parse_config(serialize(c)) == c.
inline std::string
serialize(const RunConfig& c)
{
  using config_detail::join;
  const auto& s = c.scenario;
  std::ostringstream o;
  o << "command = " << to_string(c.command) << '\n'
    << "seed = " << s.seed << '\n'
    << "reps = " << s.reps << '\n'
    << "output = " << c.output.string() << '\n'
    << "format = " << (c.format == OutputFormat::csv ? "csv" : "json") << '\n';
  if (c.input)
    o << "input = " << c.input->string() << '\n';
  o << "signal = " << s.signal << '\n' << "kernel = " << s.true_kernel << '\n';
  if (s.assumed_kernel)
    o << "kernel.assumed = " << *s.assumed_kernel << '\n';
  o << "design.type = " << (s.design.kind == DesignKind::fixed_grid ? "grid" : "random") << '\n'
    << "design.n = " << s.design.n << '\n'
    << "design.a_n = " << format_double(s.design.a_n) << '\n'
    << "design.dim = " << s.design.dim << '\n';
  if (s.design.kind == DesignKind::random)
    o << "design.density = " << s.design.density.id() << '\n';
  o << "noise.type = " << s.noise.id() << '\n' << "noise.sigma2 = " << format_double(s.noise.sigma2) << '\n';
  if (s.noise.kind != NoiseKind::iid)
    o << "noise.q = " << s.noise.q << '\n' << "noise.beta = " << join(s.noise.beta) << '\n';
  o << "estimator.kind = " << to_string(s.kind) << '\n'
    << "estimator.h = " << format_double(s.config.h) << '\n'
    << "estimator.order = " << s.config.order << '\n'
    << "estimator.imag_tolerance = " << format_double(s.config.imag_tolerance) << '\n'
    << "estimator.fast_path = " << (s.config.fast_path ? "true" : "false") << '\n'
    << "estimator.smoothing = " << (s.config.K.is_sinc() ? "sinc" : "table:" + join(s.config.K.profile(), ",")) << '\n';
  if (s.config.partition)
    o << "estimator.partition = " << s.config.partition->to_string() << '\n';
  o << "points = ";
  for (std::size_t p = 0; p < s.point_count(); ++p) {
    o << (p ? "; " : "");
    o << join(std::vector<double>(s.points.begin() + p * s.dim(), s.points.begin() + (p + 1) * s.dim()));
  }
  o << '\n'
    << "grid.lo = " << format_double(c.grid.lo) << '\n'
    << "grid.hi = " << format_double(c.grid.hi) << '\n'
    << "grid.count = " << c.grid.count << '\n';
  if (!c.mise_h.empty())
    o << "mise.h = " << join(c.mise_h) << '\n';
  o << "normality.scale = " << format_double(c.normality_scale) << '\n';
  return o.str();
}

} // namespace deconvo
