#include "CLI11.hpp"

#include <deconvo/cli/execute.hpp>

#include <cstdio>
#include <iostream>

namespace {

int
run(int argc, char** argv)
{
  CLI::App app{ "Deconvolution estimators for additive inverse regression" };
  app.set_version_flag("--version", std::string(deconvo::version));

  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
  app.add_option("command", command, "estimate, simulate, mc-table, mise-scan, normality, misspec, field-export")
    ->required();
  app.add_option("config", config_path, "key = value configuration file")->required();
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--reps", reps, "override the replicate count");
  app.add_option("--out", out, "override the output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? deconvo::exit_ok : deconvo::exit_config;
  }

  const auto cmd = deconvo::parse_command(command);
  if (!cmd)
    throw deconvo::ConfigError("unknown command '" + command + "'");
  auto cfg = deconvo::parse_config_file(config_path, cmd);
  if (seed)
    cfg.scenario.seed = *seed;
  if (reps) {
    if (*reps < 1)
      throw deconvo::ConfigError("--reps must be at least 1");
    cfg.scenario.reps = *reps;
  }
  if (out)
    cfg.output = *out;

  const auto files = deconvo::execute(cfg);
  for (const auto& f : files)
    std::cout << f.string() << '\n';
  return deconvo::exit_ok;
}

} // namespace

int
main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const deconvo::ConfigError& e) {
    std::cerr << "deconvo: config error: " << e.what() << '\n';
    return deconvo::exit_config;
  } catch (const deconvo::IoError& e) {
    std::cerr << "deconvo: I/O error: " << e.what() << '\n';
    return deconvo::exit_io;
  } catch (const deconvo::NumericalError& e) {
    std::cerr << "deconvo: numerical error: " << e.what() << '\n';
    return deconvo::exit_numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "deconvo: invalid input: " << e.what() << '\n';
    return deconvo::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "deconvo: " << e.what() << '\n';
    return deconvo::exit_other;
  }
}
