#include "isodeform/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace isodeform;

namespace {

// --samples N sets the main sample count of the subcommand being run.
void apply_samples(RunConfig& config, const std::string& command, std::int64_t n) {
  if (command == "gen") config.samples.metric_csv = static_cast<int>(n);
  else if (command == "deform") config.samples.certify_restarts = static_cast<int>(n);
  else if (command == "verify") config.samples.suite = config.samples.fiber = static_cast<int>(n);
  else if (command == "invariants") config.samples.volume = config.samples.scalar = n;
  else if (command == "curvature") config.samples.scan_points = static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isospectral deformations of metrics on balls and spheres"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::int64_t> samples;
  std::optional<int> m, k, steps;
  std::optional<double> h;
  std::vector<std::string> tols;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "64-bit base seed");
  app.add_option("--out", out, "output directory (default: out)");
  app.add_option("--samples", samples, "main sample count of the subcommand")->check(CLI::PositiveNumber);
  app.add_option("--tol", tols, "tolerance override NAME=VAL (repeatable)");
  app.add_option("-m", m, "dimension of the x factor");
  app.add_option("-k", k, "torus rank");
  app.add_option("--steps", steps, "family steps");
  app.add_option("--step-size", h, "family step size");

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"gen", "draw a generic j-map and write jmap.json"},
      {"deform", "build a certified isospectral family"},
      {"verify", "run the hypothesis suite and non-isometry evidence"},
      {"invariants", "compare volume and total scalar curvature"},
      {"curvature", "sectional curvature scans of scaled maps"},
      {"report", "collect stage verdicts"}};
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    if (!config_path.empty()) config.merge(read_json_file(config_path));
    if (seed) config.seed = *seed;
    if (out) config.out_dir = *out;
    if (m) config.m = *m;
    if (k) config.k = *k;
    if (steps) config.steps = *steps;
    if (h) config.h = *h;
    if (samples) apply_samples(config, command, *samples);
    for (const std::string& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--tol expects NAME=VAL, got '" + t + "'");
      config.tol.set(t.substr(0, eq), std::stod(t.substr(eq + 1)));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }

  return run_command(command, config, std::cout, std::cerr);
}
