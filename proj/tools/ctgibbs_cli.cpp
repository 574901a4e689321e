#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ctgibbs/commands.hpp"
#include "ctgibbs/config.hpp"
#include "ctgibbs/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

ctgibbs::Json read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctgibbs::ArgumentError("--config: cannot open " + path);
  try {
    return ctgibbs::Json::parse(in);
  } catch (const ctgibbs::Json::parse_error& e) {
    throw ctgibbs::ArgumentError("--config: " + path + " is not valid JSON (" + e.what() + ")");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time Gibbs chains on cylinder truncations: Perron solves, entropy, rate functions, simulation"};
  std::string command, config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("command", command, "solve | gibbs | entropy | pressure-audit | rate | simulate | mc | anneal | validate")
      ->required()
      ->check(CLI::IsMember(ctgibbs::command_names()));
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--quiet", quiet, "suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other parse problem is a usage error.
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    ctgibbs::Json doc = read_config(config_path);
    if (seed && doc.is_object()) doc["seed"] = *seed;
    if (command == "validate") {
      ctgibbs::Json out = ctgibbs::Json::array();
      bool errors = false;
      for (const auto& d : ctgibbs::validate(doc)) {
        out.push_back(ctgibbs::to_json(d));
        errors = errors || d.severity == ctgibbs::Severity::error;
      }
      std::cout << out.dump(2) << "\n";
      return errors ? kUsage : kOk;
    }
    if (!quiet)
      for (const auto& d : ctgibbs::validate(doc))
        if (d.severity == ctgibbs::Severity::warning) std::cerr << "warning: " << d.path << ": " << d.message << "\n";
    const ctgibbs::ExperimentConfig cfg = ctgibbs::parse_config(doc);
    for (const auto& path : ctgibbs::run(command, cfg, out_dir))
      if (!quiet) std::cerr << "wrote " << path.string() << "\n";
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ctgibbs::NumericError& e) {
    std::cerr << command << ": numeric failure: " << e.what() << "\n";
    return kFailure;
  } catch (const ctgibbs::PropertyFailure& e) {
    std::cerr << command << ": property check failed: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kFailure;
  }
}
