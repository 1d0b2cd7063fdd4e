// Command-line driver: one subcommand per experiment.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "burstmap/config.hpp"
#include "burstmap/experiments.hpp"
#include "burstmap/parallel.hpp"

int main(int argc, char** argv) {
  using namespace burstmap;
  CLI::App app{"Kick-map analysis of pulsatile inputs to elliptic bursters"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, preset;
  std::uint64_t seed = 0;
  int threads = -1;
  std::string options_json;
  app.add_option("--config", config_path, "JSON config or run manifest");
  app.add_option("--seed", seed, "64-bit master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--preset", preset, "model preset")->check(CLI::IsMember({"b0", "b05"}));
  app.add_option("--threads", threads, "worker threads (0: BURSTMAP_THREADS or hardware)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--options", options_json, "experiment options as a JSON object");
  app.fallthrough();
  for (const auto& name : experiment_names()) app.add_subcommand(name, "run " + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!options_json.empty()) {
      const json extra = json::parse(options_json);
      if (!extra.is_object()) throw ConfigError("--options must be a JSON object");
      for (const auto& [k, v] : extra.items()) cfg.options[k] = v;
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  if (!cfg.experiment.empty() && cfg.experiment != sub) {
    std::cerr << "config error: config is for '" << cfg.experiment << "', not '" << sub << "'\n";
    return 2;
  }
  cfg.experiment = sub;
  if (app.count("--seed")) cfg.seed = seed;
  if (app.count("--out")) cfg.out = out_dir;
  if (app.count("--preset")) {
    cfg.preset = preset;
    cfg.params.reset();
  }
  if (threads >= 0) cfg.threads = threads;
  return run(cfg, std::cerr);
}
