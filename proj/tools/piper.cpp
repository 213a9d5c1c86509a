// piper: experiment runner for the piedpiper simulator.
//
//   piper run --config exp.cfg [--seed N] [--scenario S] [--threshold T] [--out DIR]
//   piper replay --manifest out/manifest.txt
//
// Exit codes: 0 success, 2 configuration error, 3 digest mismatch on
// replay, 1 anything else. PIPER_SEED (env) seeds the run with the lowest
// precedence: defaults < PIPER_SEED < config file < --seed.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "piedpiper/piedpiper.h"

namespace {

int exit_code(pp_status status) {
  switch (status) {
    case PP_OK: return 0;
    case PP_ERROR_CONFIG:
    case PP_ERROR_PARSE:
    case PP_ERROR_INVALID_ARGUMENT: return 2;
    case PP_ERROR_DIGEST_MISMATCH: return 3;
    default: return 1;
  }
}

int report(pp_status status, const std::string& what) {
  if (status == PP_OK) return 0;
  std::cerr << "piper: " << what << ": " << pp_status_name(status) << ": "
            << pp_last_error() << '\n';
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic Pied Piper BCI grid simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed_override;
  std::string scenario_override;
  std::string threshold_override;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment scenario");
  run->add_option("--config", config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed_override, "Override the seed");
  run->add_option("--scenario", scenario_override, "Override the scenario");
  run->add_option("--threshold", threshold_override, "Override the REWARD threshold");
  run->add_option("--out", out_dir, "Output directory (default: config output_dir)");

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and verify digests");
  replay->add_option("--manifest", manifest_path, "Manifest file from a previous run")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (replay->parsed()) {
    const pp_status status = pp_replay(manifest_path.c_str());
    if (status == PP_OK) {
      std::cout << "replay ok: " << manifest_path << '\n';
      return 0;
    }
    return report(status, "replay");
  }

  pp_config* raw = nullptr;
  if (const pp_status status = pp_config_create(&raw); status != PP_OK) {
    return report(status, "config");
  }
  std::unique_ptr<pp_config, decltype(&pp_config_destroy)> config(raw, pp_config_destroy);

  if (const char* env_seed = std::getenv("PIPER_SEED"); env_seed != nullptr) {
    if (const pp_status status = pp_config_set(config.get(), "seed", env_seed);
        status != PP_OK) {
      return report(status, "PIPER_SEED");
    }
  }
  if (const pp_status status = pp_config_load(config.get(), config_path.c_str());
      status != PP_OK) {
    return report(status, config_path);
  }
  const std::pair<const char*, const std::string*> overrides[] = {
      {"seed", &seed_override},
      {"scenario", &scenario_override},
      {"threshold", &threshold_override},
  };
  for (const auto& [key, value] : overrides) {
    if (value->empty()) continue;
    if (const pp_status status = pp_config_set(config.get(), key, value->c_str());
        status != PP_OK) {
      return report(status, std::string("--") + key);
    }
  }

  const pp_status status =
      pp_run_experiment(config.get(), out_dir.empty() ? nullptr : out_dir.c_str());
  if (status != PP_OK) return report(status, "run");

  char resolved[512];
  if (out_dir.empty() &&
      pp_config_get(config.get(), "output_dir", resolved, sizeof(resolved)) == PP_OK) {
    out_dir = resolved;
  }
  std::cout << "run ok: wrote " << out_dir << '\n';
  return 0;
}
