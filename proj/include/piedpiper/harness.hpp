#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "piedpiper/control.hpp"
#include "piedpiper/mera.hpp"
#include "piedpiper/types.hpp"

namespace pp::harness {

enum class Scenario { Knowledgeable, NotKnowledgeable, MixedCohort, GridOnly };

std::string to_string(Scenario s);
Scenario scenario_from(std::string_view s);

/// Flat `key = value` experiment configuration with strict parsing: unknown
/// keys, duplicate keys and malformed values are rejected before any
/// computation. Values are kept as the exact strings that were set, so the
/// manifest echo reproduces the run byte-for-byte.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static const std::vector<std::string>& keys();

  /// Validates `key` and `value` and stores them. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  /// Loads a config file on top of the current values.
  void load_file(const std::string& path);
  /// Parses config text; lines are `key = value`, blank, or `#` comments.
  void load_text(const std::string& text);

  Scenario scenario() const;
  std::uint64_t seed() const;
  std::size_t n_trials() const;
  std::size_t n_subjects() const;
  std::size_t n_channels() const;
  double noise_std_uv() const;
  std::set<BandName> bands_kept() const;
  double threshold() const;
  std::size_t n_workers() const;
  double rat_fraction() const;
  std::size_t n_clients() const;
  std::size_t n_chunks() const;
  std::int64_t latency_ticks() const;
  double session_ms() const;
  double isi_ms() const;
  std::string output_dir() const;

  /// Canonical `key = value` lines for every key except output_dir.
  std::string echo_text() const;

 private:
  void check(const std::string& key, const std::string& value) const;
  std::map<std::string, std::string> kv_;
};

struct SubjectResult {
  SubjectProfile profile;
  std::array<ErpAverage, 3> averages;     // indexed by StimulusClass
  std::array<double, 3> stat{};           // mean 300-600 ms amplitude, channel 0
  mera::MeraVerdict verdict;
};

struct CohortResult {
  std::vector<SubjectResult> subjects;
  mera::StimulusDiscriminability discriminability;  // MixedCohort only
  bool has_discriminability = false;
};

/// Full per-subject pipeline: schedule -> synth -> band keep -> Laplacian ->
/// epochs -> artifact rejection -> averages + bootstrap verdict.
SubjectResult run_subject(const SubjectProfile& profile, const ExperimentConfig& config,
                          std::uint64_t subject_seed);

/// Builds the scenario's subjects (seeds config.seed + index) and runs each.
CohortResult run_cohort(const ExperimentConfig& config);

struct ExperimentOutput {
  std::string output_dir;
  std::vector<std::pair<std::string, std::uint64_t>> files;  // name -> digest
};

/// Runs the configured scenario and writes the artifact files
/// (erp_averages.csv, verdicts.csv, discriminability.csv, session.csv,
/// grid_log.txt, manifest.txt — per-scenario subset) into out_dir.
/// Every byte is a pure function of (config, seed).
ExperimentOutput run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Re-runs the manifest's configuration into a scratch directory and
/// compares the recorded digests. Throws DigestMismatch on any difference.
void replay(const std::string& manifest_path);

/// Writes per-class average waveforms (designated channel) as
/// `time_ms,probe_uV,target_uV,irrelevant_uV` rows.
void emit_plot_data(const std::array<ErpAverage, 3>& averages, double fs_hz,
                    const TimeWindow& window, const std::string& path);

/// Epoch file: header `fs_hz,n_channels,window_samples`, then one line per
/// epoch and channel: `class,onset,channel,samples...` at 6 decimals.
void save_epochs(const EpochSet& set, const std::string& path);
EpochSet load_epochs(const std::string& path);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pp::harness
