#include "piedpiper/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "piedpiper/dsp.hpp"
#include "piedpiper/errors.hpp"
#include "piedpiper/synth.hpp"

namespace fs = std::filesystem;

namespace pp::harness {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Knowledgeable: return "Knowledgeable";
    case Scenario::NotKnowledgeable: return "NotKnowledgeable";
    case Scenario::MixedCohort: return "MixedCohort";
    case Scenario::GridOnly: return "GridOnly";
  }
  return "?";
}

Scenario scenario_from(std::string_view s) {
  if (s == "Knowledgeable") return Scenario::Knowledgeable;
  if (s == "NotKnowledgeable") return Scenario::NotKnowledgeable;
  if (s == "MixedCohort") return Scenario::MixedCohort;
  if (s == "GridOnly") return Scenario::GridOnly;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    if (end == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + value + "' is not a number");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + value + "' is not an integer");
  }
}

std::set<BandName> parse_bands(const std::string& key, const std::string& value) {
  std::set<BandName> out;
  for (const auto& tok : split(value, ',')) {
    const std::string t = trim(tok);
    if (t.empty()) continue;
    try {
      out.insert(band_name_from(t));
    } catch (const Error&) {
      throw ConfigError("key '" + key + "': unknown band '" + t + "'");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': needs at least one band");
  return out;
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  kv_ = {
      {"scenario", "MixedCohort"},
      {"seed", "1"},
      {"n_trials", "240"},
      {"n_subjects", "20"},
      {"n_channels", "8"},
      {"noise_std_uv", "5.0"},
      {"bands_kept", "Alpha,Mu,Beta,Theta,Delta"},
      {"threshold", "0.5"},
      {"n_workers", "10"},
      {"rat_fraction", "0.2"},
      {"n_clients", "4"},
      {"n_chunks", "16"},
      {"latency_ticks", "1"},
      {"session_ms", "10000"},
      {"isi_ms", "1000"},
      {"output_dir", "out"},
  };
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "scenario",   "seed",         "n_trials",     "n_subjects", "n_channels",
      "noise_std_uv", "bands_kept", "threshold",    "n_workers",  "rat_fraction",
      "n_clients",  "n_chunks",     "latency_ticks", "session_ms", "isi_ms",
      "output_dir",
  };
  return k;
}

void ExperimentConfig::check(const std::string& key, const std::string& value) const {
  if (key == "scenario") {
    try {
      scenario_from(value);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "seed") {
    parse_int(key, value);
  } else if (key == "n_channels") {
    if (parse_int(key, value) < 2) throw ConfigError("key '" + key + "' must be >= 2");
  } else if (key == "n_trials" || key == "n_subjects" || key == "n_workers" ||
             key == "n_clients" || key == "n_chunks" || key == "latency_ticks") {
    if (parse_int(key, value) < 1) throw ConfigError("key '" + key + "' must be >= 1");
  } else if (key == "noise_std_uv") {
    if (parse_double(key, value) < 0.0) throw ConfigError("key '" + key + "' must be >= 0");
  } else if (key == "bands_kept") {
    parse_bands(key, value);
  } else if (key == "threshold" || key == "rat_fraction") {
    const double v = parse_double(key, value);
    if (key == "threshold" && !(v > 0.0 && v <= 1.0)) {
      throw ConfigError("threshold must be in (0, 1]");
    }
    if (key == "rat_fraction" && !(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("rat_fraction must be in [0, 1]");
    }
  } else if (key == "session_ms" || key == "isi_ms") {
    if (!(parse_double(key, value) > 0.0)) throw ConfigError("key '" + key + "' must be > 0");
  } else if (key == "output_dir") {
    if (value.empty()) throw ConfigError("output_dir must not be empty");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  check(key, value);
  kv_[key] = value;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

void ExperimentConfig::load_text(const std::string& text) {
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  load_text(read_file(path));
}

Scenario ExperimentConfig::scenario() const { return scenario_from(get("scenario")); }
std::uint64_t ExperimentConfig::seed() const {
  return static_cast<std::uint64_t>(parse_int("seed", get("seed")));
}
std::size_t ExperimentConfig::n_trials() const {
  return static_cast<std::size_t>(parse_int("n_trials", get("n_trials")));
}
std::size_t ExperimentConfig::n_subjects() const {
  return static_cast<std::size_t>(parse_int("n_subjects", get("n_subjects")));
}
std::size_t ExperimentConfig::n_channels() const {
  return static_cast<std::size_t>(parse_int("n_channels", get("n_channels")));
}
double ExperimentConfig::noise_std_uv() const {
  return parse_double("noise_std_uv", get("noise_std_uv"));
}
std::set<BandName> ExperimentConfig::bands_kept() const {
  return parse_bands("bands_kept", get("bands_kept"));
}
double ExperimentConfig::threshold() const { return parse_double("threshold", get("threshold")); }
std::size_t ExperimentConfig::n_workers() const {
  return static_cast<std::size_t>(parse_int("n_workers", get("n_workers")));
}
double ExperimentConfig::rat_fraction() const {
  return parse_double("rat_fraction", get("rat_fraction"));
}
std::size_t ExperimentConfig::n_clients() const {
  return static_cast<std::size_t>(parse_int("n_clients", get("n_clients")));
}
std::size_t ExperimentConfig::n_chunks() const {
  return static_cast<std::size_t>(parse_int("n_chunks", get("n_chunks")));
}
std::int64_t ExperimentConfig::latency_ticks() const {
  return parse_int("latency_ticks", get("latency_ticks"));
}
double ExperimentConfig::session_ms() const { return parse_double("session_ms", get("session_ms")); }
double ExperimentConfig::isi_ms() const { return parse_double("isi_ms", get("isi_ms")); }
std::string ExperimentConfig::output_dir() const { return get("output_dir"); }

std::string ExperimentConfig::echo_text() const {
  std::ostringstream os;
  for (const auto& key : keys()) {
    if (key == "output_dir") continue;  // location-independent echo
    os << key << " = " << kv_.at(key) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
    if (!out) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void save_epochs(const EpochSet& set, const std::string& path) {
  std::ostringstream os;
  const std::size_t n_ch = set.n_channels();
  const std::size_t win = set.window_samples();
  for (const auto& ep : set.epochs) {
    if (ep.data.rows != n_ch || ep.data.cols != win) {
      throw InvalidArgument("save_epochs: epochs have mixed shapes");
    }
  }
  os << fmt6(set.fs_hz) << ',' << n_ch << ',' << win << '\n';
  for (const auto& ep : set.epochs) {
    for (std::size_t ch = 0; ch < n_ch; ++ch) {
      os << to_string(ep.cls) << ',' << ep.onset_sample << ',' << ch;
      for (std::size_t s = 0; s < win; ++s) {
        os << ',' << fmt6(ep.data(ch, s));
      }
      os << '\n';
    }
  }
  write_file_atomic(path, os.str());
}

EpochSet load_epochs(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  ++line_no;
  const auto header = split(trim(line), ',');
  if (header.size() != 3) throw ParseError(1, "header must be fs_hz,n_channels,window_samples");
  EpochSet set;
  std::size_t n_ch = 0, win = 0;
  try {
    std::size_t used = 0;
    set.fs_hz = std::stod(header[0], &used);
    if (used != header[0].size() || !(set.fs_hz > 0.0)) throw std::invalid_argument("fs");
    n_ch = static_cast<std::size_t>(std::stoull(header[1]));
    win = static_cast<std::size_t>(std::stoull(header[2]));
  } catch (const std::exception&) {
    throw ParseError(1, "malformed header '" + trim(line) + "'");
  }

  Epoch current;
  std::size_t expect_channel = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (n_ch == 0 || win == 0) {
      throw ParseError(line_no, "data line in a file that declares no epochs");
    }
    const auto fields = split(t, ',');
    if (fields.size() != 3 + win) {
      throw ParseError(line_no, "expected " + std::to_string(3 + win) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    StimulusClass cls;
    std::int64_t onset = 0;
    std::size_t channel = 0;
    try {
      cls = stimulus_class_from(fields[0]);
      onset = std::stoll(fields[1]);
      channel = static_cast<std::size_t>(std::stoull(fields[2]));
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed epoch prefix");
    }
    if (channel != expect_channel) {
      throw ParseError(line_no, "expected channel " + std::to_string(expect_channel) +
                                    ", got " + std::to_string(channel));
    }
    if (channel == 0) {
      current = Epoch{};
      current.cls = cls;
      current.onset_sample = onset;
      current.data = Matrix(n_ch, win);
    } else if (cls != current.cls || onset != current.onset_sample) {
      throw ParseError(line_no, "channel row does not match its epoch");
    }
    for (std::size_t s = 0; s < win; ++s) {
      try {
        std::size_t used = 0;
        current.data(channel, s) = std::stod(fields[3 + s], &used);
        if (used != fields[3 + s].size()) throw std::invalid_argument("sample");
      } catch (const std::exception&) {
        throw ParseError(line_no, "malformed sample value '" + fields[3 + s] + "'");
      }
    }
    if (++expect_channel == n_ch) {
      expect_channel = 0;
      set.epochs.push_back(std::move(current));
      current = Epoch{};
    }
  }
  if (expect_channel != 0) {
    throw ParseError(line_no + 1, "file truncated mid-epoch");
  }
  return set;
}

void emit_plot_data(const std::array<ErpAverage, 3>& averages, double fs_hz,
                    const TimeWindow& window, const std::string& path) {
  const std::size_t win = averages[0].waveform.cols;
  for (const auto& avg : averages) {
    if (avg.n_epochs < 1) {
      throw EmptyClassError("emit_plot_data: missing average for " + to_string(avg.cls));
    }
    if (avg.waveform.cols != win || avg.waveform.rows < 1) {
      throw InvalidArgument("emit_plot_data: averages have mixed shapes");
    }
  }
  std::ostringstream os;
  os << "time_ms,probe_uV,target_uV,irrelevant_uV\n";
  const double step = 1000.0 / fs_hz;
  for (std::size_t s = 0; s < win; ++s) {
    os << fmt6(window.lo_ms + static_cast<double>(s) * step);
    for (const auto& avg : averages) {
      os << ',' << fmt6(avg.waveform(0, s));
    }
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

// ---------------------------------------------------------------------------
// Scenario execution.
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kStreamSubjectMera = 0x3a11;

double stat_mean(const ErpAverage& avg, double fs_hz) {
  const std::int64_t lo = kEpochWindow.index_of(kStatWindow.lo_ms, fs_hz);
  const std::int64_t hi = kEpochWindow.index_of(kStatWindow.hi_ms, fs_hz);
  double sum = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) {
    sum += avg.waveform(0, static_cast<std::size_t>(i));
  }
  return sum / static_cast<double>(hi - lo);
}

std::vector<SubjectProfile> scenario_profiles(const ExperimentConfig& config) {
  std::vector<SubjectProfile> profiles;
  const std::size_t n = config.n_subjects();
  const Scenario sc = config.scenario();
  auto pad = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%02zu", i + 1);
    return std::string(buf);
  };
  if (sc == Scenario::Knowledgeable || sc == Scenario::MixedCohort) {
    for (std::size_t i = 0; i < n; ++i) profiles.push_back(knowledgeable_profile("K" + pad(i)));
  }
  if (sc == Scenario::NotKnowledgeable || sc == Scenario::MixedCohort) {
    for (std::size_t i = 0; i < n; ++i) {
      profiles.push_back(not_knowledgeable_profile("N" + pad(i)));
    }
  }
  return profiles;
}

}  // namespace

SubjectResult run_subject(const SubjectProfile& profile, const ExperimentConfig& config,
                          std::uint64_t subject_seed) {
  const double fs = kDefaultFsHz;
  const auto schedule = synth::make_schedule(config.n_trials(), kDefaultRatios,
                                             config.isi_ms(), fs, subject_seed);
  const RawRecording raw = synth::synth_recording(profile, schedule, config.n_channels(),
                                                  config.noise_std_uv(), subject_seed);
  const RawRecording banded = dsp::keep_bands(raw, config.bands_kept(), kDefaultTaps);
  const auto montage = default_scalp_montage(raw.channels);
  const RawRecording cortex = dsp::scalp_to_cortex(banded, montage);
  const EpochSet epochs = dsp::extract_epochs(cortex, schedule, kEpochWindow, kBaselineWindow);
  auto [kept, rejected] = dsp::denoise(epochs, kArtifactThresholdUv);

  SubjectResult result;
  result.profile = profile;
  for (std::size_t c = 0; c < 3; ++c) {
    result.averages[c] = dsp::average_epochs(kept, kStimulusClasses[c]);
    result.stat[c] = stat_mean(result.averages[c], fs);
  }
  mera::BootstrapConfig bc;
  bc.seed = Rng::mix(subject_seed, kStreamSubjectMera);
  result.verdict = mera::bootstrap_verdict(kept, bc);
  return result;
}

CohortResult run_cohort(const ExperimentConfig& config) {
  if (config.scenario() == Scenario::GridOnly) {
    throw InvalidArgument("run_cohort: GridOnly has no subjects");
  }
  CohortResult cohort;
  const auto profiles = scenario_profiles(config);
  std::uint64_t seed = config.seed();
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    cohort.subjects.push_back(run_subject(profiles[i], config, seed + i));
  }
  if (config.scenario() == Scenario::MixedCohort) {
    std::vector<mera::CohortEntry> entries;
    for (const auto& s : cohort.subjects) {
      entries.push_back({s.profile.cls, s.stat});
    }
    cohort.discriminability = mera::discriminability(entries);
    cohort.has_discriminability = true;
  }
  return cohort;
}

namespace {

std::string render_erp_averages(const CohortResult& cohort) {
  std::ostringstream os;
  os << "subject,time_ms,probe_uV,target_uV,irrelevant_uV\n";
  const double step = 1000.0 / kDefaultFsHz;
  for (const auto& s : cohort.subjects) {
    const std::size_t win = s.averages[0].waveform.cols;
    for (std::size_t i = 0; i < win; ++i) {
      os << s.profile.subject_id << ','
         << fmt6(kEpochWindow.lo_ms + static_cast<double>(i) * step);
      for (std::size_t c = 0; c < 3; ++c) {
        os << ',' << fmt6(s.averages[c].waveform(0, i));
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string render_verdicts(const CohortResult& cohort) {
  std::ostringstream os;
  os << "subject,label,determination,present_fraction,iterations\n";
  for (const auto& s : cohort.subjects) {
    os << s.profile.subject_id << ',' << to_string(s.profile.cls) << ','
       << mera::to_string(s.verdict.determination) << ',' << fmt6(s.verdict.present_fraction)
       << ',' << s.verdict.iterations << '\n';
  }
  return os.str();
}

std::string render_discriminability(const mera::StimulusDiscriminability& d) {
  std::ostringstream os;
  os << "auc_probe,auc_target,auc_irrelevant,best\n";
  os << fmt6(d.per_class_auc[0]) << ',' << fmt6(d.per_class_auc[1]) << ','
     << fmt6(d.per_class_auc[2]) << ',' << to_string(d.best) << '\n';
  return os.str();
}

std::string render_session(const control::SessionReport& report) {
  std::ostringstream os;
  os << "tick,responders,total,outcome,state,command\n";
  for (const auto& t : report.ticks) {
    os << t.tick << ',' << t.responders << ',' << t.total << ','
       << control::to_string(t.outcome) << ',' << control::to_string(t.state) << ','
       << control::to_string(t.command) << '\n';
  }
  return os.str();
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output dir " + out_dir + ": " + ec.message());

  ExperimentOutput out;
  out.output_dir = out_dir;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file_atomic((fs::path(out_dir) / name).string(), content);
    out.files.emplace_back(name, fnv1a64(content));
  };

  const Scenario sc = config.scenario();
  if (sc == Scenario::GridOnly) {
    grid::GridSim sim = grid::spawn_grid(config.n_workers(), config.rat_fraction(),
                                         config.n_clients(), config.latency_ticks(),
                                         config.seed());
    // Spread n_chunks over the clients, front-loading any remainder.
    const std::size_t n_clients = config.n_clients();
    const std::size_t base = config.n_chunks() / n_clients;
    const std::size_t extra = config.n_chunks() % n_clients;
    for (std::size_t i = 0; i < n_clients; ++i) {
      const std::size_t chunks = base + (i < extra ? 1 : 0);
      if (chunks == 0) continue;
      sim.submit_work(sim.client_ids()[i], "job-" + std::to_string(i), chunks);
    }
    sim.run_until_idle(1000000);
    emit("grid_log.txt", sim.log_text());
  } else {
    const CohortResult cohort = run_cohort(config);
    emit("erp_averages.csv", render_erp_averages(cohort));
    emit("verdicts.csv", render_verdicts(cohort));
    if (cohort.has_discriminability) {
      emit("discriminability.csv", render_discriminability(cohort.discriminability));
    }

    grid::GridSim sim = grid::spawn_grid(config.n_workers(), config.rat_fraction(),
                                         config.n_clients(), config.latency_ticks(),
                                         config.seed());
    control::SessionInputs inputs;
    inputs.subjects = {cohort.subjects.front().profile};
    inputs.n_channels = config.n_channels();
    inputs.noise_std_uv = config.noise_std_uv();
    inputs.bands_kept = config.bands_kept();
    control::SessionThresholds thresholds;
    thresholds.reward_threshold = config.threshold();
    const control::SessionReport report = control::run_session(
        sim, inputs, control::ControlTickConfig{config.session_ms()}, thresholds,
        config.seed());
    emit("session.csv", render_session(report));
    emit("grid_log.txt", sim.log_text());
  }

  std::ostringstream manifest;
  manifest << "# piedpiper manifest v1\n";
  manifest << config.echo_text();
  for (const auto& [name, digest] : out.files) {
    manifest << "file " << name << ' ' << hex16(digest) << '\n';
  }
  emit("manifest.txt", manifest.str());
  return out;
}

void replay(const std::string& manifest_path) {
  const std::string text = read_file(manifest_path);
  ExperimentConfig config;
  std::vector<std::pair<std::string, std::string>> recorded;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("file ", 0) == 0) {
      const auto fields = split(t, ' ');
      if (fields.size() != 3) {
        throw ParseError(line_no, "malformed file line in manifest");
      }
      recorded.emplace_back(fields[1], fields[2]);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "malformed manifest line");
    try {
      config.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (recorded.empty()) throw ParseError(line_no, "manifest names no files");

  static int scratch_counter = 0;
  const fs::path scratch = fs::temp_directory_path() /
                           ("pp_replay_" + std::to_string(::getpid()) + "_" +
                            std::to_string(scratch_counter++));
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{scratch};

  const ExperimentOutput rerun = run_experiment(config, scratch.string());
  std::map<std::string, std::string> fresh;
  for (const auto& [name, digest] : rerun.files) {
    if (name != "manifest.txt") fresh[name] = hex16(digest);
  }
  for (const auto& [name, digest] : recorded) {
    auto it = fresh.find(name);
    if (it == fresh.end()) {
      throw DigestMismatch("replay: file " + name + " missing from the re-run");
    }
    if (it->second != digest) {
      throw DigestMismatch("replay: digest mismatch for " + name + " (manifest " + digest +
                           ", re-run " + it->second + ")");
    }
    fresh.erase(it);
  }
  if (!fresh.empty()) {
    throw DigestMismatch("replay: re-run produced extra file " + fresh.begin()->first);
  }
}

}  // namespace pp::harness
