// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line each. Exits non-zero if any criterion fails.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "piedpiper/control.hpp"
#include "piedpiper/dsp.hpp"
#include "piedpiper/grid.hpp"
#include "piedpiper/harness.hpp"
#include "piedpiper/mera.hpp"
#include "piedpiper/piedpiper.h"
#include "piedpiper/synth.hpp"

namespace fs = std::filesystem;
using namespace pp;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- 1. filter bank gains ---------------------------------------------------

void criterion_filter_bank(Check& c) {
  const double fs = 256.0;
  for (const auto& spec : canonical_bands()) {
    const auto kernel = dsp::band_kernel(spec, fs, 257);
    const double center = (spec.low_hz + spec.high_hz) / 2.0;
    const double center_db = oracle::to_db(oracle::dtft_mag(kernel.taps, center, fs));
    c.expect(std::abs(center_db) <= 0.5,
             to_string(spec.name) + " center gain " + fmt(center_db) + " dB");
    std::vector<double> stop_freqs;
    if (spec.low_hz > 0.0) stop_freqs.push_back(spec.low_hz / 2.0);
    stop_freqs.push_back(spec.low_hz > 0.0 ? spec.high_hz * 2.0 : 6.0);
    for (double f : stop_freqs) {
      const double db = oracle::to_db(oracle::dtft_mag(kernel.taps, f, fs));
      c.expect(db <= -40.0, to_string(spec.name) + " stopband at " + fmt(f) + " Hz is " +
                                fmt(db) + " dB");
    }
  }
}

// --- 2. averaging convergence ----------------------------------------------

void criterion_averaging(Check& c) {
  const std::size_t win = 230;
  Rng rng(2024);
  std::vector<double> tmpl(win, 0.0);
  for (std::size_t i = 100; i < 150; ++i) {
    tmpl[i] = 10.0 * 0.5 * (1.0 + std::cos(2.0 * oracle::kPi * (static_cast<double>(i) - 125.0) / 50.0));
  }
  EpochSet set;
  set.fs_hz = 256.0;
  for (int e = 0; e < 100; ++e) {
    Epoch ep;
    ep.cls = StimulusClass::Probe;
    ep.data = Matrix(1, win);
    for (std::size_t i = 0; i < win; ++i) ep.data(0, i) = tmpl[i] + 5.0 * rng.gauss();
    set.epochs.push_back(std::move(ep));
  }
  const auto avg = dsp::average_epochs(set, StimulusClass::Probe);
  std::vector<double> residual(win);
  for (std::size_t i = 0; i < win; ++i) residual[i] = avg.waveform(0, i) - tmpl[i];
  const double sd = oracle::sample_std(residual);
  c.expect(std::abs(sd - 0.5) <= 0.15 * 0.5, "residual std " + fmt(sd) + " vs 0.5");
}

// --- 3. Laplacian ------------------------------------------------------------

void criterion_laplacian(Check& c) {
  const auto montage = make_chain_montage(default_channel_ids(6));
  RawRecording constant;
  constant.fs_hz = 256.0;
  constant.channels = montage.channels;
  constant.data = Matrix(6, 128);
  for (auto& v : constant.data.v) v = 12.75;
  const auto zero = dsp::scalp_to_cortex(constant, montage);
  for (double v : zero.data.v) {
    c.expect(v == 0.0, "constant input not exactly zeroed");
    if (!c.ok) break;
  }

  Rng rng(5150);
  RawRecording x = constant, y = constant, mix = constant;
  const double a = 0.8, b = -1.9;
  for (std::size_t i = 0; i < x.data.v.size(); ++i) {
    x.data.v[i] = rng.gauss();
    y.data.v[i] = rng.gauss();
    mix.data.v[i] = a * x.data.v[i] + b * y.data.v[i];
  }
  const auto lx = dsp::scalp_to_cortex(x, montage);
  const auto ly = dsp::scalp_to_cortex(y, montage);
  const auto lmix = dsp::scalp_to_cortex(mix, montage);
  for (std::size_t i = 0; i < x.data.v.size(); ++i) {
    const double expect = a * lx.data.v[i] + b * ly.data.v[i];
    const double err = std::abs(lmix.data.v[i] - expect);
    const double scale = std::max(1.0, std::abs(expect));
    if (err > 1e-9 * scale) {
      c.expect(false, "linearity off by " + fmt(err));
      break;
    }
  }
}

// --- 4/5. MERA cohort + probe-best -------------------------------------------

void criteria_cohort(Check& c4, Check& c5) {
  harness::ExperimentConfig config;  // defaults: MixedCohort, 20+20, seed 1
  const auto cohort = harness::run_cohort(config);

  std::size_t correct = 0, indeterminate = 0, cross = 0;
  for (const auto& s : cohort.subjects) {
    const bool knowledgeable = s.profile.cls == SubjectClass::Knowledgeable;
    switch (s.verdict.determination) {
      case mera::Determination::InformationPresent:
        if (knowledgeable) {
          ++correct;
        } else {
          ++cross;
        }
        break;
      case mera::Determination::InformationAbsent:
        if (knowledgeable) {
          ++cross;
        } else {
          ++correct;
        }
        break;
      case mera::Determination::Indeterminate:
        ++indeterminate;
        break;
    }
  }
  const std::size_t n = cohort.subjects.size();
  c4.expect(n == 40, "expected 40 subjects, got " + std::to_string(n));
  c4.expect(correct * 100 >= n * 95,
            "correct " + std::to_string(correct) + "/" + std::to_string(n));
  c4.expect(cross == 0, std::to_string(cross) + " cross-class errors");
  c4.expect(indeterminate * 100 <= n * 10,
            std::to_string(indeterminate) + " indeterminate verdicts");

  const auto& d = cohort.discriminability;
  c5.expect(cohort.has_discriminability, "cohort produced no discriminability");
  c5.expect(d.per_class_auc[0] >= d.per_class_auc[1],
            "AUC(Probe) " + fmt(d.per_class_auc[0]) + " < AUC(Target) " +
                fmt(d.per_class_auc[1]));
  c5.expect(d.per_class_auc[0] >= d.per_class_auc[2],
            "AUC(Probe) " + fmt(d.per_class_auc[0]) + " < AUC(Irrelevant) " +
                fmt(d.per_class_auc[2]));
  c5.expect(d.best == StimulusClass::Probe, "best = " + to_string(d.best));
}

// --- 6. grid determinism + conservation ---------------------------------------

void criterion_grid(Check& c) {
  auto run = [](std::uint64_t seed) {
    auto sim = grid::spawn_grid(10, 0.2, 4, 1, seed);
    for (std::size_t i = 0; i < 4; ++i) {
      sim.submit_work(sim.client_ids()[i], "w|x|y|z", 4);  // 16 chunks total
    }
    sim.run_until_idle(1000000);
    return sim;
  };
  const auto a = run(1);
  std::size_t delivered = 0;
  for (const auto& e : a.log()) {
    if (e.kind == grid::MsgKind::WorkResult &&
        a.role_of(e.dst).kind == grid::NodeRole::Kind::Client) {
      ++delivered;
    }
  }
  c.expect(a.idle(), "run did not reach idle");
  c.expect(delivered == 16, "delivered " + std::to_string(delivered) + "/16 results");
  const auto b = run(1);
  c.expect(a.log_digest() == b.log_digest(), "same seed produced different digests");
  const auto other = run(2);
  c.expect(a.log_digest() != other.log_digest(), "different seed produced the same digest");
}

// --- 7. REWARD exhaustive ------------------------------------------------------

void criterion_reward(Check& c) {
  for (double threshold : {0.25, 0.5, 0.75}) {
    for (int total = 1; total <= 12; ++total) {
      for (int responders = 0; responders <= total; ++responders) {
        const auto d = control::decide_reward(responders, total, threshold);
        const bool expected = oracle::reward_predicate(responders, total, threshold);
        if ((d.outcome == control::RewardOutcome::Reward) != expected) {
          c.expect(false, "mismatch at (" + std::to_string(responders) + "," +
                              std::to_string(total) + "," + fmt(threshold) + ")");
          return;
        }
      }
    }
  }
}

// --- 8. override safety ----------------------------------------------------------

void criterion_override_safety(Check& c) {
  Rng rng(808);
  std::size_t no_reward_ticks = 0;
  for (int session = 0; session < 100; ++session) {
    const std::size_t workers = 3 + rng.below(6);
    const double rat_fraction = rng.uniform();
    auto sim = grid::spawn_grid(workers, rat_fraction, 1, 1, rng.next_u64());
    control::SessionInputs inputs;
    inputs.subjects = {session % 2 == 0 ? knowledgeable_profile("k")
                                        : not_knowledgeable_profile("n")};
    inputs.n_channels = 4;
    control::SessionThresholds thresholds;
    thresholds.reward_threshold = 0.25 + 0.5 * rng.uniform();
    const auto report = control::run_session(sim, inputs, control::ControlTickConfig{1000.0},
                                             thresholds, rng.next_u64());
    if (report.ticks.size() != 8) {
      c.expect(false, "1 s session produced " + std::to_string(report.ticks.size()) + " ticks");
      return;
    }
    for (const auto& t : report.ticks) {
      if (t.outcome == control::RewardOutcome::NoReward) {
        ++no_reward_ticks;
        if (t.command != control::MotorValue::Stop) {
          c.expect(false, "NoReward tick " + std::to_string(t.tick) + " moved");
          return;
        }
      }
    }
  }
  c.expect(no_reward_ticks > 0, "randomized sessions never exercised NoReward");

  auto sim = grid::spawn_grid(10, 0.2, 4, 1, 12);
  control::SessionInputs inputs;
  inputs.subjects = {knowledgeable_profile("k")};
  inputs.n_channels = 4;
  const auto report = control::run_session(sim, inputs, control::ControlTickConfig{10000.0},
                                           control::SessionThresholds{}, 12);
  c.expect(report.ticks.size() == 80,
           "10 s session produced " + std::to_string(report.ticks.size()) + " ticks");
}

// --- 9. round-trip + replay -----------------------------------------------------

void criterion_roundtrip(Check& c) {
  const fs::path dir = fs::temp_directory_path() /
                       ("pp_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};

  Rng rng(9090);
  EpochSet set;
  set.fs_hz = 256.0;
  for (int e = 0; e < 1000; ++e) {
    Epoch ep;
    ep.cls = kStimulusClasses[rng.below(3)];
    ep.onset_sample = static_cast<std::int64_t>(rng.below(1000000));
    ep.data = Matrix(2, 48);
    for (auto& v : ep.data.v) v = 200.0 * (rng.uniform() - 0.5);
    set.epochs.push_back(std::move(ep));
  }
  const std::string path = (dir / "epochs.csv").string();
  harness::save_epochs(set, path);
  const auto loaded = harness::load_epochs(path);
  c.expect(loaded.size() == set.size(), "epoch count changed in round-trip");
  double max_err = 0.0;
  for (std::size_t e = 0; e < set.size(); ++e) {
    c.expect(loaded.epochs[e].cls == set.epochs[e].cls &&
                 loaded.epochs[e].onset_sample == set.epochs[e].onset_sample,
             "epoch metadata changed");
    for (std::size_t i = 0; i < set.epochs[e].data.v.size(); ++i) {
      max_err = std::max(max_err,
                         std::abs(loaded.epochs[e].data.v[i] - set.epochs[e].data.v[i]));
    }
  }
  c.expect(max_err <= 1e-6, "round-trip error " + fmt(max_err) + " uV");

  // replay through the public C surface must succeed end to end.
  pp_config* cfg = nullptr;
  c.expect(pp_config_create(&cfg) == PP_OK, "config create failed");
  pp_config_set(cfg, "scenario", "Knowledgeable");
  pp_config_set(cfg, "n_subjects", "2");
  pp_config_set(cfg, "n_trials", "24");
  pp_config_set(cfg, "n_channels", "4");
  pp_config_set(cfg, "session_ms", "1000");
  const std::string out = (dir / "run").string();
  c.expect(pp_run_experiment(cfg, out.c_str()) == PP_OK,
           std::string("run failed: ") + pp_last_error());
  const pp_status replay_status = pp_replay((out + "/manifest.txt").c_str());
  c.expect(replay_status == PP_OK,
           std::string("replay returned ") + pp_status_name(replay_status));
  pp_config_destroy(cfg);
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Check&)> run;
  };

  Check cohort4, cohort5;
  bool cohort_ran = false;
  auto ensure_cohort = [&]() {
    if (!cohort_ran) {
      criteria_cohort(cohort4, cohort5);
      cohort_ran = true;
    }
  };

  const std::vector<Criterion> criteria = {
      {"1 filter bank gains", criterion_filter_bank},
      {"2 averaging sqrt(N) convergence", criterion_averaging},
      {"3 surface Laplacian", criterion_laplacian},
      {"4 MERA cohort determinations",
       [&](Check& c) {
         ensure_cohort();
         c = cohort4;
       }},
      {"5 probe-best reproduction",
       [&](Check& c) {
         ensure_cohort();
         c = cohort5;
       }},
      {"6 grid determinism and conservation", criterion_grid},
      {"7 REWARD exhaustive check", criterion_reward},
      {"8 override safety and tick count", criterion_override_safety},
      {"9 epoch round-trip and replay", criterion_roundtrip},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    if (check.ok) {
      std::cout << "PASS criterion " << criterion.name << '\n';
    } else {
      ++failures;
      std::cout << "FAIL criterion " << criterion.name << ": " << check.detail << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}
