#include "piedpiper/control.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "piedpiper/dsp.hpp"
#include "piedpiper/errors.hpp"
#include "piedpiper/synth.hpp"

namespace pp::control {

std::string to_string(RewardOutcome o) {
  return o == RewardOutcome::Reward ? "Reward" : "NoReward";
}

std::string to_string(Authority a) {
  return a == Authority::MayorInControl ? "MayorInControl" : "PiperOverride";
}

std::string to_string(MotorValue v) {
  switch (v) {
    case MotorValue::Forward: return "Forward";
    case MotorValue::Left: return "Left";
    case MotorValue::Right: return "Right";
    case MotorValue::Stop: return "Stop";
  }
  return "?";
}

std::pair<int, int> tally_responses(const std::vector<grid::WorkerResult>& results,
                                    double response_threshold) {
  if (results.empty()) throw NoSensors("tally_responses: no sensor results");
  int responders = 0;
  for (const auto& r : results) {
    if (!r.contaminated && r.statistic > response_threshold) ++responders;
  }
  return {responders, static_cast<int>(results.size())};
}

RewardDecision decide_reward(int responders, int total, double threshold) {
  if (total < 1) throw CountError("decide_reward: total must be >= 1");
  if (responders < 0 || responders > total) {
    throw CountError("decide_reward: responders out of [0, total]");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("decide_reward: threshold must be in (0, 1]");
  }
  RewardDecision d;
  d.responders = responders;
  d.total = total;
  d.threshold = threshold;
  d.outcome = static_cast<double>(responders) >= threshold * static_cast<double>(total)
                  ? RewardOutcome::Reward
                  : RewardOutcome::NoReward;
  return d;
}

OverrideState override_step(const OverrideState& state, const RewardDecision& decision,
                            grid::Tick tick) {
  const Authority next = decision.outcome == RewardOutcome::Reward
                             ? Authority::MayorInControl
                             : Authority::PiperOverride;
  if (next == state.value) return state;
  return {next, tick};
}

MotorCommand motor_command(const OverrideState& state, const RewardDecision& decision,
                           double lateralization, grid::Tick tick) {
  (void)decision;  // the override state already encodes the last decision
  MotorCommand cmd;
  cmd.tick = tick;
  if (state.value == Authority::PiperOverride) {
    cmd.value = MotorValue::Stop;
  } else if (lateralization < -0.3) {
    cmd.value = MotorValue::Left;
  } else if (lateralization > 0.3) {
    cmd.value = MotorValue::Right;
  } else {
    cmd.value = MotorValue::Forward;
  }
  return cmd;
}

double mu_lateralization(const RawRecording& window, int n_taps) {
  const auto kernel = dsp::band_kernel(band(BandName::Mu), window.fs_hz, n_taps);
  const RawRecording mu = dsp::apply_filter(kernel, window);
  const std::size_t n_ch = mu.n_channels();
  if (n_ch < 2) return 0.0;
  const std::size_t half = n_ch / 2;
  // Central 80% of samples, skipping filter edge transients.
  const std::size_t n = mu.data.cols;
  const std::size_t t0 = n / 10;
  const std::size_t t1 = n - n / 10;
  double left = 0.0, right = 0.0;
  for (std::size_t ch = 0; ch < half; ++ch) {
    for (std::size_t t = t0; t < t1; ++t) left += mu.data(ch, t) * mu.data(ch, t);
  }
  for (std::size_t ch = n_ch - half; ch < n_ch; ++ch) {
    for (std::size_t t = t0; t < t1; ++t) right += mu.data(ch, t) * mu.data(ch, t);
  }
  const double sum = left + right;
  if (sum <= 0.0) return 0.0;
  return (right - left) / sum;
}

std::string SessionReport::to_text() const {
  std::ostringstream os;
  os << "tick responders total outcome state command\n";
  for (const auto& t : ticks) {
    os << t.tick << ' ' << t.responders << ' ' << t.total << ' ' << to_string(t.outcome)
       << ' ' << to_string(t.state) << ' ' << to_string(t.command) << '\n';
  }
  return os.str();
}

namespace {

constexpr std::uint64_t kStreamTick = 0x71c4;
constexpr std::uint64_t kStreamVerdict = 0x3e8d1c7;

std::string fmt_sample(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SessionReport run_session(grid::GridSim& grid, const SessionInputs& inputs,
                          const ControlTickConfig& tick_config,
                          const SessionThresholds& thresholds, std::uint64_t seed) {
  if (inputs.subjects.empty()) throw InvalidArgument("run_session: need at least one subject");
  if (!(tick_config.session_ms > 0.0)) {
    throw InvalidArgument("run_session: session_ms must be positive");
  }
  const auto n_ticks = static_cast<std::size_t>(
      std::floor(tick_config.session_ms / ControlTickConfig::period_ms));

  const double fs = kDefaultFsHz;
  const std::int64_t win = kEpochWindow.n_samples(fs);
  // Onset placed so the epoch has at least one filter half-length of
  // context on both sides.
  const std::int64_t onset = 160;
  const auto montage = default_scalp_montage(default_channel_ids(inputs.n_channels));
  const std::size_t n_sensors = grid.worker_ids().size();
  const std::int64_t stat_lo = kEpochWindow.index_of(kStatWindow.lo_ms, fs);
  const std::int64_t stat_hi = kEpochWindow.index_of(kStatWindow.hi_ms, fs);

  // Stimulus class sequence for the whole session; uniform mix so the
  // final determinations get balanced class counts.
  const std::array<double, 3> uniform = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const StimulusSchedule session_classes = n_ticks == 0
      ? StimulusSchedule{}
      : synth::make_schedule(n_ticks, uniform, kDefaultIsiMs, fs, seed);

  SessionReport report;
  report.ticks.reserve(n_ticks);
  OverrideState state;
  std::vector<EpochSet> collected(inputs.subjects.size());
  for (auto& set : collected) set.fs_hz = fs;

  for (std::size_t tick = 0; tick < n_ticks; ++tick) {
    const StimulusClass cls = session_classes.events[tick].cls;
    StimulusSchedule one;
    one.fs_hz = fs;
    one.n_samples = onset + kEpochWindow.first_offset(fs) + win + onset;
    one.events.push_back({onset, cls});

    std::string slice;
    double lateral = 0.0;
    for (std::size_t s = 0; s < inputs.subjects.size(); ++s) {
      const std::uint64_t tick_seed =
          Rng::mix(Rng::mix(seed, kStreamTick + tick), s);
      const RawRecording raw = synth::synth_recording(inputs.subjects[s], one,
                                                      inputs.n_channels,
                                                      inputs.noise_std_uv, tick_seed);
      const RawRecording banded = dsp::keep_bands(raw, inputs.bands_kept, inputs.n_taps);
      if (s == 0) {
        // The sensor array redundantly monitors the designated response
        // channel of the band-filtered signal; the spatial transform below
        // serves the determination path only.
        lateral = mu_lateralization(raw, inputs.n_taps);
        const EpochSet sensor_set =
            dsp::extract_epochs(banded, one, kEpochWindow, kBaselineWindow);
        const Epoch& ep = sensor_set.epochs.front();
        for (std::int64_t t = stat_lo; t < stat_hi; ++t) {
          if (t > stat_lo) slice += ',';
          slice += fmt_sample(ep.data(0, static_cast<std::size_t>(t)));
        }
      }
      const RawRecording cortex = dsp::scalp_to_cortex(banded, montage);
      EpochSet set = dsp::extract_epochs(cortex, one, kEpochWindow, kBaselineWindow);
      auto [kept, rejected] = dsp::denoise(set, kArtifactThresholdUv);
      if (!kept.epochs.empty()) {
        collected[s].epochs.push_back(std::move(kept.epochs.front()));
      }
    }

    // Each sensor ships its readout of the response window through the
    // grid; the workers compute the mean-amplitude statistic.
    std::string job;
    for (std::size_t i = 0; i < n_sensors; ++i) {
      if (i > 0) job += '|';
      job += slice;
    }
    grid.submit_work(grid.client_ids().front(), job, n_sensors);
    grid.run_until_idle(grid.clock() + 1000000);
    std::vector<grid::WorkerResult> results;
    for (const auto& payload : grid.take_results(grid.client_ids().front())) {
      results.push_back(grid::parse_result_payload(payload));
    }

    const auto [responders, total] = tally_responses(results, thresholds.response_stat_uv);
    const RewardDecision decision =
        decide_reward(responders, total, thresholds.reward_threshold);
    if (decision.outcome == RewardOutcome::Reward) {
      grid.emit_reward_signal();
    } else if (state.value == Authority::MayorInControl) {
      grid.emit_call_for_rescue();
      grid.emit_override_command();
    }
    grid.run_until_idle(grid.clock() + 1000000);

    state = override_step(state, decision, static_cast<grid::Tick>(tick));
    const MotorCommand cmd =
        motor_command(state, decision, lateral, static_cast<grid::Tick>(tick));
    report.ticks.push_back({static_cast<grid::Tick>(tick), decision.responders, decision.total,
                            decision.outcome, state.value, cmd.value});
  }

  // Final determinations for subjects with enough kept epochs per class.
  for (std::size_t s = 0; s < inputs.subjects.size(); ++s) {
    std::array<std::size_t, 3> counts{};
    for (const auto& ep : collected[s].epochs) {
      ++counts[static_cast<std::size_t>(ep.cls)];
    }
    if (counts[0] < 2 || counts[1] < 2 || counts[2] < 2) continue;
    mera::BootstrapConfig cfg;
    cfg.seed = Rng::mix(seed, kStreamVerdict + s);
    report.verdicts.push_back({inputs.subjects[s].subject_id, inputs.subjects[s].cls,
                               mera::bootstrap_verdict(collected[s], cfg)});
  }
  return report;
}

}  // namespace pp::control
