#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "piedpiper/grid.hpp"
#include "piedpiper/mera.hpp"
#include "piedpiper/types.hpp"

namespace pp::control {

enum class RewardOutcome { Reward, NoReward };

std::string to_string(RewardOutcome o);

struct RewardDecision {
  int responders = 0;
  int total = 0;
  double threshold = 0.5;
  RewardOutcome outcome = RewardOutcome::NoReward;
};

enum class Authority { MayorInControl, PiperOverride };

std::string to_string(Authority a);

struct OverrideState {
  Authority value = Authority::MayorInControl;
  grid::Tick since_tick = 0;
};

enum class MotorValue { Forward, Left, Right, Stop };

std::string to_string(MotorValue v);

struct MotorCommand {
  MotorValue value = MotorValue::Stop;
  grid::Tick tick = 0;
};

/// Counts non-contaminated results whose statistic exceeds
/// response_threshold; Rat-flagged results never respond.
/// Returns (responders, total).
std::pair<int, int> tally_responses(const std::vector<grid::WorkerResult>& results,
                                    double response_threshold);

/// REWARD iff responders/total >= threshold (inclusive boundary).
RewardDecision decide_reward(int responders, int total, double threshold);

/// NoReward hands control to the Piper, Reward returns it to the Mayor;
/// re-entering the current state keeps its since_tick.
OverrideState override_step(const OverrideState& state, const RewardDecision& decision,
                            grid::Tick tick);

/// Stop under Piper override; otherwise steer by lateralization with a
/// symmetric dead zone (|l| <= 0.3 drives Forward).
MotorCommand motor_command(const OverrideState& state, const RewardDecision& decision,
                           double lateralization, grid::Tick tick);

/// Mu-band power asymmetry (right minus left halves over sum) of a
/// recording window, in [-1, 1].
double mu_lateralization(const RawRecording& window, int n_taps);

struct ControlTickConfig {
  double session_ms = 10000.0;
  static constexpr double period_ms = kTickPeriodMs;  // fixed 125 ms
};

struct SessionThresholds {
  double reward_threshold = 0.5;
  double response_stat_uv = 0.0;
};

struct SessionInputs {
  std::vector<SubjectProfile> subjects;
  std::size_t n_channels = 8;
  double noise_std_uv = kDefaultNoiseUv;
  std::set<BandName> bands_kept = {BandName::Alpha, BandName::Mu, BandName::Beta,
                                   BandName::Theta, BandName::Delta};
  int n_taps = kDefaultTaps;
};

struct SessionTick {
  grid::Tick tick = 0;
  int responders = 0;
  int total = 0;
  RewardOutcome outcome = RewardOutcome::NoReward;
  Authority state = Authority::MayorInControl;
  MotorValue command = MotorValue::Stop;
};

struct SubjectVerdict {
  std::string subject_id;
  SubjectClass label = SubjectClass::Knowledgeable;
  mera::MeraVerdict verdict;
};

struct SessionReport {
  std::vector<SessionTick> ticks;
  std::vector<SubjectVerdict> verdicts;

  /// Columnar export: `tick responders total outcome state command` rows
  /// under a matching header.
  std::string to_text() const;
  std::uint64_t digest() const { return fnv1a64(to_text()); }
};

/// Runs the see-think-act loop: floor(session_ms / 125) ticks, each one
/// synthesizing a stimulus-locked window, running the preprocessing
/// pipeline, dispatching per-sensor statistics through the grid, tallying,
/// deciding REWARD, stepping the override machine and emitting one motor
/// command. Subject 0 drives the control stream; every subject accumulates
/// epochs for a final determination when enough of each class were kept.
SessionReport run_session(grid::GridSim& grid, const SessionInputs& inputs,
                          const ControlTickConfig& tick_config,
                          const SessionThresholds& thresholds, std::uint64_t seed);

}  // namespace pp::control
