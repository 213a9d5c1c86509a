#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pp {

// ---------------------------------------------------------------------------
// Small numeric building blocks shared by every module.
// ---------------------------------------------------------------------------

/// Dense row-major channels-by-samples matrix of voltages (uV).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix& o) const = default;
};

/// Half-open time interval in milliseconds relative to a stimulus onset.
struct TimeWindow {
  double lo_ms = 0.0;
  double hi_ms = 0.0;

  double length_ms() const { return hi_ms - lo_ms; }
  /// Sample offset of lo_ms relative to the onset sample.
  std::int64_t first_offset(double fs_hz) const {
    return std::llround(lo_ms * fs_hz / 1000.0);
  }
  std::int64_t n_samples(double fs_hz) const {
    return std::llround(length_ms() * fs_hz / 1000.0);
  }
  /// Index of time t_ms inside a window-aligned buffer.
  std::int64_t index_of(double t_ms, double fs_hz) const {
    return std::llround(t_ms * fs_hz / 1000.0) - first_offset(fs_hz);
  }
};

/// Deterministic RNG. mt19937_64 output is pinned by the standard and the
/// uniform/gauss mappings are explicit, so streams are identical on every
/// platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Derives an independent stream seed from (seed, stream) via splitmix64.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (pair cached).
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a 64-bit digest; used for every pinned file/log digest.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t value);

// ---------------------------------------------------------------------------
// Stimuli and subjects.
// ---------------------------------------------------------------------------

enum class StimulusClass { Probe = 0, Target = 1, Irrelevant = 2 };

inline constexpr std::array<StimulusClass, 3> kStimulusClasses = {
    StimulusClass::Probe, StimulusClass::Target, StimulusClass::Irrelevant};

std::string to_string(StimulusClass c);
StimulusClass stimulus_class_from(std::string_view s);

enum class SubjectClass { Knowledgeable, NotKnowledgeable };

std::string to_string(SubjectClass c);
SubjectClass subject_class_from(std::string_view s);

enum class BandName { Alpha = 0, Mu, Beta, Theta, Delta };

inline constexpr std::array<BandName, 5> kBandNames = {
    BandName::Alpha, BandName::Mu, BandName::Beta, BandName::Theta, BandName::Delta};

std::string to_string(BandName b);
BandName band_name_from(std::string_view s);

/// One EEG frequency band. Delta is the `<3 Hz` band, realized as low_hz = 0.
struct BandSpec {
  BandName name = BandName::Alpha;
  double low_hz = 0.0;
  double high_hz = 0.0;

  bool operator==(const BandSpec&) const = default;
};

/// Canonical band table: Alpha 8-12, Mu 9-11, Beta 14-30, Theta 4-7, Delta 0-3.
const std::array<BandSpec, 5>& canonical_bands();
const BandSpec& band(BandName name);

/// Frequency of the synthetic background tone for a band: geometric mean of
/// the edges, with the low edge clamped to 1 Hz (Delta's low edge is 0).
double band_tone_hz(const BandSpec& spec);

using BandPowers = std::map<BandName, double>;  // uV^2 per band

struct SubjectProfile {
  std::string subject_id;
  SubjectClass cls = SubjectClass::Knowledgeable;
  std::array<double, 3> erp_amplitude_uv{};  // indexed by StimulusClass
  double erp_latency_ms = 400.0;
  double erp_width_ms = 200.0;
  /// Stimulus-locked early deflection shared by all classes (N1/P2-like).
  double evoked_common_uv = 8.0;
  double evoked_latency_ms = 150.0;
  double evoked_width_ms = 150.0;
  BandPowers background_band_power;

  double amplitude(StimulusClass c) const {
    return erp_amplitude_uv[static_cast<std::size_t>(c)];
  }

  /// Throws InvalidArgument when a field is out of contract (non-finite
  /// values, bump not inside `window`, or the class/amplitude pattern broken).
  void validate(const TimeWindow& window) const;
};

SubjectProfile knowledgeable_profile(std::string subject_id);
SubjectProfile not_knowledgeable_profile(std::string subject_id);

// ---------------------------------------------------------------------------
// Recordings, schedules, epochs.
// ---------------------------------------------------------------------------

struct StimulusSchedule {
  struct Event {
    std::int64_t onset_sample = 0;
    StimulusClass cls = StimulusClass::Probe;
    bool operator==(const Event&) const = default;
  };
  std::vector<Event> events;
  double fs_hz = 0.0;
  std::int64_t n_samples = 0;

  bool operator==(const StimulusSchedule&) const = default;
  /// Checks ordering, spacing and window containment against `window`.
  void validate(const TimeWindow& window) const;
};

struct RawRecording {
  double fs_hz = 0.0;
  std::vector<std::string> channels;
  Matrix data;  // channels x samples
  std::string montage_ref;

  std::size_t n_channels() const { return channels.size(); }
  std::int64_t n_samples() const { return static_cast<std::int64_t>(data.cols); }
};

struct Epoch {
  StimulusClass cls = StimulusClass::Probe;
  Matrix data;  // channels x window samples
  bool baseline_corrected = false;
  std::int64_t onset_sample = 0;
};

struct EpochSet {
  double fs_hz = 0.0;
  std::vector<Epoch> epochs;

  std::size_t size() const { return epochs.size(); }
  std::size_t n_channels() const { return epochs.empty() ? 0 : epochs.front().data.rows; }
  std::size_t window_samples() const { return epochs.empty() ? 0 : epochs.front().data.cols; }
};

struct ErpAverage {
  StimulusClass cls = StimulusClass::Probe;
  Matrix waveform;  // channels x window samples
  std::size_t n_epochs = 0;
};

struct Montage {
  std::vector<std::string> channels;
  std::map<std::string, std::vector<std::string>> neighbors;

  /// Throws MontageError unless the neighbor relation is symmetric,
  /// irreflexive and every list is non-empty.
  void validate() const;
};

/// Linear-array montage: each channel neighbors its immediate predecessors
/// and successors. Needs at least two channels.
Montage make_chain_montage(const std::vector<std::string>& channels);

/// Chain montage with the designated channel (index 0) mid-array: odd
/// indices extend to one side, even indices to the other, so channel 0 has
/// two neighbors and the evoked topography peaks mid-scalp.
Montage default_scalp_montage(const std::vector<std::string>& channels);

std::vector<std::string> default_channel_ids(std::size_t n);

// ---------------------------------------------------------------------------
// Fixed experiment-wide constants.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultFsHz = 256.0;
inline constexpr TimeWindow kEpochWindow{-100.0, 800.0};
inline constexpr TimeWindow kBaselineWindow{-100.0, 0.0};
inline constexpr TimeWindow kStatWindow{300.0, 600.0};
inline constexpr double kTickPeriodMs = 125.0;
inline constexpr int kDefaultTaps = 257;
inline constexpr double kArtifactThresholdUv = 100.0;
inline constexpr double kAmpLargeUv = 10.0;
inline constexpr double kAmpSmallUv = 2.0;
inline constexpr double kDefaultNoiseUv = 5.0;
inline constexpr double kDefaultIsiMs = 1000.0;
/// Per-channel gain of the evoked topography, 0.25^channel from channel 0.
inline constexpr double kTopographyDecay = 0.25;
inline constexpr std::array<double, 3> kDefaultRatios = {1.0 / 6.0, 1.0 / 6.0, 4.0 / 6.0};

}  // namespace pp
