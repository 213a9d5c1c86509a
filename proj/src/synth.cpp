#include "piedpiper/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "piedpiper/errors.hpp"

namespace pp::synth {

namespace {

constexpr std::uint64_t kStreamBackground = 0xb16;
constexpr std::uint64_t kStreamNoise = 0x4015e;
constexpr std::uint64_t kStreamShuffle = 0x5c0ff;

std::vector<double> bump_template(double amplitude_uv, double latency_ms, double width_ms,
                                  double fs_hz, const TimeWindow& window) {
  if (!(fs_hz > 0.0)) throw InvalidArgument("erp_template: fs_hz must be positive");
  const std::int64_t off = window.first_offset(fs_hz);
  const std::int64_t n = window.n_samples(fs_hz);
  if (n < 1) throw WindowError("erp_template: empty window");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (amplitude_uv == 0.0) return out;

  const std::int64_t center = std::llround(latency_ms * fs_hz / 1000.0);
  const double width = width_ms * fs_hz / 1000.0;  // samples, not rounded
  if (center - width / 2.0 < static_cast<double>(off) ||
      center + width / 2.0 > static_cast<double>(off + n - 1)) {
    throw WindowError("erp_template: window does not cover the template support");
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(off + i - center);
    if (std::abs(d) <= width / 2.0) {
      out[static_cast<std::size_t>(i)] =
          amplitude_uv * 0.5 * (1.0 + std::cos(2.0 * Rng::kPi * d / width));
    }
  }
  return out;
}

}  // namespace

StimulusSchedule make_schedule(std::size_t n_trials, const std::array<double, 3>& ratios,
                               double isi_ms, double fs_hz, std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidRatios("make_schedule: ratios must sum to 1");
  }
  for (double r : ratios) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidRatios("make_schedule: ratio out of range");
  }
  if (!(fs_hz > 0.0)) throw InvalidArgument("make_schedule: fs_hz must be positive");
  if (isi_ms + 1e-9 < kEpochWindow.length_ms()) {
    throw OverlapError("make_schedule: isi shorter than the epoch window");
  }

  StimulusSchedule sched;
  sched.fs_hz = fs_hz;
  if (n_trials == 0) return sched;

  // Largest-remainder apportionment over the three classes.
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double quota = static_cast<double>(n_trials) * ratios[c];
    counts[c] = static_cast<std::size_t>(std::floor(quota + 1e-12));
    frac[c] = quota - static_cast<double>(counts[c]);
    assigned += counts[c];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < n_trials; ++k) {
    ++counts[order[k % 3]];
    ++assigned;
  }

  std::vector<StimulusClass> classes;
  classes.reserve(n_trials);
  for (std::size_t c = 0; c < 3; ++c) {
    classes.insert(classes.end(), counts[c], kStimulusClasses[c]);
  }
  Rng rng(Rng::mix(seed, kStreamShuffle));
  for (std::size_t i = classes.size() - 1; i > 0; --i) {
    std::swap(classes[i], classes[rng.below(i + 1)]);
  }

  // Gaps are isi plus a seeded jitter of up to isi/4. The jitter keeps
  // onset phases of the background rhythms incoherent across trials, so
  // class averages are not biased by a fixed phase progression.
  const std::int64_t pre = -kEpochWindow.first_offset(fs_hz);
  const std::int64_t isi = std::llround(isi_ms * fs_hz / 1000.0);
  const std::int64_t jitter_range = isi / 4;
  sched.events.reserve(n_trials);
  std::int64_t onset = pre;
  for (std::size_t i = 0; i < n_trials; ++i) {
    sched.events.push_back({onset, classes[i]});
    onset += isi + (jitter_range > 0
                        ? static_cast<std::int64_t>(rng.below(
                              static_cast<std::size_t>(jitter_range) + 1))
                        : 0);
  }
  sched.n_samples = onset;
  sched.validate(kEpochWindow);
  return sched;
}

std::vector<double> erp_template(StimulusClass cls, const SubjectProfile& profile,
                                 double fs_hz, const TimeWindow& window) {
  return bump_template(profile.amplitude(cls), profile.erp_latency_ms, profile.erp_width_ms,
                       fs_hz, window);
}

std::vector<double> evoked_template(const SubjectProfile& profile, double fs_hz,
                                    const TimeWindow& window) {
  return bump_template(profile.evoked_common_uv, profile.evoked_latency_ms,
                       profile.evoked_width_ms, fs_hz, window);
}

double erp_channel_gain(std::size_t channel) {
  return std::pow(kTopographyDecay, static_cast<double>(channel));
}

RawRecording synth_recording(const SubjectProfile& profile, const StimulusSchedule& schedule,
                             std::size_t n_channels, double noise_std_uv, std::uint64_t seed) {
  profile.validate(kEpochWindow);
  schedule.validate(kEpochWindow);
  if (n_channels < 1) throw InvalidArgument("synth_recording: need at least one channel");
  if (!(noise_std_uv >= 0.0) || !std::isfinite(noise_std_uv)) {
    throw InvalidArgument("synth_recording: noise_std_uv must be finite and >= 0");
  }

  RawRecording rec;
  rec.fs_hz = schedule.fs_hz;
  rec.channels = default_channel_ids(n_channels);
  rec.montage_ref = "chain";
  const std::size_t n = static_cast<std::size_t>(schedule.n_samples);
  rec.data = Matrix(n_channels, n);

  // Background: one tone per band, phase drawn per (channel, band).
  Rng bg(Rng::mix(seed, kStreamBackground));
  for (std::size_t ch = 0; ch < n_channels; ++ch) {
    for (const auto& spec : canonical_bands()) {
      const double phase = bg.uniform() * 2.0 * Rng::kPi;
      auto it = profile.background_band_power.find(spec.name);
      const double power = it == profile.background_band_power.end() ? 0.0 : it->second;
      if (power <= 0.0) continue;
      const double amp = std::sqrt(2.0 * power);
      const double w = 2.0 * Rng::kPi * band_tone_hz(spec) / rec.fs_hz;
      for (std::size_t t = 0; t < n; ++t) {
        rec.data(ch, t) += amp * std::sin(w * static_cast<double>(t) + phase);
      }
    }
  }

  if (noise_std_uv > 0.0) {
    Rng noise(Rng::mix(seed, kStreamNoise));
    for (std::size_t ch = 0; ch < n_channels; ++ch) {
      for (std::size_t t = 0; t < n; ++t) {
        rec.data(ch, t) += noise_std_uv * noise.gauss();
      }
    }
  }

  if (!schedule.events.empty()) {
    const std::int64_t off = kEpochWindow.first_offset(rec.fs_hz);
    const std::int64_t win = kEpochWindow.n_samples(rec.fs_hz);
    const auto evoked = evoked_template(profile, rec.fs_hz, kEpochWindow);
    std::array<std::vector<double>, 3> shapes;
    for (std::size_t c = 0; c < 3; ++c) {
      shapes[c] = erp_template(kStimulusClasses[c], profile, rec.fs_hz, kEpochWindow);
      for (std::int64_t i = 0; i < win; ++i) {
        shapes[c][static_cast<std::size_t>(i)] += evoked[static_cast<std::size_t>(i)];
      }
    }
    for (const auto& ev : schedule.events) {
      const auto& shape = shapes[static_cast<std::size_t>(ev.cls)];
      for (std::size_t ch = 0; ch < n_channels; ++ch) {
        const double gain = erp_channel_gain(ch);
        for (std::int64_t i = 0; i < win; ++i) {
          rec.data(ch, static_cast<std::size_t>(ev.onset_sample + off + i)) +=
              gain * shape[static_cast<std::size_t>(i)];
        }
      }
    }
  }
  return rec;
}

}  // namespace pp::synth
