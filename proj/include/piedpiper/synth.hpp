#pragma once

#include <cstdint>
#include <vector>

#include "piedpiper/types.hpp"

namespace pp::synth {

/// Builds a stimulus schedule of n_trials events. Class counts follow the
/// ratios with largest-remainder rounding (ties broken in Probe, Target,
/// Irrelevant order), the order is shuffled by seed, and onsets are evenly
/// spaced at the inter-stimulus interval so epochs never overlap.
StimulusSchedule make_schedule(std::size_t n_trials, const std::array<double, 3>& ratios,
                               double isi_ms, double fs_hz, std::uint64_t seed);

/// Class-dependent response template, aligned to `window`: element i covers
/// onset-relative sample window.first_offset(fs) + i. A raised-cosine bump
/// of full width erp_width_ms peaks with value amplitude(cls) at the sample
/// nearest erp_latency_ms; zero amplitude gives an all-zero vector.
std::vector<double> erp_template(StimulusClass cls, const SubjectProfile& profile,
                                 double fs_hz, const TimeWindow& window);

/// Early deflection shared by all stimulus classes (amplitude
/// profile.evoked_common_uv at profile.evoked_latency_ms). Same alignment
/// as erp_template.
std::vector<double> evoked_template(const SubjectProfile& profile, double fs_hz,
                                    const TimeWindow& window);

/// Gain applied to the evoked waveforms on `channel`: 1 at channel 0,
/// decaying geometrically outward (focal scalp topography).
double erp_channel_gain(std::size_t channel);

/// Synthesizes a recording: per-band background sinusoids (seeded phases) +
/// white Gaussian noise + the evoked deflections at every scheduled onset.
/// Pure in (profile, schedule, n_channels, noise_std_uv, seed).
RawRecording synth_recording(const SubjectProfile& profile, const StimulusSchedule& schedule,
                             std::size_t n_channels, double noise_std_uv, std::uint64_t seed);

}  // namespace pp::synth
