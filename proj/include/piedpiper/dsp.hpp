#pragma once

#include <set>
#include <utility>
#include <vector>

#include "piedpiper/types.hpp"

namespace pp::dsp {

/// Linear-phase FIR band-pass. Taps are symmetric about the center and the
/// kernel is scaled to unit gain at the band's arithmetic center frequency.
struct FilterKernel {
  std::vector<double> taps;
  double fs_hz = 0.0;
  BandSpec band;
};

/// Windowed-sinc (Hamming) band-pass for `band`; Delta (low edge 0) becomes
/// a low-pass at its high edge. n_taps must be odd and >= 65.
FilterKernel band_kernel(const BandSpec& band, double fs_hz, int n_taps);

/// Magnitude of the kernel's frequency response at f_hz.
double kernel_gain(const FilterKernel& kernel, double f_hz);

/// Per-channel convolution with group-delay compensation: the output stays
/// aligned with the input timeline, edges are zero-padded, length preserved.
RawRecording apply_filter(const FilterKernel& kernel, const RawRecording& recording);

/// Parallel filter bank: sum of apply_filter over every kept band.
RawRecording keep_bands(const RawRecording& recording, const std::set<BandName>& keep,
                        int n_taps);

/// Cuts one baseline-corrected epoch per scheduled event.
EpochSet extract_epochs(const RawRecording& recording, const StimulusSchedule& schedule,
                        const TimeWindow& window, const TimeWindow& baseline);

/// Pointwise mean across the epochs of one class.
ErpAverage average_epochs(const EpochSet& epochs, StimulusClass cls);

/// Hjorth surface-Laplacian estimate: channel minus the mean of its
/// montage neighbors, per sample.
RawRecording scalp_to_cortex(const RawRecording& recording, const Montage& montage);

/// Drops every epoch whose peak absolute amplitude exceeds the threshold.
/// Returns the surviving set and the rejected count.
std::pair<EpochSet, std::size_t> denoise(const EpochSet& epochs, double amp_threshold_uv);

}  // namespace pp::dsp
