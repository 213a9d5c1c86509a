#include "piedpiper/dsp.hpp"

#include <cmath>
#include <complex>

#include "piedpiper/errors.hpp"

namespace pp::dsp {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = Rng::kPi * x;
  return std::sin(px) / px;
}

// Ideal low-pass impulse response sample at offset m from the center tap.
double ideal_lowpass(double cutoff_hz, double fs_hz, double m) {
  return 2.0 * cutoff_hz / fs_hz * sinc(2.0 * cutoff_hz * m / fs_hz);
}

}  // namespace

FilterKernel band_kernel(const BandSpec& band, double fs_hz, int n_taps) {
  if (!(fs_hz > 0.0)) throw InvalidArgument("band_kernel: fs_hz must be positive");
  if (!(band.high_hz < fs_hz / 2.0)) {
    throw NyquistError("band_kernel: " + to_string(band.name) + " upper edge " +
                       std::to_string(band.high_hz) + " Hz not below Nyquist");
  }
  if (n_taps < 65 || n_taps % 2 == 0) {
    throw InvalidArgument("band_kernel: n_taps must be odd and >= 65");
  }
  if (!(band.low_hz < band.high_hz) || band.low_hz < 0.0) {
    throw InvalidArgument("band_kernel: invalid band edges");
  }

  FilterKernel k;
  k.fs_hz = fs_hz;
  k.band = band;
  k.taps.resize(static_cast<std::size_t>(n_taps));
  const int mid = (n_taps - 1) / 2;
  for (int n = 0; n < n_taps; ++n) {
    const double m = static_cast<double>(n - mid);
    double h = ideal_lowpass(band.high_hz, fs_hz, m);
    if (band.low_hz > 0.0) h -= ideal_lowpass(band.low_hz, fs_hz, m);
    const double w =
        0.54 - 0.46 * std::cos(2.0 * Rng::kPi * n / static_cast<double>(n_taps - 1));
    k.taps[static_cast<std::size_t>(n)] = h * w;
  }

  // Unit gain at the band center; keeps narrow bands (Mu, Theta) honest.
  const double center = (band.low_hz + band.high_hz) / 2.0;
  const double g = kernel_gain(k, center);
  if (!(g > 0.0)) throw InvalidArgument("band_kernel: degenerate center gain");
  for (double& t : k.taps) t /= g;
  return k;
}

double kernel_gain(const FilterKernel& kernel, double f_hz) {
  std::complex<double> acc(0.0, 0.0);
  const double w = 2.0 * Rng::kPi * f_hz / kernel.fs_hz;
  for (std::size_t n = 0; n < kernel.taps.size(); ++n) {
    acc += kernel.taps[n] *
           std::exp(std::complex<double>(0.0, -w * static_cast<double>(n)));
  }
  return std::abs(acc);
}

RawRecording apply_filter(const FilterKernel& kernel, const RawRecording& recording) {
  if (kernel.fs_hz != recording.fs_hz) {
    throw RateMismatch("apply_filter: kernel and recording sampling rates differ");
  }
  RawRecording out = recording;
  const std::int64_t n = recording.n_samples();
  const std::int64_t taps = static_cast<std::int64_t>(kernel.taps.size());
  const std::int64_t delay = (taps - 1) / 2;
  for (std::size_t ch = 0; ch < recording.n_channels(); ++ch) {
    const double* x = &recording.data.v[ch * recording.data.cols];
    double* y = &out.data.v[ch * out.data.cols];
    for (std::int64_t t = 0; t < n; ++t) {
      double acc = 0.0;
      const std::int64_t base = t + delay;  // group-delay compensation
      const std::int64_t k0 = std::max<std::int64_t>(0, base - (n - 1));
      const std::int64_t k1 = std::min<std::int64_t>(taps - 1, base);
      for (std::int64_t k = k0; k <= k1; ++k) {
        acc += kernel.taps[static_cast<std::size_t>(k)] * x[base - k];
      }
      y[t] = acc;
    }
  }
  return out;
}

RawRecording keep_bands(const RawRecording& recording, const std::set<BandName>& keep,
                        int n_taps) {
  if (keep.empty()) throw EmptyBandSet("keep_bands: empty band set");
  RawRecording out = recording;
  std::fill(out.data.v.begin(), out.data.v.end(), 0.0);
  for (BandName name : keep) {
    const RawRecording part = apply_filter(band_kernel(band(name), recording.fs_hz, n_taps),
                                           recording);
    for (std::size_t i = 0; i < out.data.v.size(); ++i) out.data.v[i] += part.data.v[i];
  }
  return out;
}

EpochSet extract_epochs(const RawRecording& recording, const StimulusSchedule& schedule,
                        const TimeWindow& window, const TimeWindow& baseline) {
  if (recording.fs_hz != schedule.fs_hz) {
    throw RateMismatch("extract_epochs: recording and schedule sampling rates differ");
  }
  const double fs = recording.fs_hz;
  const std::int64_t off = window.first_offset(fs);
  const std::int64_t win = window.n_samples(fs);
  if (win < 1) throw EpochBoundsError("extract_epochs: empty window");
  if (baseline.lo_ms < window.lo_ms || baseline.hi_ms > window.hi_ms || baseline.hi_ms > 0.0) {
    throw EpochBoundsError("extract_epochs: baseline must lie inside the window, pre-stimulus");
  }
  const std::int64_t b0 = baseline.first_offset(fs) - off;
  const std::int64_t b1 = baseline.first_offset(fs) - off + baseline.n_samples(fs);
  if (b0 < 0 || b1 > win || b1 <= b0) {
    throw EpochBoundsError("extract_epochs: degenerate baseline segment");
  }

  EpochSet set;
  set.fs_hz = fs;
  set.epochs.reserve(schedule.events.size());
  const std::size_t n_ch = recording.n_channels();
  for (const auto& ev : schedule.events) {
    const std::int64_t start = ev.onset_sample + off;
    if (start < 0 || start + win > recording.n_samples()) {
      throw EpochBoundsError("extract_epochs: epoch at onset " +
                             std::to_string(ev.onset_sample) + " out of range");
    }
    Epoch ep;
    ep.cls = ev.cls;
    ep.onset_sample = ev.onset_sample;
    ep.data = Matrix(n_ch, static_cast<std::size_t>(win));
    for (std::size_t ch = 0; ch < n_ch; ++ch) {
      double mean = 0.0;
      for (std::int64_t i = b0; i < b1; ++i) {
        mean += recording.data(ch, static_cast<std::size_t>(start + i));
      }
      mean /= static_cast<double>(b1 - b0);
      for (std::int64_t i = 0; i < win; ++i) {
        ep.data(ch, static_cast<std::size_t>(i)) =
            recording.data(ch, static_cast<std::size_t>(start + i)) - mean;
      }
    }
    ep.baseline_corrected = true;
    set.epochs.push_back(std::move(ep));
  }
  return set;
}

ErpAverage average_epochs(const EpochSet& epochs, StimulusClass cls) {
  ErpAverage avg;
  avg.cls = cls;
  for (const auto& ep : epochs.epochs) {
    if (ep.cls != cls) continue;
    if (avg.n_epochs == 0) {
      avg.waveform = ep.data;
    } else {
      if (!avg.waveform.same_shape(ep.data)) {
        throw InvalidArgument("average_epochs: epochs have mixed shapes");
      }
      for (std::size_t i = 0; i < avg.waveform.v.size(); ++i) {
        avg.waveform.v[i] += ep.data.v[i];
      }
    }
    ++avg.n_epochs;
  }
  if (avg.n_epochs == 0) {
    throw EmptyClassError("average_epochs: no epochs of class " + to_string(cls));
  }
  for (double& x : avg.waveform.v) x /= static_cast<double>(avg.n_epochs);
  return avg;
}

RawRecording scalp_to_cortex(const RawRecording& recording, const Montage& montage) {
  montage.validate();
  std::map<std::string, std::size_t> row;
  for (std::size_t ch = 0; ch < recording.channels.size(); ++ch) {
    row[recording.channels[ch]] = ch;
  }
  // Resolve neighbor rows up front so missing channels fail fast.
  std::vector<std::vector<std::size_t>> nb_rows(recording.n_channels());
  for (std::size_t ch = 0; ch < recording.n_channels(); ++ch) {
    auto it = montage.neighbors.find(recording.channels[ch]);
    if (it == montage.neighbors.end()) {
      throw MontageError("scalp_to_cortex: channel " + recording.channels[ch] +
                         " missing from montage");
    }
    for (const auto& nb : it->second) {
      auto r = row.find(nb);
      if (r == row.end()) {
        throw MontageError("scalp_to_cortex: neighbor " + nb + " not in the recording");
      }
      nb_rows[ch].push_back(r->second);
    }
  }
  RawRecording out = recording;
  const std::size_t n = recording.data.cols;
  for (std::size_t ch = 0; ch < recording.n_channels(); ++ch) {
    const double inv = 1.0 / static_cast<double>(nb_rows[ch].size());
    for (std::size_t t = 0; t < n; ++t) {
      double acc = 0.0;
      for (std::size_t r : nb_rows[ch]) acc += recording.data(r, t);
      out.data(ch, t) = recording.data(ch, t) - acc * inv;
    }
  }
  return out;
}

std::pair<EpochSet, std::size_t> denoise(const EpochSet& epochs, double amp_threshold_uv) {
  if (!(amp_threshold_uv > 0.0)) {
    throw InvalidArgument("denoise: threshold must be positive");
  }
  EpochSet kept;
  kept.fs_hz = epochs.fs_hz;
  std::size_t rejected = 0;
  for (const auto& ep : epochs.epochs) {
    double peak = 0.0;
    for (double x : ep.data.v) peak = std::max(peak, std::abs(x));
    if (peak > amp_threshold_uv) {
      ++rejected;
    } else {
      kept.epochs.push_back(ep);
    }
  }
  return {std::move(kept), rejected};
}

}  // namespace pp::dsp
