#include "piedpiper/types.hpp"

#include <algorithm>
#include <cstdio>

#include "piedpiper/errors.hpp"

namespace pp {

std::string hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string to_string(StimulusClass c) {
  switch (c) {
    case StimulusClass::Probe: return "Probe";
    case StimulusClass::Target: return "Target";
    case StimulusClass::Irrelevant: return "Irrelevant";
  }
  return "?";
}

StimulusClass stimulus_class_from(std::string_view s) {
  if (s == "Probe") return StimulusClass::Probe;
  if (s == "Target") return StimulusClass::Target;
  if (s == "Irrelevant") return StimulusClass::Irrelevant;
  throw InvalidArgument("unknown stimulus class '" + std::string(s) + "'");
}

std::string to_string(SubjectClass c) {
  return c == SubjectClass::Knowledgeable ? "Knowledgeable" : "NotKnowledgeable";
}

SubjectClass subject_class_from(std::string_view s) {
  if (s == "Knowledgeable") return SubjectClass::Knowledgeable;
  if (s == "NotKnowledgeable") return SubjectClass::NotKnowledgeable;
  throw InvalidArgument("unknown subject class '" + std::string(s) + "'");
}

std::string to_string(BandName b) {
  switch (b) {
    case BandName::Alpha: return "Alpha";
    case BandName::Mu: return "Mu";
    case BandName::Beta: return "Beta";
    case BandName::Theta: return "Theta";
    case BandName::Delta: return "Delta";
  }
  return "?";
}

BandName band_name_from(std::string_view s) {
  if (s == "Alpha") return BandName::Alpha;
  if (s == "Mu") return BandName::Mu;
  if (s == "Beta") return BandName::Beta;
  if (s == "Theta") return BandName::Theta;
  if (s == "Delta") return BandName::Delta;
  throw InvalidArgument("unknown band '" + std::string(s) + "'");
}

const std::array<BandSpec, 5>& canonical_bands() {
  static const std::array<BandSpec, 5> table = {{
      {BandName::Alpha, 8.0, 12.0},
      {BandName::Mu, 9.0, 11.0},
      {BandName::Beta, 14.0, 30.0},
      {BandName::Theta, 4.0, 7.0},
      {BandName::Delta, 0.0, 3.0},
  }};
  return table;
}

const BandSpec& band(BandName name) {
  for (const auto& b : canonical_bands()) {
    if (b.name == name) return b;
  }
  throw InvalidArgument("band not in canonical table");
}

double band_tone_hz(const BandSpec& spec) {
  return std::sqrt(std::max(spec.low_hz, 1.0) * spec.high_hz);
}

namespace {

void check_bump(const char* what, double latency_ms, double width_ms,
                const TimeWindow& window) {
  if (!(latency_ms > 0.0) || !std::isfinite(latency_ms) || !(width_ms > 0.0) ||
      !std::isfinite(width_ms)) {
    throw InvalidArgument(std::string(what) + ": latency/width must be positive finite");
  }
  if (latency_ms - width_ms / 2.0 < window.lo_ms ||
      latency_ms + width_ms / 2.0 > window.hi_ms) {
    throw InvalidArgument(std::string(what) + ": bump does not fit inside the epoch window");
  }
}

}  // namespace

void SubjectProfile::validate(const TimeWindow& window) const {
  for (double a : erp_amplitude_uv) {
    if (!std::isfinite(a) || a < 0.0) {
      throw InvalidArgument("profile " + subject_id + ": amplitudes must be finite and >= 0");
    }
  }
  check_bump("erp", erp_latency_ms, erp_width_ms, window);
  if (evoked_common_uv != 0.0) {
    if (!std::isfinite(evoked_common_uv) || evoked_common_uv < 0.0) {
      throw InvalidArgument("profile " + subject_id + ": evoked_common_uv must be finite and >= 0");
    }
    check_bump("evoked", evoked_latency_ms, evoked_width_ms, window);
  }
  for (const auto& [name, power] : background_band_power) {
    if (!std::isfinite(power) || power < 0.0) {
      throw InvalidArgument("profile " + subject_id + ": band power for " + to_string(name) +
                            " must be finite and >= 0");
    }
  }
  const double p = amplitude(StimulusClass::Probe);
  const double t = amplitude(StimulusClass::Target);
  const double i = amplitude(StimulusClass::Irrelevant);
  if (cls == SubjectClass::Knowledgeable) {
    if (!(p == t && t > i)) {
      throw InvalidArgument("profile " + subject_id +
                            ": knowledgeable requires amp(Probe) = amp(Target) > amp(Irrelevant)");
    }
  } else {
    if (!(t > p && p == i)) {
      throw InvalidArgument("profile " + subject_id +
                            ": not-knowledgeable requires amp(Target) > amp(Probe) = amp(Irrelevant)");
    }
  }
}

namespace {

BandPowers default_band_powers() {
  return {{BandName::Alpha, 0.5},
          {BandName::Mu, 0.25},
          {BandName::Beta, 0.125},
          {BandName::Theta, 0.25},
          {BandName::Delta, 0.25}};
}

}  // namespace

SubjectProfile knowledgeable_profile(std::string subject_id) {
  SubjectProfile p;
  p.subject_id = std::move(subject_id);
  p.cls = SubjectClass::Knowledgeable;
  p.erp_amplitude_uv = {kAmpLargeUv, kAmpLargeUv, kAmpSmallUv};
  p.background_band_power = default_band_powers();
  return p;
}

SubjectProfile not_knowledgeable_profile(std::string subject_id) {
  SubjectProfile p;
  p.subject_id = std::move(subject_id);
  p.cls = SubjectClass::NotKnowledgeable;
  p.erp_amplitude_uv = {kAmpSmallUv, kAmpLargeUv, kAmpSmallUv};
  p.background_band_power = default_band_powers();
  return p;
}

void StimulusSchedule::validate(const TimeWindow& window) const {
  if (!(fs_hz > 0.0)) throw InvalidArgument("schedule: fs_hz must be positive");
  const std::int64_t off = window.first_offset(fs_hz);
  const std::int64_t win = window.n_samples(fs_hz);
  std::int64_t prev = -1;
  bool first = true;
  for (const auto& ev : events) {
    if (!first && ev.onset_sample <= prev) {
      throw InvalidArgument("schedule: onsets must be strictly increasing");
    }
    if (!first && ev.onset_sample - prev < win) {
      throw OverlapError("schedule: inter-stimulus gap shorter than the epoch window");
    }
    if (ev.onset_sample + off < 0 || ev.onset_sample + off + win > n_samples) {
      throw InvalidArgument("schedule: epoch window falls outside the recording");
    }
    prev = ev.onset_sample;
    first = false;
  }
}

void Montage::validate() const {
  for (const auto& ch : channels) {
    auto it = neighbors.find(ch);
    if (it == neighbors.end() || it->second.empty()) {
      throw MontageError("montage: channel " + ch + " has no neighbors");
    }
    for (const auto& nb : it->second) {
      if (nb == ch) throw MontageError("montage: channel " + ch + " neighbors itself");
      auto back = neighbors.find(nb);
      if (back == neighbors.end() ||
          std::find(back->second.begin(), back->second.end(), ch) == back->second.end()) {
        throw MontageError("montage: neighbor relation not symmetric for " + ch + "/" + nb);
      }
    }
  }
}

Montage make_chain_montage(const std::vector<std::string>& channels) {
  if (channels.size() < 2) throw MontageError("chain montage needs at least two channels");
  Montage m;
  m.channels = channels;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    std::vector<std::string> nb;
    if (i > 0) nb.push_back(channels[i - 1]);
    if (i + 1 < channels.size()) nb.push_back(channels[i + 1]);
    m.neighbors[channels[i]] = std::move(nb);
  }
  return m;
}

Montage default_scalp_montage(const std::vector<std::string>& channels) {
  // Physical order ... c5 c3 c1 c0 c2 c4 ...: index 0 sits mid-array.
  std::vector<std::string> order;
  order.reserve(channels.size());
  for (std::size_t i = channels.size(); i-- > 0;) {
    if (i % 2 == 1) order.push_back(channels[i]);
  }
  for (std::size_t i = 0; i < channels.size(); i += 2) {
    order.push_back(channels[i]);
  }
  return make_chain_montage(order);
}

std::vector<std::string> default_channel_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
  return ids;
}

}  // namespace pp
