#include "piedpiper/mera.hpp"

#include <algorithm>
#include <cmath>

#include "piedpiper/errors.hpp"

namespace pp::mera {

std::string to_string(Determination d) {
  switch (d) {
    case Determination::InformationPresent: return "InformationPresent";
    case Determination::InformationAbsent: return "InformationAbsent";
    case Determination::Indeterminate: return "Indeterminate";
  }
  return "?";
}

double correlate(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidArgument("correlate: inputs must have equal length >= 2");
  }
  const auto constant = [](std::span<const double> x) {
    for (double v : x) {
      if (v != x[0]) return false;
    }
    return true;
  };
  if (constant(a) || constant(b)) {
    throw DegenerateInput("correlate: constant input");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

MeraVerdict bootstrap_verdict(const EpochSet& epochs, const BootstrapConfig& config) {
  if (config.iterations < 1) throw InvalidArgument("bootstrap_verdict: iterations must be >= 1");
  if (!(config.absent_threshold >= 0.0 && config.absent_threshold < config.present_threshold &&
        config.present_threshold <= 1.0)) {
    throw InvalidArgument("bootstrap_verdict: thresholds out of order");
  }

  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < epochs.epochs.size(); ++i) {
    members[static_cast<std::size_t>(epochs.epochs[i].cls)].push_back(i);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    if (members[c].size() < 2) {
      throw EmptyClassError("bootstrap_verdict: need >= 2 epochs of class " +
                            to_string(kStimulusClasses[c]));
    }
  }
  const std::size_t win = epochs.window_samples();
  if (config.channel >= epochs.n_channels()) {
    throw InvalidArgument("bootstrap_verdict: designated channel out of range");
  }

  std::array<std::vector<double>, 3> mean;
  std::size_t wins = 0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    Rng rng(Rng::mix(config.seed, it));
    for (std::size_t c = 0; c < 3; ++c) {
      mean[c].assign(win, 0.0);
      const auto& idx = members[c];
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const Epoch& ep = epochs.epochs[idx[rng.below(idx.size())]];
        const double* row = &ep.data.v[config.channel * ep.data.cols];
        for (std::size_t s = 0; s < win; ++s) mean[c][s] += row[s];
      }
      const double inv = 1.0 / static_cast<double>(idx.size());
      for (double& v : mean[c]) v *= inv;
    }
    const double r_pt = correlate(mean[0], mean[1]);
    const double r_pi = correlate(mean[0], mean[2]);
    if (r_pt > r_pi) ++wins;
  }

  MeraVerdict v;
  v.iterations = config.iterations;
  v.present_fraction = static_cast<double>(wins) / static_cast<double>(config.iterations);
  if (v.present_fraction >= config.present_threshold) {
    v.determination = Determination::InformationPresent;
  } else if (v.present_fraction <= config.absent_threshold) {
    v.determination = Determination::InformationAbsent;
  } else {
    v.determination = Determination::Indeterminate;
  }
  return v;
}

StimulusDiscriminability discriminability(const std::vector<CohortEntry>& cohort) {
  std::size_t n_k = 0, n_nk = 0;
  for (const auto& e : cohort) {
    (e.label == SubjectClass::Knowledgeable ? n_k : n_nk)++;
  }
  if (n_k == 0 || n_nk == 0) {
    throw CohortError("discriminability: cohort must contain both classes");
  }
  StimulusDiscriminability out;
  for (std::size_t c = 0; c < 3; ++c) {
    double score = 0.0;
    for (const auto& k : cohort) {
      if (k.label != SubjectClass::Knowledgeable) continue;
      for (const auto& n : cohort) {
        if (n.label != SubjectClass::NotKnowledgeable) continue;
        if (k.stat[c] > n.stat[c]) {
          score += 1.0;
        } else if (k.stat[c] == n.stat[c]) {
          score += 0.5;
        }
      }
    }
    out.per_class_auc[c] = score / (static_cast<double>(n_k) * static_cast<double>(n_nk));
  }
  out.best = StimulusClass::Probe;
  for (std::size_t c = 1; c < 3; ++c) {
    if (out.per_class_auc[c] > out.per_class_auc[static_cast<std::size_t>(out.best)]) {
      out.best = kStimulusClasses[c];
    }
  }
  return out;
}

}  // namespace pp::mera
