#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "piedpiper/types.hpp"

namespace pp::mera {

struct BootstrapConfig {
  std::size_t iterations = 1000;
  double present_threshold = 0.9;
  double absent_threshold = 0.1;
  std::uint64_t seed = 0;
  std::size_t channel = 0;  // the single channel the verdict statistic uses
};

enum class Determination { InformationPresent, InformationAbsent, Indeterminate };

std::string to_string(Determination d);

struct MeraVerdict {
  Determination determination = Determination::Indeterminate;
  double present_fraction = 0.0;
  std::size_t iterations = 0;
};

/// Pearson correlation coefficient. Inputs must have equal length >= 2 and
/// neither may be constant (DegenerateInput).
double correlate(std::span<const double> a, std::span<const double> b);

/// Bootstrapped determination: every iteration resamples each class with
/// replacement, averages per class on the designated channel, and scores
/// correlate(Probe,Target) > correlate(Probe,Irrelevant). The fraction of
/// winning iterations against the thresholds decides the verdict.
MeraVerdict bootstrap_verdict(const EpochSet& epochs, const BootstrapConfig& config);

struct CohortEntry {
  SubjectClass label = SubjectClass::Knowledgeable;
  std::array<double, 3> stat{};  // per-stimulus scalar, indexed by StimulusClass
};

struct StimulusDiscriminability {
  std::array<double, 3> per_class_auc{};
  StimulusClass best = StimulusClass::Probe;
};

/// ROC AUC (Mann-Whitney, ties 0.5) of each stimulus statistic as a separator
/// of Knowledgeable vs NotKnowledgeable; best is the argmax, ties broken in
/// Probe, Target, Irrelevant order.
StimulusDiscriminability discriminability(const std::vector<CohortEntry>& cohort);

}  // namespace pp::mera
