#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "piedpiper/dsp.hpp"
#include "piedpiper/errors.hpp"
#include "piedpiper/mera.hpp"
#include "piedpiper/synth.hpp"

using namespace pp;
using namespace pp::mera;

namespace {

Epoch waveform_epoch(StimulusClass cls, const std::vector<double>& samples) {
  Epoch ep;
  ep.cls = cls;
  ep.data = Matrix(1, samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) ep.data(0, i) = samples[i];
  return ep;
}

std::vector<double> bump(double amp, std::size_t center, std::size_t width, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(center);
    if (std::abs(d) <= static_cast<double>(width) / 2.0) {
      out[i] = amp * 0.5 * (1.0 + std::cos(2.0 * oracle::kPi * d / static_cast<double>(width)));
    }
  }
  return out;
}

EpochSet three_class_set(const std::vector<double>& probe, const std::vector<double>& target,
                         const std::vector<double>& irrelevant, std::size_t copies = 3) {
  EpochSet set;
  set.fs_hz = 256.0;
  for (std::size_t i = 0; i < copies; ++i) {
    set.epochs.push_back(waveform_epoch(StimulusClass::Probe, probe));
    set.epochs.push_back(waveform_epoch(StimulusClass::Target, target));
    set.epochs.push_back(waveform_epoch(StimulusClass::Irrelevant, irrelevant));
  }
  return set;
}

}  // namespace

TEST_CASE("correlate: self, sign flip, and a hand-computed value") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> neg = x;
  for (auto& v : neg) v = -v;
  CHECK(correlate(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlate(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> y = {1.0, 2.0, 3.0, 5.0};
  // Direct Pearson formula: cov = 6.5/4, sx^2 = 5/4, sy^2 = 8.75/4.
  const double expected = 6.5 / std::sqrt(5.0 * 8.75);
  CHECK(correlate(x, y) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(correlate(x, y) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("correlate is symmetric and invariant to positive affine maps") {
  Rng rng(42);
  std::vector<double> a(64), b(64);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.gauss();
    b[i] = rng.gauss();
  }
  const double r = correlate(a, b);
  CHECK(correlate(b, a) == doctest::Approx(r).epsilon(1e-12));
  std::vector<double> scaled = a;
  for (auto& v : scaled) v = 3.5 * v + 2.0;
  CHECK(correlate(scaled, b) == doctest::Approx(r).epsilon(1e-12));
  CHECK(r >= -1.0);
  CHECK(r <= 1.0);
}

TEST_CASE("correlate rejects degenerate input") {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> flat = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(correlate(x, flat), DegenerateInput);
  CHECK_THROWS_AS(correlate(flat, x), DegenerateInput);
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(correlate(one, one), InvalidArgument);
}

TEST_CASE("bootstrap_verdict: noiseless knowledgeable structure is Present") {
  const auto p300 = bump(10.0, 120, 50, 230);
  const auto early = bump(10.0, 40, 40, 230);  // shape-distinct irrelevant response
  const auto set = three_class_set(p300, p300, early);
  BootstrapConfig cfg;
  cfg.iterations = 200;
  cfg.seed = 9;
  const auto v = bootstrap_verdict(set, cfg);
  CHECK(v.present_fraction == 1.0);
  CHECK(v.determination == Determination::InformationPresent);
  CHECK(v.iterations == 200);

  // Noiseless separable data keeps its determination under any seed.
  cfg.seed = 12345;
  CHECK(bootstrap_verdict(set, cfg).determination == Determination::InformationPresent);
}

TEST_CASE("bootstrap_verdict: noiseless not-knowledgeable structure is Absent") {
  const auto small = bump(2.0, 40, 40, 230);
  const auto p300 = bump(10.0, 120, 50, 230);
  const auto set = three_class_set(small, p300, small);  // Probe == Irrelevant
  BootstrapConfig cfg;
  cfg.iterations = 200;
  cfg.seed = 10;
  const auto v = bootstrap_verdict(set, cfg);
  CHECK(v.present_fraction == 0.0);
  CHECK(v.determination == Determination::InformationAbsent);
}

TEST_CASE("bootstrap_verdict: default synthetic knowledgeable subject is Present") {
  using namespace pp::synth;
  using namespace pp::dsp;
  const auto profile = knowledgeable_profile("k01");
  const auto sched = make_schedule(100, kDefaultRatios, 1000.0, 256.0, 1);
  const auto rec = synth_recording(profile, sched, 2, 5.0, 1);
  const auto set = pp::dsp::extract_epochs(rec, sched, kEpochWindow, kBaselineWindow);
  BootstrapConfig cfg;
  cfg.seed = 1;
  const auto v = bootstrap_verdict(set, cfg);
  CHECK(v.determination == Determination::InformationPresent);
  CHECK(v.present_fraction >= 0.9);
}

TEST_CASE("bootstrap_verdict is deterministic and scale-invariant") {
  const auto p300 = bump(10.0, 120, 50, 230);
  const auto early = bump(4.0, 40, 40, 230);
  auto set = three_class_set(p300, p300, early, 4);
  // Perturb epochs so resampling actually matters.
  Rng rng(3);
  for (auto& ep : set.epochs) {
    for (auto& v : ep.data.v) v += 0.5 * rng.gauss();
  }
  BootstrapConfig cfg;
  cfg.iterations = 300;
  cfg.seed = 77;
  const auto a = bootstrap_verdict(set, cfg);
  const auto b = bootstrap_verdict(set, cfg);
  CHECK(a.present_fraction == b.present_fraction);
  CHECK(a.determination == b.determination);

  auto scaled = set;
  for (auto& ep : scaled.epochs) {
    for (auto& v : ep.data.v) v *= 4.25;
  }
  const auto c = bootstrap_verdict(scaled, cfg);
  CHECK(c.present_fraction == a.present_fraction);
}

TEST_CASE("bootstrap_verdict propagates degenerate and missing-class errors") {
  const std::vector<double> zero(64, 0.0);
  auto set = three_class_set(zero, zero, zero);
  BootstrapConfig cfg;
  cfg.iterations = 5;
  CHECK_THROWS_AS(bootstrap_verdict(set, cfg), DegenerateInput);

  EpochSet missing;
  missing.fs_hz = 256.0;
  missing.epochs.push_back(waveform_epoch(StimulusClass::Probe, {1.0, 2.0}));
  missing.epochs.push_back(waveform_epoch(StimulusClass::Probe, {1.0, 2.0}));
  missing.epochs.push_back(waveform_epoch(StimulusClass::Target, {1.0, 2.0}));
  missing.epochs.push_back(waveform_epoch(StimulusClass::Target, {1.0, 2.0}));
  missing.epochs.push_back(waveform_epoch(StimulusClass::Irrelevant, {1.0, 2.0}));
  CHECK_THROWS_AS(bootstrap_verdict(missing, cfg), EmptyClassError);
}

TEST_CASE("discriminability: separated probe, tied target") {
  std::vector<CohortEntry> cohort;
  for (int i = 0; i < 5; ++i) {
    cohort.push_back({SubjectClass::Knowledgeable, {10.0 + 0.1 * i, 3.0, 1.0}});
    cohort.push_back({SubjectClass::NotKnowledgeable, {2.0 + 0.1 * i, 3.0, 1.0}});
  }
  const auto d = discriminability(cohort);
  CHECK(d.per_class_auc[0] == 1.0);
  CHECK(d.per_class_auc[1] == 0.5);  // identical statistic -> all ties
  CHECK(d.per_class_auc[2] == 0.5);
  CHECK(d.best == StimulusClass::Probe);
}

TEST_CASE("discriminability tie-break prefers the earlier class") {
  std::vector<CohortEntry> cohort = {
      {SubjectClass::Knowledgeable, {5.0, 5.0, 5.0}},
      {SubjectClass::NotKnowledgeable, {1.0, 1.0, 1.0}},
  };
  const auto d = discriminability(cohort);
  CHECK(d.per_class_auc[0] == 1.0);
  CHECK(d.per_class_auc[1] == 1.0);
  CHECK(d.best == StimulusClass::Probe);
}

TEST_CASE("discriminability rejects single-class cohorts") {
  std::vector<CohortEntry> cohort = {{SubjectClass::Knowledgeable, {1.0, 2.0, 3.0}}};
  CHECK_THROWS_AS(discriminability(cohort), CohortError);
}
