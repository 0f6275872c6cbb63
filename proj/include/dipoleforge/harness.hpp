#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dipoleforge/augment.hpp"
#include "dipoleforge/classify.hpp"
#include "dipoleforge/dipolefit.hpp"
#include "dipoleforge/recording.hpp"
#include "dipoleforge/ssd.hpp"

namespace dipoleforge::harness {

/// Trial segment kept by subsample_trials, relative to each marker.
struct TrialSegment {
  double before_s = 2.0;
  double after_s = 6.0;
};

struct EvalConfig {
  std::size_t k = 15;          // trials per class per training participant
  std::size_t n_variants = 5;  // N
  std::size_t test_trials_per_target = 0;  // 0 = all
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  TrialSegment segment;
  augment::AugmentationConfig augmentation;  // n_variants and seed are set per run
  ssd::SsdBands bands;
  classify::FeatureConfig features;

  void validate() const;
};

struct Participant {
  std::string id;
  MultichannelRecording recording;
};

/// k markers per class chosen uniformly without replacement; the selected
/// trial segments are concatenated in marker order and the markers are
/// re-based onto the new time axis.
MultichannelRecording subsample_trials(const MultichannelRecording& rec, std::size_t k,
                                       std::uint64_t seed, const TrialSegment& segment = {});

struct FoldAudit {
  std::uint64_t seed = 0;
  std::string target;
  std::uint64_t hash_before = 0;
  std::uint64_t hash_after = 0;
  std::vector<std::string> augmented;  // participants whose generated trials entered training
  bool passed = false;
};

struct FoldResult {
  std::uint64_t seed = 0;
  std::string participant;
  double baseline = 0.0;
  double augmented = 0.0;
  std::size_t train_trials_baseline = 0;
  std::size_t train_trials_augmented = 0;
  std::size_t test_trials = 0;
};

struct ArmSummary {
  double mean = 0.0;
  double sem = 0.0;
};

struct SeedSummary {
  std::uint64_t seed = 0;
  ArmSummary baseline;
  ArmSummary augmented;
};

struct ParticipantSummary {
  std::string participant;
  double baseline = 0.0;   // mean over seeds
  double augmented = 0.0;  // mean over seeds
};

struct SignTest {
  std::size_t improved = 0;
  std::size_t worsened = 0;
  std::size_t ties = 0;
  double p_value = 1.0;  // one-sided, H1: augmented > baseline
};

struct Exclusion {
  std::string participant;
  std::string reason;
};

struct EvalResult {
  std::size_t k = 0;
  std::size_t n_variants = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<FoldResult> folds;  // ordered by (seed, participant)
  std::vector<FoldAudit> audits;
  std::vector<SeedSummary> per_seed;
  std::vector<ParticipantSummary> per_participant;  // ascending baseline accuracy
  ArmSummary baseline;   // over per-participant means
  ArmSummary augmented;
  SignTest sign_test;    // over (participant, seed) pairs
  std::vector<Exclusion> excluded;
  bool audits_passed() const;
};

ArmSummary mean_sem(const std::vector<double>& values);

/// One-sided exact binomial sign test with ties dropped.
SignTest sign_test(const std::vector<double>& baseline, const std::vector<double>& augmented);

/// Leave-one-subject-out comparison of the baseline (originals only) and
/// augmented (originals plus generated trials) training sets.
EvalResult loso_evaluate(const std::vector<Participant>& dataset,
                         const dipolefit::MusicScanner& scanner, const EvalConfig& cfg);

/// Rebuilds the summaries (per seed, per participant, pooled, sign test)
/// from `result.folds`.
void summarize(EvalResult& result);

}  // namespace dipoleforge::harness
