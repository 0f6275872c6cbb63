#include "dipoleforge/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "dipoleforge/error.hpp"
#include "dipoleforge/rng.hpp"

namespace dipoleforge::harness {

void EvalConfig::validate() const {
  if (k < 1) misconfigured("k must be >= 1");
  if (n_variants < 1) misconfigured("n_variants must be >= 1");
  if (seeds.empty()) misconfigured("at least one seed is required");
  if (!(segment.before_s >= 0.0 && segment.after_s > 0.0))
    misconfigured("trial segment must extend after the marker");
  auto aug = augmentation;
  aug.n_variants = n_variants;
  aug.validate();
}

MultichannelRecording subsample_trials(const MultichannelRecording& rec, std::size_t k,
                                       std::uint64_t seed, const TrialSegment& segment) {
  rec.validate();
  if (k < 1) reject("k must be >= 1");
  const auto before = static_cast<std::int64_t>(std::llround(segment.before_s * rec.sample_rate));
  const auto after = static_cast<std::int64_t>(std::llround(segment.after_s * rec.sample_rate));
  const std::int64_t length = before + after;

  std::mt19937_64 gen(seed);
  std::vector<std::size_t> chosen;
  for (int label : {kLeftHand, kRightHand}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rec.markers.size(); ++i)
      if (rec.markers[i].label == label) idx.push_back(i);
    if (idx.size() < k)
      reject("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
             " trials, " + std::to_string(k) + " requested");
    std::shuffle(idx.begin(), idx.end(), gen);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(chosen.begin(), chosen.end());

  Eigen::MatrixXd data(rec.channels(), static_cast<Eigen::Index>(length) *
                                           static_cast<Eigen::Index>(chosen.size()));
  MultichannelRecording out = with_data(rec, Eigen::MatrixXd());
  out.markers.clear();
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const auto& m = rec.markers[chosen[j]];
    const auto start = m.sample - before;
    if (start < 0 || start + length > rec.samples())
      reject("trial segment around marker " + std::to_string(chosen[j]) +
             " extends beyond the recording");
    const auto dst = static_cast<Eigen::Index>(j) * length;
    data.middleCols(dst, length) = rec.data.middleCols(start, length);
    out.markers.push_back({dst + before, m.label});
  }
  out.data = std::move(data);
  out.metadata["subsample_k"] = std::to_string(k);
  out.metadata["subsample_seed"] = std::to_string(seed);
  return out;
}

ArmSummary mean_sem(const std::vector<double>& values) {
  ArmSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

SignTest sign_test(const std::vector<double>& baseline, const std::vector<double>& augmented) {
  if (baseline.size() != augmented.size()) reject("sign test needs paired samples");
  SignTest t;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (augmented[i] > baseline[i]) ++t.improved;
    else if (augmented[i] < baseline[i]) ++t.worsened;
    else ++t.ties;
  }
  const std::size_t n = t.improved + t.worsened;
  if (n == 0) return t;
  // P(X >= improved), X ~ Binomial(n, 1/2)
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  double p = 0.0;
  for (std::size_t i = t.improved; i <= n; ++i)
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                  log_half_n);
  t.p_value = std::min(p, 1.0);
  return t;
}

bool EvalResult::audits_passed() const {
  return !audits.empty() &&
         std::all_of(audits.begin(), audits.end(), [](const FoldAudit& a) { return a.passed; });
}

namespace {

struct PreparedTrain {
  classify::FeatureSet original;
  classify::FeatureSet generated;  // empty when N = 1
  std::uint64_t subsample_hash = 0;
  std::string error;
};

void append(Eigen::MatrixXd& x, std::vector<int>& y, const classify::FeatureSet& f) {
  if (f.features.rows() == 0) return;
  const auto r = x.rows();
  x.conservativeResize(r + f.features.rows(), f.features.cols());
  x.bottomRows(f.features.rows()) = f.features;
  y.insert(y.end(), f.labels.begin(), f.labels.end());
}

classify::FeatureSet concat(const std::vector<classify::FeatureSet>& sets) {
  classify::FeatureSet out;
  for (const auto& s : sets) {
    if (out.channel_labels.empty()) out.channel_labels = s.channel_labels;
    append(out.features, out.labels, s);
  }
  return out;
}

double fold_accuracy(const Eigen::MatrixXd& x, const std::vector<int>& y,
                     const classify::FeatureSet& test) {
  const auto model = classify::lda_train(x, y);
  return classify::accuracy(classify::lda_predict(model, test.features).labels, test.labels);
}

}  // namespace

EvalResult loso_evaluate(const std::vector<Participant>& dataset,
                         const dipolefit::MusicScanner& scanner, const EvalConfig& cfg) {
  cfg.validate();
  if (dataset.size() < 2) reject("leave-one-subject-out needs at least 2 participants");
  const std::size_t P = dataset.size();
  const std::size_t S = cfg.seeds.size();

  std::vector<std::uint64_t> hash_before(P);
  for (std::size_t p = 0; p < P; ++p) hash_before[p] = content_hash(dataset[p].recording);

  // Test sets: every original trial of each participant.
  std::vector<classify::FeatureSet> test(P);
  std::vector<std::string> failure(P);
  const auto np = static_cast<std::ptrdiff_t>(P);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < np; ++i) {
    const auto p = static_cast<std::size_t>(i);
    try {
      test[p] = classify::compute_features(dataset[p].recording, cfg.features);
      const auto m = cfg.test_trials_per_target;
      if (m > 0 && m < test[p].labels.size()) {
        test[p].features.conservativeResize(static_cast<Eigen::Index>(m), Eigen::NoChange);
        test[p].labels.resize(m);
      }
    } catch (const std::exception& e) {
      failure[p] = e.what();
    }
  }

  // Training material per (seed, participant): the k-trial subsample and the
  // generated trials derived from it alone.
  std::vector<PreparedTrain> train(S * P);
  const auto jobs = static_cast<std::ptrdiff_t>(S * P);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < jobs; ++j) {
    const auto s = static_cast<std::size_t>(j) / P;
    const auto p = static_cast<std::size_t>(j) % P;
    auto& slot = train[static_cast<std::size_t>(j)];
    try {
      const auto seed = cfg.seeds[s];
      const auto sub = subsample_trials(dataset[p].recording, cfg.k, derive_seed(seed, {p, 0}),
                                        cfg.segment);
      slot.subsample_hash = content_hash(sub);
      slot.original = classify::compute_features(sub, cfg.features);
      if (cfg.n_variants > 1) {
        auto aug_cfg = cfg.augmentation;
        aug_cfg.n_variants = cfg.n_variants;
        aug_cfg.seed = derive_seed(seed, {p, 1});
        const auto generated = augment::generate_participant(sub, scanner, aug_cfg, cfg.bands);
        std::vector<classify::FeatureSet> sets;
        for (const auto& v : generated.variants)
          sets.push_back(classify::compute_features(v, cfg.features));
        slot.generated = concat(sets);
      }
    } catch (const std::exception& e) {
      slot.error = "seed " + std::to_string(cfg.seeds[s]) + ": " + e.what();
    }
  }

  EvalResult result;
  result.k = cfg.k;
  result.n_variants = cfg.n_variants;
  result.seeds = cfg.seeds;
  std::vector<bool> included(P, true);
  for (std::size_t p = 0; p < P; ++p) {
    std::string reason = failure[p];
    for (std::size_t s = 0; s < S && reason.empty(); ++s) reason = train[s * P + p].error;
    if (!reason.empty()) {
      included[p] = false;
      result.excluded.push_back({dataset[p].id, reason});
    }
  }
  const auto remaining = static_cast<std::size_t>(std::count(included.begin(), included.end(), true));
  if (remaining < 2)
    reject("fewer than 2 participants survived preprocessing (" + std::to_string(remaining) + ")");

  std::vector<std::size_t> targets;
  for (std::size_t p = 0; p < P; ++p)
    if (included[p]) targets.push_back(p);
  const std::size_t T = targets.size();
  result.folds.resize(S * T);
  result.audits.resize(S * T);
  std::vector<std::string> fold_error(S * T);
  const auto folds = static_cast<std::ptrdiff_t>(S * T);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < folds; ++j) {
    const auto s = static_cast<std::size_t>(j) / T;
    const auto target = targets[static_cast<std::size_t>(j) % T];
    auto& fold = result.folds[static_cast<std::size_t>(j)];
    auto& audit = result.audits[static_cast<std::size_t>(j)];
    fold.seed = audit.seed = cfg.seeds[s];
    fold.participant = audit.target = dataset[target].id;
    audit.hash_before = hash_before[target];
    try {
      Eigen::MatrixXd x;
      std::vector<int> y;
      for (std::size_t q : targets)
        if (q != target) append(x, y, train[s * P + q].original);
      fold.train_trials_baseline = y.size();
      fold.baseline = fold_accuracy(x, y, test[target]);

      for (std::size_t q : targets) {
        if (q == target || train[s * P + q].generated.labels.empty()) continue;
        append(x, y, train[s * P + q].generated);
        audit.augmented.push_back(dataset[q].id);
      }
      fold.train_trials_augmented = y.size();
      fold.augmented = fold_accuracy(x, y, test[target]);
      fold.test_trials = test[target].labels.size();
    } catch (const std::exception& e) {
      fold_error[static_cast<std::size_t>(j)] = e.what();
    }
    audit.hash_after = content_hash(dataset[target].recording);
    audit.passed = audit.hash_before == audit.hash_after &&
                   std::find(audit.augmented.begin(), audit.augmented.end(), audit.target) ==
                       audit.augmented.end();
  }
  for (const auto& e : fold_error)
    if (!e.empty()) throw Error(ErrorKind::RejectedInput, "fold failed: " + e);

  summarize(result);
  return result;
}

void summarize(EvalResult& result) {
  std::vector<std::string> ids;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_participant;
  std::vector<double> all_base, all_aug;
  result.per_seed.clear();
  for (auto seed : result.seeds) {
    std::vector<double> base, aug;
    for (const auto& f : result.folds) {
      if (f.seed != seed) continue;
      base.push_back(f.baseline);
      aug.push_back(f.augmented);
    }
    result.per_seed.push_back({seed, mean_sem(base), mean_sem(aug)});
  }
  for (const auto& f : result.folds) {
    if (!by_participant.contains(f.participant)) ids.push_back(f.participant);
    by_participant[f.participant].first.push_back(f.baseline);
    by_participant[f.participant].second.push_back(f.augmented);
    all_base.push_back(f.baseline);
    all_aug.push_back(f.augmented);
  }
  result.per_participant.clear();
  std::vector<double> pb, pa;
  for (const auto& id : ids) {
    const auto& [b, a] = by_participant[id];
    ParticipantSummary ps{id, mean_sem(b).mean, mean_sem(a).mean};
    pb.push_back(ps.baseline);
    pa.push_back(ps.augmented);
    result.per_participant.push_back(ps);
  }
  std::stable_sort(result.per_participant.begin(), result.per_participant.end(),
                   [](const ParticipantSummary& x, const ParticipantSummary& y) {
                     return x.baseline < y.baseline;
                   });
  result.baseline = mean_sem(pb);
  result.augmented = mean_sem(pa);
  result.sign_test = sign_test(all_base, all_aug);
}

}  // namespace dipoleforge::harness
