#include <limits>
#include <set>

#include <omp.h>

#include "doctest.h"
#include "dipoleforge/error.hpp"
#include "dipoleforge/harness.hpp"
#include "dipoleforge/io.hpp"
#include "dipoleforge/synthscene.hpp"
#include "oracles.hpp"

using namespace dipoleforge;
using namespace dipoleforge::harness;

namespace {

const headmodel::HeadModel& coarse_model() {
  static const headmodel::HeadModel m = [] {
    headmodel::HeadModelConfig cfg;
    cfg.grid_spacing = 0.0191;
    return headmodel::HeadModel(cfg);
  }();
  return m;
}

const dipolefit::MusicScanner& coarse_scanner() {
  static const dipolefit::MusicScanner s(coarse_model());
  return s;
}

synthscene::SceneConfig tiny_scene() {
  synthscene::SceneConfig cfg;
  cfg.n_participants = 4;
  cfg.trials_per_class = 12;
  return cfg;
}

std::vector<Participant> dataset(const synthscene::SceneConfig& cfg) {
  std::vector<Participant> out;
  for (std::size_t p = 0; p < cfg.n_participants; ++p)
    out.push_back({"vp" + std::to_string(p),
                   synthscene::generate_virtual_participant(coarse_model(), cfg, p).recording});
  return out;
}

EvalConfig tiny_eval() {
  EvalConfig cfg;
  cfg.k = 4;
  cfg.n_variants = 2;
  cfg.seeds = {0, 1};
  return cfg;
}

}  // namespace

TEST_CASE("subsample_trials") {
  const auto rec = synthscene::generate_virtual_participant(coarse_model(), tiny_scene(), 0).recording;

  SUBCASE("all trials reproduce the recording") {
    // Default layout: 8 s trials with the marker 2 s in, so the segments tile it.
    const auto all = subsample_trials(rec, 12, 5);
    CHECK(all.data == rec.data);
    CHECK(all.markers == rec.markers);
  }
  SUBCASE("one per class") {
    const auto one = subsample_trials(rec, 1, 5);
    REQUIRE(one.markers.size() == 2);
    CHECK(one.samples() == 1600);
    CHECK(one.markers[0].sample == 200);
    CHECK(one.markers[1].sample == 1000);
    std::set<int> labels{one.markers[0].label, one.markers[1].label};
    CHECK(labels == std::set<int>{kLeftHand, kRightHand});
  }
  SUBCASE("segments are copied verbatim") {
    const auto sub = subsample_trials(rec, 3, 9);
    REQUIRE(sub.markers.size() == 6);
    for (std::size_t j = 0; j < sub.markers.size(); ++j) {
      // Find the source trial by content.
      const Eigen::MatrixXd seg = sub.data.middleCols(static_cast<Eigen::Index>(j) * 800, 800);
      bool found = false;
      for (const auto& m : rec.markers)
        if (m.label == sub.markers[j].label && rec.data.middleCols(m.sample - 200, 800) == seg) found = true;
      CHECK(found);
    }
  }
  SUBCASE("seeded") {
    CHECK(subsample_trials(rec, 3, 1).data == subsample_trials(rec, 3, 1).data);
    CHECK(subsample_trials(rec, 3, 1).data != subsample_trials(rec, 3, 2).data);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(subsample_trials(rec, 13, 0), Error);
    CHECK_THROWS_AS(subsample_trials(rec, 0, 0), Error);
    CHECK_THROWS_AS(subsample_trials(rec, 1, 0, TrialSegment{3.0, 6.0}), Error);
  }
}

TEST_CASE("mean and standard error") {
  const auto s = mean_sem({0.5, 0.7});
  CHECK(s.mean == doctest::Approx(0.6));
  CHECK(s.sem == doctest::Approx(0.1));
  const std::vector<double> v{0.61, 0.72, 0.55, 0.9, 0.48};
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), 5);
  const double m = x.mean();
  const double sd = std::sqrt((x.array() - m).square().sum() / 4.0);
  CHECK(mean_sem(v).sem == doctest::Approx(sd / std::sqrt(5.0)));
  CHECK(mean_sem({0.3}).sem == 0.0);
}

TEST_CASE("sign test against the binomial tail") {
  const std::vector<double> base{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  const std::vector<double> aug{0.6, 0.6, 0.6, 0.6, 0.6, 0.4, 0.5, 0.6};
  const auto t = sign_test(base, aug);
  CHECK(t.improved == 6);
  CHECK(t.worsened == 1);
  CHECK(t.ties == 1);
  CHECK(t.p_value == doctest::Approx(oracle::binomial_tail(6, 7)).epsilon(1e-12));
  for (std::size_t n : {10u, 40u, 170u})
    for (std::size_t k : {std::size_t{0}, n / 2, n * 3 / 4, n}) {
      std::vector<double> b(n, 0.0), a(n, -1.0);
      std::fill(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
      CHECK(sign_test(b, a).p_value == doctest::Approx(oracle::binomial_tail(k, n)).epsilon(1e-9));
    }
  CHECK(sign_test({1.0}, {1.0}).p_value == 1.0);
  CHECK_THROWS_AS(sign_test({1.0}, {}), Error);
}

TEST_CASE("summaries rebuild from folds") {
  EvalResult r;
  r.seeds = {3, 4};
  r.folds = {{3, "a", 0.8, 0.9}, {3, "b", 0.6, 0.6}, {4, "a", 0.7, 0.6}, {4, "b", 0.5, 0.7}};
  summarize(r);
  REQUIRE(r.per_participant.size() == 2);
  CHECK(r.per_participant[0].participant == "b");
  CHECK(r.per_participant[0].baseline == doctest::Approx(0.55));
  CHECK(r.per_participant[1].augmented == doctest::Approx(0.75));
  CHECK(r.per_seed[1].seed == 4);
  CHECK(r.per_seed[1].augmented.mean == doctest::Approx(0.65));
  CHECK(r.baseline.mean == doctest::Approx(0.65));
  CHECK(r.baseline.sem == doctest::Approx(0.1));
  CHECK(r.sign_test.improved == 2);
  CHECK(r.sign_test.worsened == 1);
  CHECK(r.sign_test.ties == 1);
}

TEST_CASE("leave-one-subject-out evaluation") {
  const auto data = dataset(tiny_scene());
  const auto cfg = tiny_eval();
  const auto r = loso_evaluate(data, coarse_scanner(), cfg);
  REQUIRE(r.folds.size() == 8);
  CHECK(r.excluded.empty());
  CHECK(r.audits_passed());
  for (std::size_t j = 0; j < r.folds.size(); ++j) {
    const auto& f = r.folds[j];
    CHECK(f.seed == cfg.seeds[j / 4]);
    CHECK(f.participant == data[j % 4].id);
    CHECK(f.train_trials_baseline == 3 * 2 * cfg.k);
    CHECK(f.train_trials_augmented > f.train_trials_baseline);
    CHECK(f.test_trials == 24);
    CHECK(r.audits[j].augmented.size() == 3);
  }
  for (std::size_t i = 1; i < r.per_participant.size(); ++i)
    CHECK(r.per_participant[i - 1].baseline <= r.per_participant[i].baseline);

  SUBCASE("deterministic across thread counts") {
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = io::to_json(loso_evaluate(data, coarse_scanner(), cfg)).dump();
    omp_set_num_threads(4);
    const auto four = io::to_json(loso_evaluate(data, coarse_scanner(), cfg)).dump();
    omp_set_num_threads(before);
    CHECK(one == four);
    CHECK(one == io::to_json(r).dump());
  }
  SUBCASE("N = 1 arms coincide") {
    auto c1 = cfg;
    c1.n_variants = 1;
    const auto r1 = loso_evaluate(data, coarse_scanner(), c1);
    for (const auto& f : r1.folds) {
      CHECK(f.augmented == f.baseline);
      CHECK(f.train_trials_augmented == f.train_trials_baseline);
    }
    CHECK(r1.sign_test.ties == r1.folds.size());
    for (const auto& a : r1.audits) CHECK(a.augmented.empty());
  }
  SUBCASE("test trial cap") {
    auto c = cfg;
    c.n_variants = 1;
    c.test_trials_per_target = 10;
    for (const auto& f : loso_evaluate(data, coarse_scanner(), c).folds) CHECK(f.test_trials == 10);
  }
}

TEST_CASE("a noiseless, unjittered scene is easy") {
  auto scene = tiny_scene();
  scene.n_noise_dipoles = 0;
  scene.snr = std::numeric_limits<double>::infinity();
  scene.voxel_jitter_steps = 0;
  scene.rotation_jitter_deg = 0;
  scene.amplitude_jitter = 0;
  auto cfg = tiny_eval();
  cfg.n_variants = 1;
  const auto r = loso_evaluate(dataset(scene), coarse_scanner(), cfg);
  CHECK(r.baseline.mean >= 0.95);
}

TEST_CASE("participants that fail preprocessing are excluded") {
  auto data = dataset(tiny_scene());
  auto cfg = tiny_eval();
  cfg.n_variants = 1;
  // Too few trials for k = 4.
  auto& short_one = data[1].recording;
  short_one = subsample_trials(short_one, 3, 0);
  const auto r = loso_evaluate(data, coarse_scanner(), cfg);
  REQUIRE(r.excluded.size() == 1);
  CHECK(r.excluded[0].participant == "vp1");
  CHECK(r.folds.size() == 6);
  for (const auto& f : r.folds) CHECK(f.participant != "vp1");

  data.resize(2);
  CHECK_THROWS_WITH_AS(loso_evaluate(data, coarse_scanner(), cfg),
                       doctest::Contains("fewer than 2 participants"), Error);
  data.resize(1);
  CHECK_THROWS_AS(loso_evaluate(data, coarse_scanner(), cfg), Error);
}

TEST_CASE("evaluation configuration errors") {
  EvalConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.n_variants = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
}
