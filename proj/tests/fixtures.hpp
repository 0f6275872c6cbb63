#pragma once

// Small synthetic recordings shared by the unit tests and the acceptance
// binary. Built from first principles, not from synthscene.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "dipoleforge/recording.hpp"
#include "oracles.hpp"

namespace fixture {

/// A planted 10 Hz oscillation mixed into `channels` channels on top of
/// full-rank white background. `source` is the planted time course.
struct PlantedScene {
  dipoleforge::MultichannelRecording rec;
  Eigen::RowVectorXd source;
  Eigen::VectorXd pattern;
};

inline dipoleforge::MultichannelRecording wrap(Eigen::MatrixXd data, double rate = 100.0) {
  dipoleforge::MultichannelRecording rec;
  rec.sample_rate = rate;
  for (Eigen::Index i = 0; i < data.rows(); ++i) rec.channel_labels.push_back("E" + std::to_string(i));
  rec.data = std::move(data);
  return rec;
}

inline PlantedScene planted_oscillation(std::uint64_t seed, Eigen::Index channels = 8,
                                        double seconds = 30.0, double rate = 100.0) {
  const auto n = static_cast<Eigen::Index>(seconds * rate);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  PlantedScene s;
  s.source = oracle::sinusoid(n, 10.0, rate, 1.0, phase(gen));
  // Slow amplitude modulation keeps the source from being a pure tone.
  const Eigen::RowVectorXd envelope =
      (1.0 + 0.3 * oracle::sinusoid(n, 0.2, rate, 1.0, phase(gen)).array()).matrix();
  s.source = s.source.cwiseProduct(envelope);
  s.pattern = oracle::gaussian(channels, 1, seed ^ 0x5eedULL);
  const Eigen::MatrixXd mixing = oracle::gaussian(channels, channels, seed ^ 0xabcdULL);
  const Eigen::MatrixXd background = 0.2 * mixing * oracle::gaussian(channels, n, seed ^ 0x1234ULL);
  s.rec = wrap(s.pattern * s.source + background, rate);
  return s;
}

inline double correlation(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const Eigen::RowVectorXd x = a.array() - a.mean();
  const Eigen::RowVectorXd y = b.array() - b.mean();
  return x.dot(y) / (x.norm() * y.norm());
}

}  // namespace fixture
