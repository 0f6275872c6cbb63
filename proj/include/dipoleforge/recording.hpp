#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dipoleforge {

/// Class labels used throughout: 0 = left-hand imagery, 1 = right-hand imagery.
inline constexpr int kLeftHand = 0;
inline constexpr int kRightHand = 1;

struct Marker {
  std::int64_t sample = 0;
  int label = 0;

  friend bool operator==(const Marker&, const Marker&) = default;
};

/// Sampled multichannel signal, channels x samples.
struct MultichannelRecording {
  Eigen::MatrixXd data;
  double sample_rate = 0.0;
  std::vector<std::string> channel_labels;
  std::vector<Marker> markers;
  std::map<std::string, std::string> metadata;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }

  /// Throws a rejected-input error when the invariants do not hold.
  void validate() const;
};

/// A recording with the same header (rate, labels, markers, metadata) and new data.
MultichannelRecording with_data(const MultichannelRecording& like, Eigen::MatrixXd data);

struct SourceActivity {
  Eigen::MatrixXd data;              // components x samples
  Eigen::VectorXd component_scores;  // non-increasing
};

struct Decomposition {
  Eigen::MatrixXd filters;     // W, c x d
  Eigen::MatrixXd patterns;    // A, c x d
  Eigen::MatrixXd covariance;  // Sigma_X, c x c

  Eigen::Index components() const { return filters.cols(); }
};

/// FNV-1a over the data bytes, rate, labels and markers.
std::uint64_t content_hash(const MultichannelRecording& rec);

}  // namespace dipoleforge
