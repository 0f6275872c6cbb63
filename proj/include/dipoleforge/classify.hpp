#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/recording.hpp"

namespace dipoleforge::classify {

inline constexpr std::size_t kLaplacianNeighbors = 4;

/// Center minus the mean of its kLaplacianNeighbors nearest montage
/// neighbors among the recording's channels (3D distance on the unit
/// sphere; ties by channel order). Rows are centers, columns channels.
Eigen::MatrixXd laplacian_matrix(const std::vector<std::string>& channel_labels,
                                 const std::vector<std::string>& centers);

MultichannelRecording laplacian_filter(const MultichannelRecording& rec,
                                       const std::vector<std::string>& centers);

struct EpochSet {
  std::vector<Eigen::MatrixXd> epochs;  // channels x samples each
  std::vector<int> labels;
  std::vector<std::size_t> rejected;  // marker indices whose window did not fit
};

struct EpochWindow {
  double offset_s = 1.0;
  double duration_s = 3.5;
};

EpochSet extract_epochs(const MultichannelRecording& rec, const EpochWindow& window = {});

/// trials x channels matrix of ln(var) with the 1/(n-1) variance.
Eigen::MatrixXd logvar_features(const std::vector<Eigen::MatrixXd>& epochs);

struct ShrinkageEstimate {
  Eigen::MatrixXd covariance;  // (1 - lambda) S + lambda nu I
  double lambda = 0.0;
  double nu = 0.0;  // trace(S) / f
};

/// Analytic shrinkage of S = X'X / n toward nu I. Rows of `samples` (n x f)
/// are zero-mean observations; lda_train passes class-mean-removed features.
/// The data are not re-centered: with n = 2 that would leave a single
/// effective observation and no estimate of the entry variances.
ShrinkageEstimate ledoit_wolf_covariance(const Eigen::MatrixXd& samples);

struct LdaModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double shrinkage_intensity = 0.0;
  std::vector<std::string> channel_labels;
};

/// Positive class is kRightHand. `forced_shrinkage` replaces the analytic
/// intensity.
LdaModel lda_train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                   std::optional<double> forced_shrinkage = std::nullopt);

struct Prediction {
  std::vector<int> labels;
  Eigen::VectorXd scores;
};

/// score = w'x + b; label kRightHand when score >= 0.
Prediction lda_predict(const LdaModel& model, const Eigen::MatrixXd& features);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

struct FeatureConfig {
  std::vector<std::string> centers;  // empty = the 19 10-20 positions
  double band_low_hz = 8.0;
  double band_high_hz = 13.0;
  EpochWindow window;
};

struct FeatureSet {
  Eigen::MatrixXd features;  // trials x centers
  std::vector<int> labels;
  std::vector<std::string> channel_labels;
  std::size_t rejected_trials = 0;
};

/// Laplacian, band-pass, epochs, log-variance.
FeatureSet compute_features(const MultichannelRecording& rec, const FeatureConfig& cfg = {});

}  // namespace dipoleforge::classify
