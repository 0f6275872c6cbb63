#pragma once

#include <Eigen/Dense>

#include "dipoleforge/recording.hpp"

// The linear model of EEG: x(t) = A s(t) + n(t), y(t) = W^T x(t), and the
// filter-to-pattern conversion linking the two.
namespace dipoleforge::linmodel {

/// Largest admissible condition number of W^T Sigma W.
inline constexpr double kMaxConditionNumber = 1e10;

/// Seconds discarded at each end of band-passed data before covariance or
/// feature computation.
inline constexpr double kEdgeSeconds = 1.0;

SourceActivity apply_backward(const MultichannelRecording& rec, const Eigen::MatrixXd& filters);

/// A * sources, with header (rate, labels, markers, metadata) copied from `like`.
MultichannelRecording apply_forward(const Eigen::MatrixXd& patterns, const SourceActivity& sources,
                                    const MultichannelRecording& like);
MultichannelRecording apply_forward(const Eigen::MatrixXd& patterns, const SourceActivity& sources,
                                    const MultichannelRecording& like,
                                    const Eigen::MatrixXd& noise);

/// A = Sigma W (W^T Sigma W)^-1.
Eigen::MatrixXd filters_to_patterns(const Eigen::MatrixXd& filters,
                                    const Eigen::MatrixXd& covariance);

/// Mean-removed covariance of the rows of `data` (variables x observations),
/// normalized by 1/(T-1).
Eigen::MatrixXd covariance(const Eigen::MatrixXd& data);
Eigen::MatrixXd sample_covariance(const MultichannelRecording& rec);

/// Zero-phase 4th-order Butterworth band-pass applied per channel.
MultichannelRecording band_pass(const MultichannelRecording& rec, double low_hz, double high_hz);
Eigen::MatrixXd band_pass(const Eigen::MatrixXd& data, double sample_rate, double low_hz,
                          double high_hz);

/// Columns [edge, T - edge) with edge = round(kEdgeSeconds * rate).
Eigen::MatrixXd trim_edges(const Eigen::MatrixXd& data, double sample_rate);

}  // namespace dipoleforge::linmodel
