#include "dipoleforge/linmodel.hpp"

#include <cmath>
#include <sstream>

#include "dipoleforge/dsp.hpp"
#include "dipoleforge/error.hpp"
#include "dipoleforge/kernels.hpp"

namespace dipoleforge::linmodel {

SourceActivity apply_backward(const MultichannelRecording& rec, const Eigen::MatrixXd& filters) {
  if (filters.rows() != rec.channels())
    reject("filter matrix has " + std::to_string(filters.rows()) + " rows, recording has " +
           std::to_string(rec.channels()) + " channels");
  SourceActivity out;
  out.data.noalias() = filters.transpose() * rec.data;
  out.component_scores = Eigen::VectorXd::Zero(filters.cols());
  return out;
}

MultichannelRecording apply_forward(const Eigen::MatrixXd& patterns, const SourceActivity& sources,
                                    const MultichannelRecording& like) {
  if (patterns.cols() != sources.data.rows())
    reject("pattern matrix has " + std::to_string(patterns.cols()) + " columns, sources have " +
           std::to_string(sources.data.rows()) + " components");
  Eigen::MatrixXd data;
  data.noalias() = patterns * sources.data;
  return with_data(like, std::move(data));
}

MultichannelRecording apply_forward(const Eigen::MatrixXd& patterns, const SourceActivity& sources,
                                    const MultichannelRecording& like,
                                    const Eigen::MatrixXd& noise) {
  if (noise.rows() != patterns.rows() || noise.cols() != sources.data.cols())
    reject("noise shape does not match the forward-projected data");
  auto out = apply_forward(patterns, sources, like);
  out.data += noise;
  return out;
}

Eigen::MatrixXd filters_to_patterns(const Eigen::MatrixXd& filters,
                                    const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() != filters.rows())
    reject("covariance must be square with as many rows as the filter matrix");
  const Eigen::MatrixXd sw = covariance * filters;
  Eigen::MatrixXd gram = filters.transpose() * sw;
  gram = 0.5 * (gram + gram.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = eig.eigenvalues().cwiseAbs();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond < kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "W^T Sigma W is singular (condition number " << cond << " >= " << kMaxConditionNumber
        << ")";
    throw DegenerateDecompositionError(msg.str(), cond);
  }
  // gram is symmetric, so A = sw * gram^-1 = (gram^-1 sw^T)^T.
  return gram.partialPivLu().solve(sw.transpose()).transpose();
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& data) {
  if (data.cols() < 2) reject("covariance needs at least 2 samples");
  const Eigen::VectorXd mean = data.rowwise().mean();
  const Eigen::MatrixXd centered = data.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(data.cols() - 1);
  return 0.5 * (cov + cov.transpose());
}

Eigen::MatrixXd sample_covariance(const MultichannelRecording& rec) { return covariance(rec.data); }

Eigen::MatrixXd band_pass(const Eigen::MatrixXd& data, double sample_rate, double low_hz,
                          double high_hz) {
  const auto sos = dsp::butterworth_bandpass(4, low_hz, high_hz, sample_rate);
  return kernels::filtfilt_rows(sos, data);
}

MultichannelRecording band_pass(const MultichannelRecording& rec, double low_hz, double high_hz) {
  return with_data(rec, band_pass(rec.data, rec.sample_rate, low_hz, high_hz));
}

Eigen::MatrixXd trim_edges(const Eigen::MatrixXd& data, double sample_rate) {
  const auto edge = static_cast<Eigen::Index>(std::lround(kEdgeSeconds * sample_rate));
  if (data.cols() <= 2 * edge) reject("recording shorter than the discarded filter edges");
  return data.middleCols(edge, data.cols() - 2 * edge);
}

}  // namespace dipoleforge::linmodel
