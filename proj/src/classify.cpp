#include "dipoleforge/classify.hpp"

#include <algorithm>
#include <cmath>

#include "dipoleforge/error.hpp"
#include "dipoleforge/linmodel.hpp"
#include "dipoleforge/montage.hpp"

namespace dipoleforge::classify {

Eigen::MatrixXd laplacian_matrix(const std::vector<std::string>& channel_labels,
                                 const std::vector<std::string>& centers) {
  const auto c = channel_labels.size();
  std::vector<Eigen::Vector3d> pos(c);
  for (std::size_t i = 0; i < c; ++i) {
    const auto p = montage::unit_position(channel_labels[i]);
    if (!p) misconfigured("channel '" + channel_labels[i] + "' has no montage position");
    pos[i] = *p;
  }
  if (c < kLaplacianNeighbors + 1)
    misconfigured("Laplacian needs at least " + std::to_string(kLaplacianNeighbors + 1) +
                  " channels");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(centers.size()),
                                            static_cast<Eigen::Index>(c));
  for (std::size_t r = 0; r < centers.size(); ++r) {
    const auto it = std::find(channel_labels.begin(), channel_labels.end(), centers[r]);
    if (it == channel_labels.end())
      misconfigured("Laplacian center '" + centers[r] + "' is not a recording channel");
    const auto center = static_cast<std::size_t>(it - channel_labels.begin());
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < c; ++i)
      if (i != center) d.emplace_back((pos[i] - pos[center]).squaredNorm(), i);
    std::partial_sort(d.begin(), d.begin() + kLaplacianNeighbors, d.end());
    const auto row = static_cast<Eigen::Index>(r);
    m(row, static_cast<Eigen::Index>(center)) = 1.0;
    for (std::size_t k = 0; k < kLaplacianNeighbors; ++k)
      m(row, static_cast<Eigen::Index>(d[k].second)) -= 1.0 / kLaplacianNeighbors;
  }
  return m;
}

MultichannelRecording laplacian_filter(const MultichannelRecording& rec,
                                       const std::vector<std::string>& centers) {
  rec.validate();
  auto out = with_data(rec, laplacian_matrix(rec.channel_labels, centers) * rec.data);
  out.channel_labels = centers;
  return out;
}

EpochSet extract_epochs(const MultichannelRecording& rec, const EpochWindow& window) {
  rec.validate();
  if (!(window.duration_s > 0.0)) reject("epoch duration must be positive");
  const auto offset = static_cast<std::int64_t>(std::llround(window.offset_s * rec.sample_rate));
  const auto length = static_cast<Eigen::Index>(std::llround(window.duration_s * rec.sample_rate));
  if (length < 2) reject("epoch window shorter than 2 samples");

  EpochSet out;
  for (std::size_t i = 0; i < rec.markers.size(); ++i) {
    const auto start = rec.markers[i].sample + offset;
    if (start < 0 || start + length > rec.samples()) {
      out.rejected.push_back(i);
      continue;
    }
    out.epochs.emplace_back(rec.data.middleCols(static_cast<Eigen::Index>(start), length));
    out.labels.push_back(rec.markers[i].label);
  }
  if (out.epochs.empty())
    throw Error(ErrorKind::EmptyEpochs, "all " + std::to_string(rec.markers.size()) +
                                            " epoch windows fall outside the recording");
  return out;
}

Eigen::MatrixXd logvar_features(const std::vector<Eigen::MatrixXd>& epochs) {
  if (epochs.empty()) throw Error(ErrorKind::EmptyEpochs, "no epochs");
  const auto channels = epochs.front().rows();
  const auto samples = epochs.front().cols();
  Eigen::MatrixXd f(static_cast<Eigen::Index>(epochs.size()), channels);
  for (std::size_t t = 0; t < epochs.size(); ++t) {
    const auto& e = epochs[t];
    if (e.rows() != channels || e.cols() != samples)
      reject("epochs must share one shape");
    if (samples < 2) reject("epochs need at least 2 samples");
    for (Eigen::Index ch = 0; ch < channels; ++ch) {
      const double mean = e.row(ch).mean();
      const double var = (e.row(ch).array() - mean).square().sum() / static_cast<double>(samples - 1);
      if (!(var > 0.0))
        throw DegenerateFeatureError("zero variance in trial " + std::to_string(t) + ", channel " +
                                         std::to_string(ch),
                                     t, static_cast<std::size_t>(ch));
      f(static_cast<Eigen::Index>(t), ch) = std::log(var);
    }
  }
  return f;
}

namespace {

/// S = X'X / n for zero-mean rows.
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd s = x.transpose() * x / static_cast<double>(x.rows());
  return 0.5 * (s + s.transpose());
}

}  // namespace

ShrinkageEstimate ledoit_wolf_covariance(const Eigen::MatrixXd& samples) {
  const auto n = samples.rows();
  const auto f = samples.cols();
  if (n < 2) reject("shrinkage covariance needs at least 2 samples, got " + std::to_string(n));
  if (f < 1) reject("shrinkage covariance needs at least 1 feature");

  const Eigen::MatrixXd s = second_moment(samples);
  const double nu = s.trace() / static_cast<double>(f);

  // With w_kij = x_ki x_kj, s_ij is the mean of w_kij over k and its variance
  // is estimated by sum_k (w_kij - s_ij)^2 / (n (n-1)). Summed over i, j:
  // sum_k |x_k|^4 - n |S|_F^2.
  const double nd = static_cast<double>(n);
  double fourth = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r2 = samples.row(k).squaredNorm();
    fourth += r2 * r2;
  }
  const double var_sum = std::max(0.0, fourth - nd * s.squaredNorm()) / (nd * (nd - 1.0));
  const Eigen::MatrixXd target = nu * Eigen::MatrixXd::Identity(f, f);
  const double dev = (s - target).squaredNorm();

  ShrinkageEstimate out;
  out.nu = nu;
  out.lambda = dev > 0.0 ? std::clamp(var_sum / dev, 0.0, 1.0) : 1.0;
  out.covariance = (1.0 - out.lambda) * s + out.lambda * target;
  return out;
}

LdaModel lda_train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                   std::optional<double> forced_shrinkage) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    reject("feature rows and labels differ in count");
  const auto f = features.cols();
  Eigen::VectorXd sum_pos = Eigen::VectorXd::Zero(f), sum_neg = Eigen::VectorXd::Zero(f);
  Eigen::Index n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = features.row(static_cast<Eigen::Index>(i)).transpose();
    if (labels[i] == kRightHand) {
      sum_pos += row;
      ++n_pos;
    } else if (labels[i] == kLeftHand) {
      sum_neg += row;
      ++n_neg;
    } else {
      reject("label " + std::to_string(labels[i]) + " is not a known class");
    }
  }
  if (n_pos < 2 || n_neg < 2) reject("LDA needs at least 2 samples of each class");
  const Eigen::VectorXd mu_pos = sum_pos / static_cast<double>(n_pos);
  const Eigen::VectorXd mu_neg = sum_neg / static_cast<double>(n_neg);

  Eigen::MatrixXd centered = features;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    centered.row(r) -= (labels[i] == kRightHand ? mu_pos : mu_neg).transpose();
  }
  auto est = ledoit_wolf_covariance(centered);
  if (forced_shrinkage) {
    if (!(*forced_shrinkage >= 0.0 && *forced_shrinkage <= 1.0))
      reject("forced shrinkage must lie in [0, 1]");
    est.lambda = *forced_shrinkage;
    est.covariance = (1.0 - est.lambda) * second_moment(centered) +
                     est.lambda * est.nu * Eigen::MatrixXd::Identity(f, f);
  }

  LdaModel model;
  model.shrinkage_intensity = est.lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(est.covariance);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw DegenerateDecompositionError("shrunk covariance is not positive definite", 0.0);
  model.weights = ldlt.solve(mu_pos - mu_neg);
  model.bias = -model.weights.dot(mu_pos + mu_neg) / 2.0;
  if (!model.weights.allFinite() || !std::isfinite(model.bias))
    throw DegenerateDecompositionError("LDA weights are not finite", 0.0);
  return model;
}

Prediction lda_predict(const LdaModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.weights.size())
    reject("feature width " + std::to_string(features.cols()) + " does not match model width " +
           std::to_string(model.weights.size()));
  Prediction p;
  p.scores = (features * model.weights).array() + model.bias;
  p.labels.resize(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    p.labels[static_cast<std::size_t>(i)] = p.scores[i] >= 0.0 ? kRightHand : kLeftHand;
  return p;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    reject("accuracy needs equal-length, non-empty label vectors");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

FeatureSet compute_features(const MultichannelRecording& rec, const FeatureConfig& cfg) {
  const auto centers = cfg.centers.empty() ? montage::standard_1020() : cfg.centers;
  const auto lap = laplacian_filter(rec, centers);
  const auto filtered = linmodel::band_pass(lap, cfg.band_low_hz, cfg.band_high_hz);
  const auto epochs = extract_epochs(filtered, cfg.window);
  FeatureSet out;
  out.features = logvar_features(epochs.epochs);
  out.labels = epochs.labels;
  out.channel_labels = centers;
  out.rejected_trials = epochs.rejected.size();
  return out;
}

}  // namespace dipoleforge::classify
