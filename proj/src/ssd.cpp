#include "dipoleforge/ssd.hpp"

#include <cmath>

#include "dipoleforge/error.hpp"
#include "dipoleforge/linmodel.hpp"

namespace dipoleforge::ssd {

namespace {

void check_band(const Band& b, double rate, const char* name) {
  if (!(b.low_hz > 0.0 && b.low_hz < b.high_hz && b.high_hz < rate / 2.0))
    reject(std::string(name) + " band must satisfy 0 < low < high < sample_rate/2");
}

struct BandCovariances {
  Eigen::MatrixXd signal;
  Eigen::MatrixXd noise;
};

BandCovariances band_covariances(const Eigen::MatrixXd& data, double rate, const SsdBands& bands) {
  using linmodel::band_pass;
  using linmodel::trim_edges;
  const Eigen::MatrixXd sig =
      trim_edges(band_pass(data, rate, bands.signal.low_hz, bands.signal.high_hz), rate);
  const Eigen::MatrixXd flank =
      trim_edges(band_pass(data, rate, bands.flank_low.low_hz, bands.flank_low.high_hz) +
                     band_pass(data, rate, bands.flank_high.low_hz, bands.flank_high.high_hz),
                 rate);
  return {linmodel::covariance(sig), linmodel::covariance(flank)};
}

}  // namespace

void SsdBands::validate(double sample_rate) const {
  check_band(signal, sample_rate, "signal");
  check_band(flank_low, sample_rate, "lower flank");
  check_band(flank_high, sample_rate, "upper flank");
  if (flank_low.high_hz > signal.low_hz || signal.high_hz > flank_high.low_hz)
    reject("flanking bands must lie outside the signal band");
}

SsdResult ssd_decompose(const MultichannelRecording& rec, const SsdBands& bands,
                        std::optional<std::size_t> n_components) {
  rec.validate();
  bands.validate(rec.sample_rate);
  const double usable = static_cast<double>(rec.samples()) / rec.sample_rate - 2.0 * linmodel::kEdgeSeconds;
  if (usable < kMinAnalysisSeconds)
    reject("SSD needs at least " + std::to_string(kMinAnalysisSeconds) +
           " s after discarding filter edges, recording leaves " + std::to_string(usable) + " s");

  const auto cov = band_covariances(rec.data, rec.sample_rate, bands);
  const Eigen::MatrixXd total = cov.signal + cov.noise;

  // Whitening of C_s + C_n restricted to its numerical rank.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_total(total);
  const Eigen::VectorXd& d = eig_total.eigenvalues();  // ascending
  const double dmax = d.maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] > kRankTolerance * dmax) ++rank;
  if (rank < 2)
    throw DegenerateDecompositionError(
        "C_s + C_n has effective rank " + std::to_string(rank) + " (< 2)",
        dmax > 0.0 ? dmax / std::max(d.minCoeff(), 0.0) : std::numeric_limits<double>::infinity());
  const Eigen::Index c = d.size();
  const Eigen::MatrixXd whitener =
      eig_total.eigenvectors().rightCols(rank) *
      d.tail(rank).cwiseSqrt().cwiseInverse().asDiagonal();

  Eigen::MatrixXd reduced_signal = whitener.transpose() * cov.signal * whitener;
  reduced_signal = 0.5 * (reduced_signal + reduced_signal.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_signal(reduced_signal);

  Eigen::Index keep = rank;
  if (n_components) {
    if (*n_components < 1) reject("n_components must be >= 1");
    keep = std::min<Eigen::Index>(rank, static_cast<Eigen::Index>(*n_components));
  }

  // Descending order.
  Eigen::MatrixXd filters(c, keep);
  Eigen::VectorXd scores(keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    const Eigen::Index src = rank - 1 - j;
    const double lambda = std::clamp(eig_signal.eigenvalues()[src], 0.0, 1.0);
    Eigen::VectorXd w = whitener * eig_signal.eigenvectors().col(src);
    // w'(C_s + C_n)w = 1 here, so w'C_s w = lambda.
    if (lambda > 0.0) w /= std::sqrt(lambda);
    filters.col(j) = w;
    scores[j] = lambda;
  }

  SsdResult out;
  out.effective_rank = static_cast<std::size_t>(rank);
  out.reduced = rank < c;
  out.decomposition.covariance = linmodel::sample_covariance(rec);
  out.decomposition.patterns =
      linmodel::filters_to_patterns(filters, out.decomposition.covariance);

  for (Eigen::Index j = 0; j < keep; ++j) {
    Eigen::Index imax = 0;
    out.decomposition.patterns.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.decomposition.patterns(imax, j) < 0.0) {
      out.decomposition.patterns.col(j) *= -1.0;
      filters.col(j) *= -1.0;
    }
  }
  out.decomposition.filters = filters;
  out.sources = linmodel::apply_backward(rec, filters);
  out.sources.component_scores = scores;
  return out;
}

double band_power_ratio(const Eigen::RowVectorXd& signal, double sample_rate,
                        const SsdBands& bands) {
  const Eigen::MatrixXd row = signal;
  const auto cov = band_covariances(row, sample_rate, bands);
  return cov.signal(0, 0) / cov.noise(0, 0);
}

}  // namespace dipoleforge::ssd
