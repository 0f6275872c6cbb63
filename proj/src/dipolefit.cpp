#include "dipoleforge/dipolefit.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "dipoleforge/error.hpp"

namespace dipoleforge::dipolefit {

kernels::SubspaceBasis orthonormal_basis(const headmodel::Leadfield& leadfield) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(leadfield, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  kernels::SubspaceBasis b;
  b.q = Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(leadfield.rows(), 3);
  if (s.size() == 0 || s[0] <= 0.0) return b;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] <= kRankCutoff * s[0]) break;
    b.q.col(k) = svd.matrixU().col(k);
    ++b.rank;
  }
  return b;
}

MusicScanner::MusicScanner(const headmodel::HeadModel& model)
    : MusicScanner(model, kernels::leadfield_table(model)) {}

MusicScanner::MusicScanner(const headmodel::HeadModel& model, kernels::LeadfieldTable table)
    : model_(&model), table_(std::move(table)), bases_(model.voxel_count()) {
  if (table_.voxels() != model.voxel_count() || table_.channels() != model.channel_count())
    reject("leadfield table shape does not match the head model");
  const auto n = static_cast<std::ptrdiff_t>(bases_.size());
#pragma omp parallel for schedule(dynamic, 16) if (!omp_in_parallel())
  for (std::ptrdiff_t v = 0; v < n; ++v)
    bases_[static_cast<std::size_t>(v)] = orthonormal_basis(table_.at(static_cast<std::size_t>(v)));
}

namespace {

Eigen::VectorXd unit_referenced(const Eigen::VectorXd& pattern, std::size_t channels) {
  if (static_cast<std::size_t>(pattern.size()) != channels)
    reject("pattern has " + std::to_string(pattern.size()) + " entries, model has " +
           std::to_string(channels) + " channels");
  Eigen::VectorXd a = pattern.array() - pattern.mean();
  const double norm = a.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) reject("pattern is zero after average referencing");
  return a / norm;
}

}  // namespace

Eigen::VectorXd MusicScanner::scan(const Eigen::VectorXd& pattern) const {
  return kernels::subspace_correlations(bases_, unit_referenced(pattern, table_.channels()));
}

DipoleFit MusicScanner::fit(const Eigen::VectorXd& pattern, std::size_t pattern_index) const {
  const Eigen::VectorXd a = unit_referenced(pattern, table_.channels());
  const Eigen::VectorXd rho = kernels::subspace_correlations(bases_, a);

  std::size_t best = 0;
  for (std::size_t v = 1; v < bases_.size(); ++v)
    if (rho[static_cast<Eigen::Index>(v)] > rho[static_cast<Eigen::Index>(best)]) best = v;

  DipoleFit fit;
  fit.voxel = best;
  fit.pattern_index = pattern_index;
  fit.subspace_correlation = std::clamp(rho[static_cast<Eigen::Index>(best)], 0.0, 1.0);
  fit.reduced_rank = bases_[best].rank < 3;
  fit.low_confidence = fit.subspace_correlation < kDefaultQualityThreshold;

  // Minimum-norm least squares; handles the rank-deficient case.
  const Eigen::MatrixXd l = table_.at(best);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(l);
  cod.setThreshold(kRankCutoff);
  Eigen::Vector3d m = cod.solve(a);
  const double mn = m.norm();
  fit.moment = mn > 0.0 ? Eigen::Vector3d(m / mn) : Eigen::Vector3d::UnitZ();
  return fit;
}

DipoleFit music_fit(const Eigen::VectorXd& pattern, const headmodel::HeadModel& model) {
  return MusicScanner(model).fit(pattern);
}

bool fit_quality_gate(const DipoleFit& fit, double threshold) {
  return fit.subspace_correlation >= threshold;
}

}  // namespace dipoleforge::dipolefit
