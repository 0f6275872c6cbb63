#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/kernels.hpp"

namespace dipoleforge::dipolefit {

/// Default subspace-correlation threshold for quality gating and for the
/// low_confidence flag.
inline constexpr double kDefaultQualityThreshold = 0.90;

/// Relative singular-value cutoff when orthonormalizing a leadfield.
inline constexpr double kRankCutoff = 1e-12;

struct DipoleFit {
  std::size_t voxel = 0;
  Eigen::Vector3d moment = Eigen::Vector3d::UnitZ();
  double subspace_correlation = 0.0;
  std::size_t pattern_index = 0;
  bool reduced_rank = false;    // leadfield at the winning voxel has rank < 3
  bool low_confidence = false;  // subspace_correlation < kDefaultQualityThreshold
};

/// Precomputed leadfields and their orthonormal column bases for every voxel
/// of a head model. Building is the expensive part; fits are a scan over the
/// cached bases.
class MusicScanner {
 public:
  explicit MusicScanner(const headmodel::HeadModel& model);
  /// Reuses a leadfield table computed for `model` (e.g. a loaded cache).
  MusicScanner(const headmodel::HeadModel& model, kernels::LeadfieldTable table);

  const headmodel::HeadModel& model() const { return *model_; }
  const kernels::LeadfieldTable& leadfields() const { return table_; }
  const std::vector<kernels::SubspaceBasis>& bases() const { return bases_; }

  DipoleFit fit(const Eigen::VectorXd& pattern, std::size_t pattern_index = 0) const;

  /// Subspace correlation of a pattern at every voxel.
  Eigen::VectorXd scan(const Eigen::VectorXd& pattern) const;

 private:
  const headmodel::HeadModel* model_;
  kernels::LeadfieldTable table_;
  std::vector<kernels::SubspaceBasis> bases_;
};

kernels::SubspaceBasis orthonormal_basis(const headmodel::Leadfield& leadfield);

/// One-off fit; builds a scanner for the model.
DipoleFit music_fit(const Eigen::VectorXd& pattern, const headmodel::HeadModel& model);

bool fit_quality_gate(const DipoleFit& fit, double threshold = kDefaultQualityThreshold);

}  // namespace dipoleforge::dipolefit
