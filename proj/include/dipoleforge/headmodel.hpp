#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/sphere_forward.hpp"

namespace dipoleforge::headmodel {

struct HeadModelConfig {
  SphereGeometry geometry;
  double grid_spacing = 0.01;  // meters
  std::string montage = "10-10-61";
  std::vector<std::string> channels;  // subset of the montage; empty = all
  int series_degree = 60;
  SeriesMode series_mode = SeriesMode::Accelerated;
};

/// Voxels are lattice points k * spacing with k integer and
/// kShellInner * r_brain <= |v| <= kShellOuter * r_brain.
inline constexpr double kShellInner = 0.4;
inline constexpr double kShellOuter = 0.95;

struct Electrode {
  std::string label;
  Eigen::Vector3d position;  // on the scalp sphere
};

struct Dipole {
  std::size_t voxel = 0;
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  // A m
};

using Leadfield = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Immutable three-sphere head model with a montage and a cortical voxel grid.
class HeadModel {
 public:
  explicit HeadModel(HeadModelConfig config);

  const HeadModelConfig& config() const { return config_; }
  const SphereGeometry& geometry() const { return config_.geometry; }
  double grid_spacing() const { return config_.grid_spacing; }

  const std::vector<Electrode>& electrodes() const { return electrodes_; }
  std::vector<std::string> channel_labels() const;
  std::size_t channel_count() const { return electrodes_.size(); }

  const std::vector<Eigen::Vector3d>& voxels() const { return voxels_; }
  const std::vector<Eigen::Vector3i>& lattice() const { return lattice_; }
  std::size_t voxel_count() const { return voxels_.size(); }

  /// Voxel whose position is nearest to `position` (ties: lowest index).
  std::size_t nearest_voxel(const Eigen::Vector3d& position) const;

  /// Average-referenced c x 3 gain of unit dipoles along x, y, z.
  Leadfield leadfield(std::size_t voxel) const;
  Leadfield leadfield_at(const Eigen::Vector3d& position) const;

  /// Unreferenced potentials at the electrodes, c x 3.
  Leadfield raw_gain_at(const Eigen::Vector3d& position) const;

  Eigen::VectorXd dipole_field(const Dipole& dipole) const;

  /// The `count` voxels closest to `origin` among those at least
  /// `min_distance` away (origin itself excluded), ascending by distance,
  /// ties by index. Throws InsufficientNeighborsError.
  std::vector<std::size_t> nearest_voxels(std::size_t origin, std::size_t count,
                                          double min_distance) const;

  /// Euclidean distance between two voxels in grid steps.
  double grid_distance(std::size_t a, std::size_t b) const;

  const SphereForward& forward() const { return *forward_; }

 private:
  void check_voxel(std::size_t v) const;

  HeadModelConfig config_;
  std::vector<Electrode> electrodes_;
  std::vector<Eigen::Vector3d> voxels_;
  std::vector<Eigen::Vector3i> lattice_;
  std::shared_ptr<const SphereForward> forward_;
};

HeadModel build_head_model(const HeadModelConfig& config);

/// Subtract the mean over electrodes from each column.
template <typename Derived>
void average_reference(Eigen::MatrixBase<Derived>& m) {
  const auto mean = m.colwise().mean().eval();
  m.rowwise() -= mean;
}

}  // namespace dipoleforge::headmodel
