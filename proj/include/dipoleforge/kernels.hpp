#pragma once

// Data-parallel inner loops. Each kernel has a `_serial` reference that the
// tests compare against and the benchmark times; the parallel versions use
// OpenMP and produce bit-identical results (every output element is computed
// by the same serial code, only the assignment to threads differs).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/dsp.hpp"
#include "dipoleforge/headmodel.hpp"

namespace dipoleforge::kernels {

/// Dense voxels x channels x 3 table, row-major (the leadfield.f64 layout).
class LeadfieldTable {
 public:
  using Block = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
  using View = Eigen::Map<const Block>;

  LeadfieldTable() = default;
  LeadfieldTable(std::size_t voxels, std::size_t channels)
      : voxels_(voxels), channels_(channels), data_(voxels * channels * 3, 0.0) {}

  std::size_t voxels() const { return voxels_; }
  std::size_t channels() const { return channels_; }

  View at(std::size_t voxel) const {
    return View(data_.data() + voxel * channels_ * 3, static_cast<Eigen::Index>(channels_), 3);
  }
  Eigen::Map<Block> at(std::size_t voxel) {
    return Eigen::Map<Block>(data_.data() + voxel * channels_ * 3,
                             static_cast<Eigen::Index>(channels_), 3);
  }

  const std::vector<double>& raw() const { return data_; }
  std::vector<double>& raw() { return data_; }

 private:
  std::size_t voxels_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

LeadfieldTable leadfield_table_serial(const headmodel::HeadModel& model);
LeadfieldTable leadfield_table(const headmodel::HeadModel& model);

/// Orthonormal basis of one leadfield's column space (rank <= 3).
struct SubspaceBasis {
  Eigen::Matrix<double, Eigen::Dynamic, 3> q;  // unused columns are zero
  int rank = 0;
};

/// rho(v) = || Q(v)^T u || for a unit pattern u, one entry per basis.
Eigen::VectorXd subspace_correlations_serial(const std::vector<SubspaceBasis>& bases,
                                             const Eigen::VectorXd& unit_pattern);
Eigen::VectorXd subspace_correlations(const std::vector<SubspaceBasis>& bases,
                                      const Eigen::VectorXd& unit_pattern);

/// filtfilt applied to every row of `data`.
Eigen::MatrixXd filtfilt_rows_serial(const dsp::SosFilter& sos, const Eigen::MatrixXd& data);
Eigen::MatrixXd filtfilt_rows(const dsp::SosFilter& sos, const Eigen::MatrixXd& data);

/// Threads used by parallel kernels and harness loops: DIPOLEFORGE_THREADS if
/// set to a positive integer, otherwise the OpenMP default. Applies the cap
/// via omp_set_num_threads and returns it.
int configure_threads_from_env();

}  // namespace dipoleforge::kernels
