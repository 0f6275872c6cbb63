#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace dipoleforge::headmodel {

/// Three concentric spheres: brain, skull, scalp (innermost first).
struct SphereGeometry {
  std::array<double, 3> radii{0.080, 0.085, 0.092};
  std::array<double, 3> conductivities{0.33, 0.0042, 0.33};
};

enum class SeriesMode {
  /// Series over the remainder after subtracting closed-form sums of the
  /// large-degree asymptote and the first-order shell reflections.
  Accelerated,
  /// Raw truncated Legendre series; slow to converge near the brain surface.
  Plain,
};

/// Scalp potential of a current dipole inside the innermost sphere.
///
/// The potential at a scalp point e (|e| = R) of a dipole with moment m at
/// position p is
///
///   V = 1/(4 pi sigma_brain R^2) * sum_{n>=1} k_n m . grad_p[(|p|/R)^n P_n(cos g)]
///
/// where k_n follows from matching potential and normal current across both
/// interfaces with an insulating outer boundary. Potentials are unreferenced.
class SphereForward {
 public:
  SphereForward(const SphereGeometry& geometry, int degree, SeriesMode mode = SeriesMode::Accelerated);

  /// Potential at `electrode` per unit moment along x, y, z.
  Eigen::RowVector3d gain(const Eigen::Vector3d& electrode, const Eigen::Vector3d& position) const;

  double potential(const Eigen::Vector3d& electrode, const Eigen::Vector3d& position,
                   const Eigen::Vector3d& moment) const {
    return gain(electrode, position).dot(moment);
  }

  /// Exact series coefficient k_n in units where the scalp radius is 1.
  static double shell_coefficient(const SphereGeometry& geometry, int n);

  const SphereGeometry& geometry() const { return geometry_; }
  int degree() const { return degree_; }
  SeriesMode mode() const { return mode_; }

 private:
  struct ClosedTerm {
    double alpha = 0.0;  // coefficient of 1
    double beta = 0.0;   // coefficient of 1/n
    double gamma = 0.0;  // coefficient of 1/(n+1)
    double rho = 1.0;    // the term carries rho^(2n+1)
  };

  SphereGeometry geometry_;
  int degree_;
  SeriesMode mode_;
  double scale_;
  double k1_;
  std::vector<double> remainder_;  // index n, 1..degree
  std::vector<ClosedTerm> closed_;
};

}  // namespace dipoleforge::headmodel
