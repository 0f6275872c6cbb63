#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "dipoleforge/error.hpp"
#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/montage.hpp"
#include "oracles.hpp"

using namespace dipoleforge;
using headmodel::HeadModel;
using headmodel::HeadModelConfig;
using headmodel::SeriesMode;
using headmodel::SphereForward;
using headmodel::SphereGeometry;

namespace {

Eigen::Vector3d random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Eigen::Vector3d v(n(gen), n(gen), n(gen));
  return v.normalized();
}

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("equal conductivities reduce to the homogeneous sphere") {
  SphereGeometry g;
  g.conductivities = {0.33, 0.33, 0.33};
  const double radius = g.radii[2];
  for (auto mode : {SeriesMode::Accelerated, SeriesMode::Plain}) {
    const SphereForward fwd(g, 60, mode);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> depth(0.0, 0.6);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Vector3d r0 = random_unit(gen) * depth(gen) * g.radii[0];
      const Eigen::Vector3d m = random_unit(gen);
      const Eigen::Vector3d e = random_unit(gen) * radius;
      const double expected = oracle::homogeneous_sphere(e, r0, m, radius, 0.33);
      CHECK(fwd.potential(e, r0, m) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("accelerated and plain series agree where both converge") {
  const SphereGeometry g;
  const SphereForward acc(g, 60, SeriesMode::Accelerated);
  const SphereForward plain(g, 400, SeriesMode::Plain);
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Vector3d p = random_unit(gen) * 0.5 * g.radii[0];
    const Eigen::Vector3d e = random_unit(gen) * g.radii[2];
    const Eigen::RowVector3d a = acc.gain(e, p), b = plain.gain(e, p);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8 * b.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("skull attenuates the scalp potential") {
  SphereGeometry homo;
  homo.conductivities = {0.33, 0.33, 0.33};
  const SphereForward three(SphereGeometry{}, 60), one(homo, 60);
  const Eigen::Vector3d p(0, 0, 0.06), m(0, 0, 1), e(0, 0, 0.092);
  CHECK(std::abs(three.potential(e, p, m)) < std::abs(one.potential(e, p, m)));
  CHECK(three.potential(e, p, m) > 0);
}

TEST_CASE("leadfields converge between degree 40 and 60") {
  HeadModelConfig c40, c60;
  c40.grid_spacing = c60.grid_spacing = 0.0191;
  c40.series_degree = 40;
  const HeadModel m40(c40), m60(c60);
  REQUIRE(m40.voxel_count() == m60.voxel_count());
  double worst = 0;
  for (std::size_t v = 0; v < m60.voxel_count(); v += 5)
    worst = std::max(worst, max_rel(m40.leadfield(v), m60.leadfield(v)));
  CHECK(worst < 1e-6);
}

TEST_CASE("radial dipoles peak under the dipole") {
  HeadModelConfig cfg;
  cfg.grid_spacing = 0.02;
  const HeadModel model(cfg);
  const std::vector<Eigen::Vector3d> axes = {{0, 0, 1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  for (const auto& axis : axes) {
    const Eigen::Vector3d pos = 0.06 * axis;
    const Eigen::VectorXd v = model.leadfield_at(pos) * axis;
    std::size_t nearest = 0;
    double best = -2;
    for (std::size_t e = 0; e < model.channel_count(); ++e) {
      const double c = model.electrodes()[e].position.normalized().dot(axis);
      if (c > best) {
        best = c;
        nearest = e;
      }
    }
    Eigen::Index peak;
    v.cwiseAbs().maxCoeff(&peak);
    CHECK(static_cast<std::size_t>(peak) == nearest);
  }
}

TEST_CASE("voxel lattice matches exhaustive enumeration") {
  for (double h : {0.01, 0.0191, 0.025}) {
    HeadModelConfig cfg;
    cfg.grid_spacing = h;
    const HeadModel model(cfg);
    CHECK(model.voxel_count() == oracle::lattice_count(h, 0.4 * 0.08, 0.95 * 0.08));
    for (std::size_t v = 0; v < model.voxel_count(); ++v) {
      CHECK(model.voxels()[v].isApprox(model.lattice()[v].cast<double>() * h));
    }
  }
  HeadModelConfig cfg;
  CHECK(HeadModel(cfg).voxel_count() == 1692);
  cfg.grid_spacing = 0.0191;
  CHECK(HeadModel(cfg).voxel_count() == 232);
}

TEST_CASE("nearest_voxels is ordered, respects the minimum and matches a brute force") {
  HeadModelConfig cfg;
  cfg.grid_spacing = 0.0191;
  const HeadModel model(cfg);
  for (std::size_t origin : {0ul, 17ul, 100ul, 231ul}) {
    for (double min_d : {0.0, 0.015, 0.03}) {
      const auto got = model.nearest_voxels(origin, 6, min_d);
      CHECK(got == oracle::nearest(model.voxels(), origin, 6, min_d));
      double prev = 0;
      for (auto v : got) {
        const double d = (model.voxels()[v] - model.voxels()[origin]).norm();
        CHECK(d >= min_d);
        CHECK(d >= prev);
        CHECK(v != origin);
        prev = d;
      }
    }
  }
  CHECK(model.nearest_voxels(3, 0, 0.01).empty());
  try {
    model.nearest_voxels(0, 10, 1.0);
    FAIL("expected an exception");
  } catch (const InsufficientNeighborsError& e) {
    CHECK(e.available() == 0);
    CHECK(e.requested() == 10);
  }
}

TEST_CASE("leadfields are average referenced and linear in the moment") {
  HeadModelConfig cfg;
  cfg.grid_spacing = 0.0191;
  const HeadModel model(cfg);
  const auto l = model.leadfield(42);
  CHECK(l.colwise().sum().cwiseAbs().maxCoeff() < 1e-12 * l.cwiseAbs().maxCoeff());
  const Eigen::Vector3d m(0.3, -1.2, 0.5);
  CHECK(model.dipole_field({42, m}).isApprox(l * m, 1e-14));
  CHECK(model.nearest_voxel(model.voxels()[42] + Eigen::Vector3d(0.001, 0, 0)) == 42);
  CHECK(model.grid_distance(42, 42) == 0.0);
  CHECK_THROWS_AS(model.leadfield(model.voxel_count()), Error);
}

TEST_CASE("montages") {
  CHECK(montage::labels("10-10-61").size() == 61);
  const auto s = montage::standard_1020();
  CHECK(s.size() == 19);
  for (const auto& label : montage::labels("10-10-61")) {
    const auto p = montage::unit_position(label);
    REQUIRE(p.has_value());
    CHECK(p->norm() == doctest::Approx(1.0));
    CHECK((*p)(2) >= -1e-12);
  }
  CHECK(montage::unit_position("Cz")->isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK((*montage::unit_position("C3"))(0) < 0);
  CHECK((*montage::unit_position("Fz"))(1) > 0);
  CHECK(std::set<std::string>(s.begin(), s.end()).size() == 19);
  CHECK_FALSE(montage::unit_position("Q9").has_value());
  CHECK_THROWS_AS(montage::labels("bogus"), Error);

  HeadModelConfig cfg;
  cfg.channels = {"C3", "Cz", "C4"};
  CHECK(HeadModel(cfg).channel_count() == 3);
  cfg.channels = {"C3", "Q9"};
  CHECK_THROWS_AS(HeadModel{cfg}, Error);
}
