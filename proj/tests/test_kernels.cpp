#include <cstdlib>

#include "doctest.h"
#include "dipoleforge/dipolefit.hpp"
#include "dipoleforge/kernels.hpp"
#include "oracles.hpp"

using namespace dipoleforge;

namespace {

headmodel::HeadModel small_model() {
  headmodel::HeadModelConfig cfg;
  cfg.grid_spacing = 0.025;
  return headmodel::HeadModel(cfg);
}

}  // namespace

TEST_CASE("parallel leadfield table equals the serial one") {
  const auto model = small_model();
  const auto a = kernels::leadfield_table_serial(model);
  const auto b = kernels::leadfield_table(model);
  CHECK(a.voxels() == model.voxel_count());
  CHECK(a.channels() == model.channel_count());
  CHECK(a.raw() == b.raw());
  for (std::size_t v : {0ul, model.voxel_count() / 2, model.voxel_count() - 1})
    CHECK(Eigen::MatrixXd(a.at(v)) == Eigen::MatrixXd(model.leadfield(v)));
}

TEST_CASE("parallel subspace scan equals the serial one") {
  const auto model = small_model();
  const dipolefit::MusicScanner scanner(model);
  Eigen::VectorXd u = oracle::gaussian(static_cast<Eigen::Index>(model.channel_count()), 1, 5);
  u.normalize();
  const auto a = kernels::subspace_correlations_serial(scanner.bases(), u);
  const auto b = kernels::subspace_correlations(scanner.bases(), u);
  CHECK(a == b);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("parallel row filtering equals the serial one") {
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  const Eigen::MatrixXd x = oracle::gaussian(17, 700, 9);
  const auto a = kernels::filtfilt_rows_serial(sos, x);
  const auto b = kernels::filtfilt_rows(sos, x);
  CHECK(a == b);
  std::vector<double> row(700), out(700);
  for (int i = 0; i < 700; ++i) row[static_cast<std::size_t>(i)] = x(3, i);
  dsp::filtfilt(sos, row, out);
  for (int i = 0; i < 700; ++i) CHECK(a(3, i) == out[static_cast<std::size_t>(i)]);
}

TEST_CASE("thread cap is read from the environment") {
  ::setenv("DIPOLEFORGE_THREADS", "1", 1);
  CHECK(kernels::configure_threads_from_env() == 1);
  ::unsetenv("DIPOLEFORGE_THREADS");
  CHECK(kernels::configure_threads_from_env() >= 1);
}
