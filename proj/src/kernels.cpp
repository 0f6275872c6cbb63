#include "dipoleforge/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "dipoleforge/error.hpp"

namespace dipoleforge::kernels {

namespace {

void fill_leadfield(const headmodel::HeadModel& model, LeadfieldTable& table, std::size_t v) {
  table.at(v) = model.leadfield(v);
}

double correlation(const SubspaceBasis& b, const Eigen::VectorXd& u) {
  double s = 0.0;
  for (int k = 0; k < b.rank; ++k) {
    const double p = b.q.col(k).dot(u);
    s += p * p;
  }
  return std::sqrt(s);
}

std::vector<double> row_copy(const Eigen::MatrixXd& data, Eigen::Index r) {
  std::vector<double> row(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index t = 0; t < data.cols(); ++t) row[static_cast<std::size_t>(t)] = data(r, t);
  return row;
}

void check_length(const dsp::SosFilter& sos, const Eigen::MatrixXd& data) {
  const auto pad = dsp::filtfilt_padding(sos);
  if (data.cols() <= static_cast<Eigen::Index>(pad))
    reject("signal of " + std::to_string(data.cols()) + " samples too short for filter padding " +
           std::to_string(pad));
}

void filter_row(const dsp::SosFilter& sos, const Eigen::MatrixXd& in, Eigen::MatrixXd& out,
                Eigen::Index r) {
  auto row = row_copy(in, r);
  dsp::filtfilt(sos, row, row);
  for (Eigen::Index t = 0; t < in.cols(); ++t) out(r, t) = row[static_cast<std::size_t>(t)];
}

}  // namespace

LeadfieldTable leadfield_table_serial(const headmodel::HeadModel& model) {
  LeadfieldTable table(model.voxel_count(), model.channel_count());
  for (std::size_t v = 0; v < model.voxel_count(); ++v) fill_leadfield(model, table, v);
  return table;
}

LeadfieldTable leadfield_table(const headmodel::HeadModel& model) {
  LeadfieldTable table(model.voxel_count(), model.channel_count());
  const auto n = static_cast<std::ptrdiff_t>(model.voxel_count());
#pragma omp parallel for schedule(dynamic, 16) if (!omp_in_parallel())
  for (std::ptrdiff_t v = 0; v < n; ++v) fill_leadfield(model, table, static_cast<std::size_t>(v));
  return table;
}

Eigen::VectorXd subspace_correlations_serial(const std::vector<SubspaceBasis>& bases,
                                             const Eigen::VectorXd& unit_pattern) {
  Eigen::VectorXd rho(static_cast<Eigen::Index>(bases.size()));
  for (std::size_t v = 0; v < bases.size(); ++v)
    rho[static_cast<Eigen::Index>(v)] = correlation(bases[v], unit_pattern);
  return rho;
}

Eigen::VectorXd subspace_correlations(const std::vector<SubspaceBasis>& bases,
                                      const Eigen::VectorXd& unit_pattern) {
  Eigen::VectorXd rho(static_cast<Eigen::Index>(bases.size()));
  const auto n = static_cast<std::ptrdiff_t>(bases.size());
#pragma omp parallel for schedule(static) if (!omp_in_parallel() && n > 512)
  for (std::ptrdiff_t v = 0; v < n; ++v)
    rho[v] = correlation(bases[static_cast<std::size_t>(v)], unit_pattern);
  return rho;
}

Eigen::MatrixXd filtfilt_rows_serial(const dsp::SosFilter& sos, const Eigen::MatrixXd& data) {
  check_length(sos, data);
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index r = 0; r < data.rows(); ++r) filter_row(sos, data, out, r);
  return out;
}

Eigen::MatrixXd filtfilt_rows(const dsp::SosFilter& sos, const Eigen::MatrixXd& data) {
  check_length(sos, data);
  Eigen::MatrixXd out(data.rows(), data.cols());
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
  for (std::ptrdiff_t r = 0; r < n; ++r) filter_row(sos, data, out, r);
  return out;
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("DIPOLEFORGE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) omp_set_num_threads(static_cast<int>(n));
  }
  return omp_get_max_threads();
}

}  // namespace dipoleforge::kernels
