// Serial reference against the OpenMP version of each kernel. Thread count
// follows DIPOLEFORGE_THREADS.

#include <random>

#include <benchmark/benchmark.h>

#include "dipoleforge/dipolefit.hpp"
#include "dipoleforge/dsp.hpp"
#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/kernels.hpp"

using namespace dipoleforge;

namespace {

const headmodel::HeadModel& model() {
  static const headmodel::HeadModel m{headmodel::HeadModelConfig{}};
  return m;
}

const dipolefit::MusicScanner& scanner() {
  static const dipolefit::MusicScanner s(model());
  return s;
}

Eigen::MatrixXd noise(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (auto& x : m.reshaped()) x = n(gen);
  return m;
}

void BM_LeadfieldTableSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::leadfield_table_serial(model()));
}
void BM_LeadfieldTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::leadfield_table(model()));
}

void BM_SubspaceScanSerial(benchmark::State& state) {
  const Eigen::VectorXd u = noise(61, 1).col(0).normalized();
  const auto& bases = scanner().bases();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::subspace_correlations_serial(bases, u));
}
void BM_SubspaceScan(benchmark::State& state) {
  const Eigen::VectorXd u = noise(61, 1).col(0).normalized();
  const auto& bases = scanner().bases();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::subspace_correlations(bases, u));
}

void BM_FiltfiltRowsSerial(benchmark::State& state) {
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  const Eigen::MatrixXd x = noise(61, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::filtfilt_rows_serial(sos, x));
}
void BM_FiltfiltRows(benchmark::State& state) {
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  const Eigen::MatrixXd x = noise(61, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::filtfilt_rows(sos, x));
}

}  // namespace

BENCHMARK(BM_LeadfieldTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeadfieldTable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubspaceScanSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SubspaceScan)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FiltfiltRowsSerial)->Arg(12000)->Arg(120000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiltfiltRows)->Arg(12000)->Arg(120000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  kernels::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
