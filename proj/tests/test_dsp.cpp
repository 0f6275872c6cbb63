#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dipoleforge/dsp.hpp"
#include "dipoleforge/error.hpp"

using namespace dipoleforge;

namespace {

// scipy.signal: abs(sosfreqz(butter(4, band, 'bandpass', fs=100, output='sos'), f, fs=100))
const std::vector<double> kFreqs = {1, 5, 8, 10, 13, 20, 40};
const std::vector<double> kAlpha = {6.3616483471433903e-06, 0.011021629492589823, 0.70710678118654657,
                                    0.99999999614236135,    0.70710678118654613,  0.0088588414677540188,
                                    1.1206694418150529e-05};
const std::vector<double> kLowFlank = {3.6849386684132928e-05, 0.7071067811865448, 0.70710678118654779,
                                       0.058706167092713223,   0.0071101977997486071,
                                       0.00046313469697526063, 1.0618494222532951e-06};
const std::vector<double> kHighFlank = {5.8049780018757753e-08, 5.752104122229641e-05,
                                        0.0009315193154305247,  0.0068151867656130035,
                                        0.70710678118654513,    0.007389879161220643,
                                        2.3135193288043482e-06};

void check_response(double lo, double hi, const std::vector<double>& expected) {
  const auto sos = dsp::butterworth_bandpass(4, lo, hi, 100.0);
  CHECK(sos.size() == 4);
  for (std::size_t i = 0; i < kFreqs.size(); ++i)
    CHECK(std::abs(dsp::frequency_response(sos, kFreqs[i], 100.0)) ==
          doctest::Approx(expected[i]).epsilon(1e-9));
}

}  // namespace

TEST_CASE("band-pass magnitude response matches the reference design") {
  check_response(8.0, 13.0, kAlpha);
  check_response(5.0, 8.0, kLowFlank);
  check_response(13.0, 16.0, kHighFlank);
}

TEST_CASE("forward-backward filtering matches reference outputs") {
  std::vector<double> x(500);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double t = static_cast<double>(n) / 100.0;
    x[n] = std::sin(2 * std::numbers::pi * 10 * t) + 0.5 * std::sin(2 * std::numbers::pi * 3 * t + 0.3) +
           0.25 * std::cos(2 * std::numbers::pi * 20 * t);
  }
  // scipy.signal.sosfiltfilt(butter(4, (8, 13), 'bandpass', fs=100, output='sos'), x)
  const std::vector<std::pair<std::size_t, double>> expected = {
      {0, 0.006260560979246987},      {1, 0.5507336707619807},
      {50, -0.0035789357898118324},   {137, -0.9510842592965534},
      {250, 1.9578309131851324e-05},  {499, -0.14943179861237485}};
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  CHECK(dsp::filtfilt_padding(sos) == 27);
  std::vector<double> y(x.size());
  dsp::filtfilt(sos, x, y);
  for (const auto& [i, v] : expected) CHECK(y[i] == doctest::Approx(v).epsilon(1e-9).scale(1.0));

  SUBCASE("in-place filtering gives the same result") {
    std::vector<double> z = x;
    dsp::filtfilt(sos, z, z);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == y[i]);
  }
}

TEST_CASE("filtering is zero-phase for an in-band sinusoid") {
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  std::vector<double> x(2000), y(2000);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2 * std::numbers::pi * 10.5 * n / 100.0);
  dsp::filtfilt(sos, x, y);
  const double gain = std::norm(dsp::frequency_response(sos, 10.5, 100.0));
  for (std::size_t n = 500; n < 1500; ++n) CHECK(y[n] == doctest::Approx(gain * x[n]).scale(1.0).epsilon(1e-6));
}

TEST_CASE("filtering rejects signals shorter than the padding") {
  const auto sos = dsp::butterworth_bandpass(4, 8.0, 13.0, 100.0);
  std::vector<double> x(27, 1.0), y(27);
  CHECK_THROWS_AS(dsp::filtfilt(sos, x, y), Error);
}

TEST_CASE("band-pass design rejects invalid bands") {
  CHECK_THROWS_AS(dsp::butterworth_bandpass(4, 13.0, 8.0, 100.0), Error);
  CHECK_THROWS_AS(dsp::butterworth_bandpass(4, 8.0, 60.0, 100.0), Error);
  CHECK_THROWS_AS(dsp::butterworth_bandpass(0, 8.0, 13.0, 100.0), Error);
}
