#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace dipoleforge::dsp {

/// One second-order section, a[0] == 1.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{};
};

using SosFilter = std::vector<Biquad>;

/// Digital Butterworth band-pass of the given prototype order (2*order poles),
/// designed analytically: analog prototype, low-pass to band-pass transform and
/// a pre-warped bilinear transform. Section layout follows scipy's
/// butter(..., output='sos') up to section order.
SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate);

std::complex<double> frequency_response(const SosFilter& sos, double freq_hz, double sample_rate);

/// Number of samples of odd extension added at each end by filtfilt.
std::size_t filtfilt_padding(const SosFilter& sos);

/// Zero-phase forward-backward filtering with odd-extension padding and
/// steady-state section initial conditions. `in` and `out` may alias.
/// Requires in.size() > filtfilt_padding(sos).
void filtfilt(const SosFilter& sos, std::span<const double> in, std::span<double> out);

}  // namespace dipoleforge::dsp
