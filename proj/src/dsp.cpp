#include "dipoleforge/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dipoleforge/error.hpp"

namespace dipoleforge::dsp {

using cplx = std::complex<double>;

SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate) {
  if (order < 1) reject("filter order must be >= 1");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < sample_rate / 2.0))
    reject("invalid band [" + std::to_string(low_hz) + ", " + std::to_string(high_hz) +
           "] Hz for sample rate " + std::to_string(sample_rate));

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sample_rate;
  const double wl = fs2 * std::tan(pi * low_hz / sample_rate);
  const double wh = fs2 * std::tan(pi * high_hz / sample_rate);
  const double bw = wh - wl;
  const double w0 = std::sqrt(wl * wh);

  // Analog prototype poles on the left half of the unit circle.
  std::vector<cplx> proto;
  for (int m = -order + 1; m < order; m += 2)
    proto.push_back(-std::exp(cplx(0.0, pi * m / (2.0 * order))));

  // Low-pass to band-pass: each prototype pole splits into two.
  std::vector<cplx> poles;
  for (const cplx& p : proto) {
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0 * w0);
    poles.push_back(half + root);
    poles.push_back(half - root);
  }
  // `order` zeros at s = 0, gain bw^order.
  double gain = std::pow(bw, order);

  // Bilinear transform. Zeros at s=0 map to z=1; the remaining `order` zeros
  // at infinity map to z=-1.
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (int i = 0; i < order; ++i) num *= cplx(fs2, 0.0);
  std::vector<cplx> zpoles;
  for (const cplx& p : poles) {
    den *= (fs2 - p);
    zpoles.push_back((fs2 + p) / (fs2 - p));
  }
  gain *= (num / den).real();

  std::vector<cplx> upper;
  for (const cplx& p : zpoles)
    if (p.imag() > 0.0) upper.push_back(p);
  if (static_cast<int>(upper.size()) != order)
    reject("band-pass design produced real poles; band too narrow or too wide");
  // Poles farthest from the unit circle first, as scipy's zpk2sos orders them.
  std::sort(upper.begin(), upper.end(),
            [](const cplx& x, const cplx& y) { return std::abs(x) < std::abs(y); });

  SosFilter sos;
  for (const cplx& p : upper) {
    Biquad s;
    s.b = {1.0, 0.0, -1.0};
    s.a = {1.0, -2.0 * p.real(), std::norm(p)};
    sos.push_back(s);
  }
  for (double& c : sos.front().b) c *= gain;
  return sos;
}

cplx frequency_response(const SosFilter& sos, double freq_hz, double sample_rate) {
  const cplx z1 = std::exp(cplx(0.0, -2.0 * std::numbers::pi * freq_hz / sample_rate));
  const cplx z2 = z1 * z1;
  cplx h(1.0, 0.0);
  for (const auto& s : sos)
    h *= (s.b[0] + s.b[1] * z1 + s.b[2] * z2) / (s.a[0] + s.a[1] * z1 + s.a[2] * z2);
  return h;
}

std::size_t filtfilt_padding(const SosFilter& sos) {
  std::size_t zero_b2 = 0, zero_a2 = 0;
  for (const auto& s : sos) {
    zero_b2 += s.b[2] == 0.0;
    zero_a2 += s.a[2] == 0.0;
  }
  return 3 * (2 * sos.size() + 1 - std::min(zero_b2, zero_a2));
}

namespace {

using State = std::array<double, 2>;

// Steady state of a transposed direct-form II section for a unit step.
State section_steady_state(const Biquad& s) {
  // (I - A^T) zi = b[1:] - a[1:] * b0 with A the companion matrix of a.
  const double m00 = 1.0 + s.a[1], m01 = -1.0;
  const double m10 = s.a[2], m11 = 1.0;
  const double r0 = s.b[1] - s.a[1] * s.b[0];
  const double r1 = s.b[2] - s.a[2] * s.b[0];
  const double det = m00 * m11 - m01 * m10;
  return {(r0 * m11 - m01 * r1) / det, (m00 * r1 - m10 * r0) / det};
}

std::vector<State> cascade_steady_state(const SosFilter& sos) {
  std::vector<State> zi(sos.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const State z = section_steady_state(sos[i]);
    zi[i] = {scale * z[0], scale * z[1]};
    const auto& s = sos[i];
    scale *= (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
  }
  return zi;
}

void run_cascade(const SosFilter& sos, const std::vector<State>& zi, std::vector<double>& x) {
  const double x0 = x.front();
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto& s = sos[k];
    double z0 = zi[k][0] * x0, z1 = zi[k][1] * x0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b[0] * in + z0;
      z0 = s.b[1] * in - s.a[1] * out + z1;
      z1 = s.b[2] * in - s.a[2] * out;
      v = out;
    }
  }
}

}  // namespace

void filtfilt(const SosFilter& sos, std::span<const double> in, std::span<double> out) {
  const std::size_t n = in.size();
  const std::size_t pad = filtfilt_padding(sos);
  if (out.size() != n) reject("filtfilt output length mismatch");
  if (n <= pad)
    reject("signal of " + std::to_string(n) + " samples too short for padding of " +
           std::to_string(pad));

  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * in[0] - in[pad - i];
  std::copy(in.begin(), in.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * in[n - 1] - in[n - 2 - i];

  const auto zi = cascade_steady_state(sos);
  run_cascade(sos, zi, ext);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sos, zi, ext);
  std::reverse(ext.begin(), ext.end());
  std::copy_n(ext.begin() + static_cast<std::ptrdiff_t>(pad), n, out.begin());
}

}  // namespace dipoleforge::dsp
