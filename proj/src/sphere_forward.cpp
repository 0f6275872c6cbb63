#include "dipoleforge/sphere_forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dipoleforge/error.hpp"

namespace dipoleforge::headmodel {

namespace {

// Power series in m = 1/n truncated after m^2.
struct Series2 {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;

  friend Series2 operator*(const Series2& x, const Series2& y) {
    return {x.c0 * y.c0, x.c0 * y.c1 + x.c1 * y.c0, x.c0 * y.c2 + x.c1 * y.c1 + x.c2 * y.c0};
  }
  friend Series2 operator*(double s, const Series2& x) { return {s * x.c0, s * x.c1, s * x.c2}; }
};

// 1 / (q + s m)
Series2 reciprocal(double q, double s) {
  const double r = s / q;
  return {1.0 / q, -r / q, r * r / q};
}

struct Compensated {
  double sum = 0.0, carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Gradients with respect to the source position p (|p| < 1) of
//   G_a = sum_{n>=1} |p|^n P_n,  G_b = sum |p|^n P_n / n,  G_c = sum |p|^n P_n / (n+1)
// evaluated at the unit electrode direction e.
struct ClosedGradients {
  Eigen::Vector3d a, b, c;
};

ClosedGradients closed_gradients(const Eigen::Vector3d& e, const Eigen::Vector3d& p) {
  const double t = p.norm();
  const double ed = e.dot(p);
  const Eigen::Vector3d d = e - p;
  const double dn = d.norm();
  const Eigen::Vector3d rh = p / t;

  ClosedGradients g;
  g.a = d / (dn * dn * dn);
  g.b = (e + d / dn) / (1.0 - ed + dn);

  // t * (G_c + 1) = H, with two algebraically equal forms; each one is free
  // of cancellation on its own half of the sphere.
  double h;
  Eigen::Vector3d gh;
  if (ed >= 0.0) {
    const double num = t + ed;
    const double den = t * dn - t * t + ed;
    h = std::log(num) - std::log(den);
    gh = (rh + e) / num - (rh * dn - t * d / dn - 2.0 * p + e) / den;
  } else {
    const double num = t * t - ed + t * dn;
    const double den = t - ed;
    h = std::log(num) - std::log(den);
    gh = (2.0 * p - e + rh * dn - t * d / dn) / num - (rh - e) / den;
  }
  g.c = gh / t - h * rh / (t * t);
  return g;
}

}  // namespace

double SphereForward::shell_coefficient(const SphereGeometry& geometry, int n) {
  const double outer = geometry.radii[2];
  const double nn = n;
  // Work inward from the scalp with B = 1 in the outer layer; the insulating
  // boundary fixes A = (n+1)/n there.
  double a = (nn + 1.0) / nn;
  double b = 1.0;
  for (int i = 1; i >= 0; --i) {
    const double r = geometry.radii[static_cast<std::size_t>(i)] / outer;
    const double s = geometry.conductivities[static_cast<std::size_t>(i) + 1] /
                     geometry.conductivities[static_cast<std::size_t>(i)];
    const double rn = std::pow(r, nn);
    const double rn1 = rn * r;
    const double u = a * rn;
    const double w = b / rn1;
    const double v = u + w;
    const double g = s * (nn * u - (nn + 1.0) * w);
    const double ui = ((nn + 1.0) * v + g) / (2.0 * nn + 1.0);
    const double wi = (nn * v - g) / (2.0 * nn + 1.0);
    a = ui / rn;
    b = wi * rn1;
  }
  return ((nn + 1.0) / nn + 1.0) / b;
}

SphereForward::SphereForward(const SphereGeometry& geometry, int degree, SeriesMode mode)
    : geometry_(geometry), degree_(degree), mode_(mode) {
  const auto& r = geometry.radii;
  const auto& sigma = geometry.conductivities;
  if (!(0.0 < r[0] && r[0] < r[1] && r[1] < r[2]))
    misconfigured("sphere radii must satisfy 0 < brain < skull < scalp");
  for (double s : sigma)
    if (!(s > 0.0)) misconfigured("conductivities must be positive");
  if (degree < 1 || degree > 1000) misconfigured("series degree must be in [1, 1000]");

  scale_ = 1.0 / (4.0 * std::numbers::pi * sigma[0] * r[2] * r[2]);
  k1_ = shell_coefficient(geometry, 1);

  if (mode == SeriesMode::Accelerated) {
    const double s1 = sigma[1] / sigma[0];
    const double s2 = sigma[2] / sigma[1];
    const Series2 inv1 = reciprocal(1.0 + s1, s1);
    const Series2 inv2 = reciprocal(1.0 + s2, s2);
    const Series2 one_plus_m{1.0, 1.0, 0.0};
    // Large-n limit of k_n with reflections dropped, as a series in 1/n.
    const Series2 limit = Series2{8.0, 12.0, 6.0} * inv1 * inv2;
    // First-order reflections inside the scalp and the skull.
    const Series2 scalp = -(1.0 - s2) * (limit * one_plus_m * inv2);
    const Series2 skull = -(1.0 - s1) * (1.0 - s2) * (limit * inv1 * one_plus_m * inv2);

    auto term = [](const Series2& f, double rho) {
      return ClosedTerm{f.c0, f.c1 + f.c2, -f.c2, rho};
    };
    closed_.push_back(term(limit, 1.0));
    if (s2 != 1.0) closed_.push_back(term(scalp, r[1] / r[2]));
    if (s1 != 1.0 && s2 != 1.0) closed_.push_back(term(skull, r[0] / r[1]));
  }

  remainder_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int n = 1; n <= degree; ++n) {
    double c = shell_coefficient(geometry, n);
    for (const auto& t : closed_)
      c -= (t.alpha + t.beta / n + t.gamma / (n + 1.0)) * std::pow(t.rho, 2.0 * n + 1.0);
    remainder_[static_cast<std::size_t>(n)] = c;
  }
}

Eigen::RowVector3d SphereForward::gain(const Eigen::Vector3d& electrode,
                                       const Eigen::Vector3d& position) const {
  const double outer = geometry_.radii[2];
  const Eigen::Vector3d e = electrode.normalized();
  const Eigen::Vector3d p = position / outer;
  const double t = p.norm();
  if (!(t < geometry_.radii[0] / outer)) reject("dipole lies outside the innermost sphere");
  if (t < 1e-9) return (scale_ * k1_ * e).transpose();

  const Eigen::Vector3d rh = p / t;
  const double x = std::clamp(e.dot(rh), -1.0, 1.0);

  // Legendre P_n and P_n' by upward recurrence.
  Compensated radial, tangential;
  double p_prev = 1.0, p_cur = x;        // P_{n-1}, P_n
  double dp_prev = 0.0;                  // P'_{n-1}
  double dp_cur = 1.0;                   // P'_n
  double tpow = 1.0;                     // t^{n-1}
  for (int n = 1; n <= degree_; ++n) {
    if (n > 1) {
      const double p_next = ((2.0 * n - 1.0) * x * p_cur - (n - 1.0) * p_prev) / n;
      p_prev = p_cur;
      p_cur = p_next;
      const double dp_next = dp_prev + (2.0 * n - 1.0) * p_prev;
      dp_prev = dp_cur;
      dp_cur = dp_next;
      tpow *= t;
    }
    const double c = remainder_[static_cast<std::size_t>(n)] * tpow;
    radial.add(c * n * p_cur);
    tangential.add(c * dp_cur);
  }

  Eigen::Vector3d g = (radial.sum - x * tangential.sum) * rh + tangential.sum * e;
  for (const auto& term : closed_) {
    const double s = term.rho * term.rho;
    const auto cg = closed_gradients(e, s * p);
    g += term.rho * s * (term.alpha * cg.a + term.beta * cg.b + term.gamma * cg.c);
  }
  return (scale_ * g).transpose();
}

}  // namespace dipoleforge::headmodel
