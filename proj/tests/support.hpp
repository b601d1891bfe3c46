#pragma once

// Test helpers and independent oracles. Nothing here calls the library's
// arithmetic; the oracles are transcribed directly from the definitions.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "heis/group.hpp"
#include "heis/kind.hpp"
#include "heis/random.hpp"

namespace heis::test {

/// Group law written out componentwise.
inline std::vector<double> oracle_mul(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = p.size() / 2;
  std::vector<double> r(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += p[i] * q[n + i] - p[n + i] * q[i];
  for (std::size_t i = 0; i < 2 * n; ++i) r[i] = p[i] + q[i];
  r[2 * n] = p[2 * n] + q[2 * n] + 2.0 * s;
  return r;
}

inline double oracle_norm(const std::vector<double>& p) {
  const std::size_t n = p.size() / 2;
  double h = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) h += p[i] * p[i];
  return std::pow(h * h + p[2 * n] * p[2 * n], 0.25);
}

/// K(m) = int_{|u|<=1} 2 sqrt(1-|u|^4) du in R^m, in polar coordinates:
/// |S^{m-1}| * 2 * int_0^1 rho^{m-1} sqrt(1-rho^4) drho = |S^{m-1}| B(m/4, 3/2) / 2.
inline double oracle_slice_constant(int m) {
  const double area = 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
  return area * std::beta(m / 4.0, 1.5) / 2.0;
}

inline double oracle_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// Phi^t(r1, r2) written out case by case. kind 1 and 2 are the rectangle
/// types, 3 the Euclidean-split family (d unused).
inline double oracle_phi(Kind kind, int n, int d, double t, double r1, double r2) {
  const double Q = 2.0 * n + 2.0;
  using std::pow;
  if (kind == Kind::EuclideanSplit) {
    if (r1 <= r2) return t <= 2 ? pow(r2, t) : pow(r1, t - 2) * r2 * r2;
    if (t <= 2 * n + 1) return pow(r1, t);
    return pow(r1, 2 * (2 * n + 1) - t) * pow(r2, 2 * (t - (2 * n + 1)));
  }
  if (r1 <= r2) {
    if (t <= Q - d) return pow(r2, t);
    return pow(r1, t + d - Q) * pow(r2, Q - d);
  }
  if (t <= d) return pow(r1, t);
  if (kind == Kind::Type2) return pow(r1, d) * pow(r2, t - d);
  if (t <= d + 2) return pow(r1, (t + d) / 2) * pow(r2, (t - d) / 2);
  if (t < 2 * n + 1) return pow(r1, d + 1) * pow(r2, t - d - 1);
  return pow(r1, Q + d - t) * pow(r2, 2 * t - (Q + d));
}

inline std::vector<double> to_vec(const HPoint& p) { return {p.coords().begin(), p.coords().end()}; }

/// Uniform point of the box [-h, h]^{2n} x [-h^2, h^2].
inline HPoint random_point(Rng& rng, int n, double h = 1.0) {
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (int i = 0; i < 2 * n; ++i) c[i] = rng.uniform(-h, h);
  c[2 * n] = rng.uniform(-h * h, h * h);
  return HPoint::from_coords(c);
}

/// Uniform point of the unit Koranyi ball.
inline HPoint random_ball_point(Rng& rng, int n) {
  while (true) {
    HPoint p = random_point(rng, n);
    if (oracle_norm(to_vec(p)) <= 1.0) return p;
  }
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace heis::test
