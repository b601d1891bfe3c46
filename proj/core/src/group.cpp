#include "heis/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heis {

namespace {

void require_finite(std::span<const double> c) {
  for (double v : c) {
    if (!std::isfinite(v)) throw std::invalid_argument("HPoint: non-finite coordinate");
  }
}

void require_same_dim(const HPoint& p, const HPoint& q, const char* op) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(p.dim()) + " vs " + std::to_string(q.dim()) + ")");
  }
}

// Neumaier summation of squares.
double compensated_norm2(std::span<const double> v) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double e : v) {
    const double term = e * e;
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

HPoint::HPoint(int n) : n_(n), c_(static_cast<std::size_t>(2 * n + 1), 0.0) {
  if (n < 1) throw std::invalid_argument("HPoint: n must be >= 1");
}

HPoint::HPoint(std::vector<double> x, std::vector<double> y, double z) {
  if (x.empty() || x.size() != y.size()) {
    throw std::invalid_argument("HPoint: x and y must be non-empty and of equal length");
  }
  n_ = static_cast<int>(x.size());
  c_.reserve(2 * x.size() + 1);
  c_.insert(c_.end(), x.begin(), x.end());
  c_.insert(c_.end(), y.begin(), y.end());
  c_.push_back(z);
  require_finite(c_);
}

HPoint HPoint::from_coords(std::span<const double> coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0) {
    throw std::invalid_argument("HPoint: packed coordinates must have odd length 2n+1 >= 3");
  }
  require_finite(coords);
  HPoint p;
  p.n_ = static_cast<int>(coords.size() / 2);
  p.c_.assign(coords.begin(), coords.end());
  return p;
}

bool HPoint::is_neutral() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_same_dim(p, q, "group_mul");
  std::vector<double> out(p.coords().size());
  coords::mul(p.coords(), q.coords(), out);
  return HPoint::from_coords(out);
}

HPoint inverse(const HPoint& p) {
  std::vector<double> out(p.coords().begin(), p.coords().end());
  for (double& v : out) v = -v;
  return HPoint::from_coords(out);
}

double koranyi_norm(const HPoint& p) { return coords::norm(p.coords()); }

double distance(const HPoint& p, const HPoint& q) {
  require_same_dim(p, q, "distance");
  return coords::distance(p.coords(), q.coords());
}

HPoint dilate(const HPoint& p, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("dilate: s must be positive");
  std::vector<double> out(p.coords().begin(), p.coords().end());
  for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] *= s;
  out.back() *= s * s;
  return HPoint::from_coords(out);
}

double horizontal_norm2(const HPoint& p) { return compensated_norm2(p.horizontal()); }

namespace coords {

double sigma(std::span<const double> p, std::span<const double> q) noexcept {
  const int n = dim_of(p);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p[i] * q[n + i] - p[n + i] * q[i];
  return s;
}

double norm(std::span<const double> p) noexcept {
  const double h = compensated_norm2(p.first(p.size() - 1));
  const double z = p.back();
  return std::sqrt(std::sqrt(h * h + z * z));
}

double distance(std::span<const double> p, std::span<const double> q) noexcept {
  const std::size_t m = p.size() - 1;
  if (m == 2) {
    const double dx = q[0] - p[0];
    const double dy = q[1] - p[1];
    const double dz = q[2] - p[2] - 2.0 * (p[0] * q[1] - p[1] * q[0]);
    const double h = dx * dx + dy * dy;
    return std::sqrt(std::sqrt(h * h + dz * dz));
  }
  double h = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = q[i] - p[i];
    h += d * d;
  }
  const double dz = q[m] - p[m] - 2.0 * sigma(p, q);
  return std::sqrt(std::sqrt(h * h + dz * dz));
}

void mul(std::span<const double> p, std::span<const double> q, std::span<double> out) noexcept {
  const std::size_t m = p.size() - 1;
  for (std::size_t i = 0; i < m; ++i) out[i] = p[i] + q[i];
  out[m] = p[m] + q[m] + 2.0 * sigma(p, q);
}

void left_difference(std::span<const double> p, std::span<const double> q,
                     std::span<double> out) noexcept {
  const std::size_t m = p.size() - 1;
  for (std::size_t i = 0; i < m; ++i) out[i] = q[i] - p[i];
  out[m] = q[m] - p[m] - 2.0 * sigma(p, q);
}

}  // namespace coords

}  // namespace heis
