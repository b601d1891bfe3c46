#include "heis/net.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "heis/random.hpp"

namespace heis {

namespace {

constexpr int kMaxN = 8;
constexpr std::int32_t kNone = -1;

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

}  // namespace

GreedyNet::GreedyNet(int n, double eps) : n_(n), eps_(eps), centers_(n) {
  if (n < 1 || n > kMaxN) throw std::invalid_argument("GreedyNet: n must be in [1, 8]");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("GreedyNet: eps must be > 0");
  const double e = eps * (1.0 - kNetSlack);
  lim4_ = e * e * e * e;
  window_ = eps * eps * (1.0 + std::sqrt(2.0 * n)) * (1.0 + 1e-9);
  bucket_ = window_;
  keys_.assign(1024, 0);
  heads_.assign(1024, kNone);
  used_.assign(1024, 0);
}

std::uint64_t GreedyNet::cell_hash(const std::int64_t* cell, std::int64_t bucket) const noexcept {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (int i = 0; i < 2 * n_; ++i) h = mix(h, static_cast<std::uint64_t>(cell[i]));
  return mix(h, static_cast<std::uint64_t>(bucket));
}

std::int32_t GreedyNet::find_head(std::uint64_t key) const noexcept {
  const std::size_t mask = keys_.size() - 1;
  for (std::size_t slot = key & mask;; slot = (slot + 1) & mask) {
    if (!used_[slot]) return kNone;
    if (keys_[slot] == key) return heads_[slot];
  }
}

void GreedyNet::grow() {
  std::vector<std::uint64_t> old_keys = std::move(keys_);
  std::vector<std::int32_t> old_heads = std::move(heads_);
  std::vector<std::uint8_t> old_used = std::move(used_);
  const std::size_t cap = old_keys.size() * 2;
  keys_.assign(cap, 0);
  heads_.assign(cap, kNone);
  used_.assign(cap, 0);
  const std::size_t mask = cap - 1;
  for (std::size_t i = 0; i < old_keys.size(); ++i) {
    if (!old_used[i]) continue;
    std::size_t slot = old_keys[i] & mask;
    while (used_[slot]) slot = (slot + 1) & mask;
    used_[slot] = 1;
    keys_[slot] = old_keys[i];
    heads_[slot] = old_heads[i];
  }
}

void GreedyNet::insert_key(std::uint64_t key, std::uint32_t idx) {
  if (2 * (filled_ + 1) > keys_.size()) grow();
  const std::size_t mask = keys_.size() - 1;
  std::size_t slot = key & mask;
  while (used_[slot] && keys_[slot] != key) slot = (slot + 1) & mask;
  if (!used_[slot]) {
    used_[slot] = 1;
    keys_[slot] = key;
    heads_[slot] = kNone;
    ++filled_;
  }
  next_.push_back(heads_[slot]);
  heads_[slot] = static_cast<std::int32_t>(idx);
}

bool GreedyNet::covered(std::span<const double> p) const {
  const int m = 2 * n_;
  std::array<std::int64_t, 2 * kMaxN> base{};
  std::array<std::int64_t, 2 * kMaxN> cell{};
  std::array<int, 2 * kMaxN> off{};
  for (int i = 0; i < m; ++i) base[i] = static_cast<std::int64_t>(std::floor(p[i] / eps_));
  for (int i = 0; i < m; ++i) off[i] = -1;
  const double zp = p[m];
  const double slack_z = 1e-12 * (std::abs(zp) + 1.0);
  const double* data = centers_.data().data();
  const std::size_t stride = centers_.stride();
  while (true) {
    // g = center of the neighbouring cell; zeta = z - 2 sigma(g, w).
    double sg = 0.0;
    for (int i = 0; i < m; ++i) cell[i] = base[i] + off[i];
    for (int i = 0; i < n_; ++i) {
      const double gx = (static_cast<double>(cell[i]) + 0.5) * eps_;
      const double gy = (static_cast<double>(cell[n_ + i]) + 0.5) * eps_;
      sg += gx * p[n_ + i] - gy * p[i];
    }
    const double zeta = zp - 2.0 * sg;
    const double w = window_ + slack_z;
    const auto b_lo = static_cast<std::int64_t>(std::floor((zeta - w) / bucket_));
    const auto b_hi = static_cast<std::int64_t>(std::floor((zeta + w) / bucket_));
    for (std::int64_t b = b_lo; b <= b_hi; ++b) {
      for (std::int32_t j = find_head(cell_hash(cell.data(), b)); j != kNone; j = next_[j]) {
        const double* q = data + static_cast<std::size_t>(j) * stride;
        double h = 0.0;
        for (int i = 0; i < m; ++i) {
          const double dd = q[i] - p[i];
          h += dd * dd;
        }
        if (h * h >= lim4_) continue;
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += p[i] * q[n_ + i] - p[n_ + i] * q[i];
        const double dz = q[m] - zp - 2.0 * s;
        if (h * h + dz * dz < lim4_) return true;
      }
    }
    int k = 0;
    while (k < m && off[k] == 1) off[k++] = -1;
    if (k == m) break;
    ++off[k];
  }
  return false;
}

bool GreedyNet::offer(std::span<const double> p) {
  if (p.size() != centers_.stride()) throw std::invalid_argument("GreedyNet: dimension mismatch");
  if (covered(p)) return false;
  const int m = 2 * n_;
  std::array<std::int64_t, 2 * kMaxN> cell{};
  double sg = 0.0;
  for (int i = 0; i < m; ++i) cell[i] = static_cast<std::int64_t>(std::floor(p[i] / eps_));
  for (int i = 0; i < n_; ++i) {
    const double gx = (static_cast<double>(cell[i]) + 0.5) * eps_;
    const double gy = (static_cast<double>(cell[n_ + i]) + 0.5) * eps_;
    sg += gx * p[n_ + i] - gy * p[i];
  }
  const double zeta = p[m] - 2.0 * sg;
  const auto bucket = static_cast<std::int64_t>(std::floor(zeta / bucket_));
  const auto idx = static_cast<std::uint32_t>(centers_.size());
  centers_.push_back(p);
  insert_key(cell_hash(cell.data(), bucket), idx);
  return true;
}

std::vector<std::size_t> greedy_net_indices(const PointCloud& cloud, double eps) {
  GreedyNet net(cloud.dim(), eps);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (net.offer(cloud[i])) out.push_back(i);
  }
  return out;
}

std::vector<HPoint> greedy_net(const std::vector<HPoint>& points, double eps) {
  if (points.empty()) {
    if (!(eps > 0.0)) throw std::invalid_argument("greedy_net: eps must be > 0");
    return {};
  }
  PointCloud cloud(points.front().dim());
  cloud.reserve(points.size());
  for (const auto& p : points) cloud.push_back(p);
  std::vector<HPoint> out;
  for (std::size_t i : greedy_net_indices(cloud, eps)) out.push_back(points[i]);
  return out;
}

}  // namespace heis
