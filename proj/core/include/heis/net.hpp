#pragma once

// First-fit greedy eps-nets in the Koranyi metric.
//
// Candidate pruning: net points are bucketed by the horizontal eps-cell of
// (x, y) and by a z-coordinate taken relative to the cell center, i.e. the z
// coordinate of g^{-1} p for the center g. In those coordinates the group
// twist inside a cell is bounded by eps^2 sqrt(2n), so a fixed window of
// z-buckets in the 3^{2n} neighbouring cells contains every net point
// within eps. The hash only prunes; membership is decided by the exact
// distance.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "heis/group.hpp"
#include "heis/point_cloud.hpp"

namespace heis {

/// Points closer than eps * (1 - kNetSlack) count as covered. The slack keeps
/// lattice-spaced inputs (exact multiples of eps) from being merged by
/// rounding.
inline constexpr double kNetSlack = 1e-9;

class GreedyNet {
 public:
  GreedyNet(int n, double eps);

  /// Adds p to the net unless some net point lies within eps of it.
  bool offer(std::span<const double> p);

  /// True if some net point lies within eps of p.
  bool covered(std::span<const double> p) const;

  std::size_t size() const noexcept { return centers_.size(); }
  double eps() const noexcept { return eps_; }
  const PointCloud& centers() const noexcept { return centers_; }

 private:
  std::uint64_t cell_hash(const std::int64_t* cell, std::int64_t bucket) const noexcept;
  void insert_key(std::uint64_t key, std::uint32_t idx);
  std::int32_t find_head(std::uint64_t key) const noexcept;
  void grow();

  int n_;
  double eps_;
  double lim4_;      // (eps (1 - slack))^4
  double window_;    // half-width of the z window
  double bucket_;    // z bucket size
  PointCloud centers_;
  std::vector<std::int32_t> next_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::int32_t> heads_;
  std::vector<std::uint8_t> used_;
  std::size_t filled_ = 0;
};

/// Indices (into the cloud, in input order) of the greedy eps-net.
std::vector<std::size_t> greedy_net_indices(const PointCloud& cloud, double eps);

std::vector<HPoint> greedy_net(const std::vector<HPoint>& points, double eps);

}  // namespace heis
