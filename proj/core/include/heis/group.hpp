#pragma once

// Arithmetic of the Heisenberg group H^n = R^n x R^n x R.
//
// Points are stored as a flat coordinate vector (x_1..x_n, y_1..y_n, z) so
// that the same layout serves single points and packed point clouds. The
// free functions in `heis::coords` operate on such spans directly and are
// what the hot loops (nets, Monte Carlo) call.

#include <cstddef>
#include <span>
#include <vector>

namespace heis {

class HPoint {
 public:
  HPoint() = default;

  /// Neutral element of H^n.
  explicit HPoint(int n);

  HPoint(std::vector<double> x, std::vector<double> y, double z);

  /// Builds a point from packed coordinates (x..., y..., z) of length 2n+1.
  static HPoint from_coords(std::span<const double> coords);

  int dim() const noexcept { return n_; }
  std::span<const double> x() const noexcept { return {c_.data(), static_cast<std::size_t>(n_)}; }
  std::span<const double> y() const noexcept {
    return {c_.data() + n_, static_cast<std::size_t>(n_)};
  }
  /// The horizontal part (x, y) in R^{2n}.
  std::span<const double> horizontal() const noexcept {
    return {c_.data(), static_cast<std::size_t>(2 * n_)};
  }
  double z() const noexcept { return c_.back(); }
  std::span<const double> coords() const noexcept { return c_; }

  bool is_neutral() const noexcept;

  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  int n_ = 0;
  std::vector<double> c_;
};

HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint inverse(const HPoint& p);
double koranyi_norm(const HPoint& p);
double distance(const HPoint& p, const HPoint& q);

/// Intrinsic dilation (x, y, z) -> (s x, s y, s^2 z); requires s > 0.
HPoint dilate(const HPoint& p, double s);

/// Squared Euclidean norm of the horizontal part, compensated summation.
double horizontal_norm2(const HPoint& p);

namespace coords {

// All spans hold packed coordinates of length 2n+1; n is inferred from the
// size. No dimension checks happen here; callers validate once up front.

inline int dim_of(std::span<const double> c) noexcept { return static_cast<int>(c.size() / 2); }

/// sigma((x,y),(x',y')) = <x,y'> - <y,x'> on the horizontal parts.
double sigma(std::span<const double> p, std::span<const double> q) noexcept;

double norm(std::span<const double> p) noexcept;
double distance(std::span<const double> p, std::span<const double> q) noexcept;

/// out = p * q. `out` may alias neither input.
void mul(std::span<const double> p, std::span<const double> q, std::span<double> out) noexcept;

/// out = p^{-1} * q, the difference whose norm is the distance.
void left_difference(std::span<const double> p, std::span<const double> q,
                     std::span<double> out) noexcept;

}  // namespace coords

}  // namespace heis
