#pragma once

// Rectangles of type 1 and type 2 along an isotropic frame, and the
// Euclidean-split rectangle {|(x,y)| <= r1, |z| <= r2^2}, all left-translated
// to a center. Closed sets: boundary points are members.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "heis/group.hpp"
#include "heis/kind.hpp"
#include "heis/point_cloud.hpp"
#include "heis/splitting.hpp"

namespace heis {

class Rectangle {
 public:
  /// For EuclideanSplit the frame is ignored; pass any frame of matching n.
  Rectangle(Kind kind, IsotropicFrame frame, HPoint center, double r1, double r2);

  /// Origin-centered rectangle on the canonical frame.
  static Rectangle canonical(Kind kind, int n, int d, double r1, double r2);

  Kind kind() const noexcept { return kind_; }
  const IsotropicFrame& frame() const noexcept { return frame_; }
  const HPoint& center() const noexcept { return center_; }
  double r1() const noexcept { return r1_; }
  double r2() const noexcept { return r2_; }
  int n() const noexcept { return frame_.n(); }
  int d() const noexcept { return frame_.d(); }

  bool contains(const HPoint& p) const;

  // Span kernels on packed coordinates (no dimension checks).
  //
  // "Local" coordinates are frame coordinates of c^{-1} p: the horizontal
  // part is U^T applied to that of c^{-1} p, the z coordinate is unchanged.
  // EuclideanSplit uses the identity frame.
  bool contains_coords(std::span<const double> world) const noexcept;
  bool contains_local(std::span<const double> local) const noexcept;
  void world_to_local(std::span<const double> world, std::span<double> local) const noexcept;
  void local_to_world(std::span<const double> local, std::span<double> world) const noexcept;

 private:
  Kind kind_;
  IsotropicFrame frame_;
  HPoint center_;
  double r1_;
  double r2_;
};

Rectangle translate(const Rectangle& rect, const HPoint& g);

/// Symmetric axis-aligned box in local coordinates: |local_i| <= half[i].
struct CoordBox {
  std::vector<double> half;
  double volume() const;
};

/// For type 1 and 2: x^d half-widths r1, the other horizontal half-widths r2,
/// z half-width r2^2 + 2 r1 r2. EuclideanSplit: r1 horizontally, r2^2 in z.
CoordBox bounding_box(const Rectangle& rect);

/// K(m) = integral over the unit ball of R^m of 2 sqrt(1 - |u|^4).
/// K(2n) is the Lebesgue measure of the unit Koranyi ball of H^n.
double slice_constant(int m);
double koranyi_ball_volume(int n);
double euclidean_ball_volume(int d);

/// Exact Lebesgue measure.
double measure(const Rectangle& rect);

/// Uniform sample of the rectangle. Deterministic in (seed); independent of
/// the worker count. Throws std::runtime_error if the acceptance rate of the
/// internal proposal drops below 1e-4.
PointCloud sample_interior(const Rectangle& rect, std::size_t count, std::uint64_t seed,
                           int workers = 1);

struct CloudRow {
  double x, y, z;
  bool inside;
};

/// Uniform points of the bounding box mapped to world coordinates, each with
/// its membership flag. n = 1 only.
std::vector<CloudRow> point_cloud(const Rectangle& rect, std::size_t count, std::uint64_t seed);
void write_cloud_csv(std::ostream& out, const std::vector<CloudRow>& rows);

void to_json(nlohmann::json& j, const Rectangle& r);
Rectangle rectangle_from_json(const nlohmann::json& j);

}  // namespace heis
