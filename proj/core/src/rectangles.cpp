#include "heis/rectangles.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "heis/random.hpp"

namespace heis {

namespace {

constexpr std::size_t kSampleChunk = 4096;
constexpr double kMinAcceptance = 1e-4;

void require_dim(const Rectangle& r, const HPoint& p, const char* op) {
  if (r.n() != p.dim()) {
    throw std::invalid_argument(std::string(op) + ": rectangle has n=" + std::to_string(r.n()) +
                                " but point has n=" + std::to_string(p.dim()));
  }
}

// <x^d, y^d> in local coordinates.
double xd_dot_yd(const double* l, int n, int d) noexcept {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += l[i] * l[n + i];
  return s;
}

// The integrand of K(m) after substituting rho = 1 - s^2, which removes the
// square-root singularity at rho = 1.
double slice_integrand(double s, int m) {
  const double rho = 1.0 - s * s;
  return 4.0 * s * s * std::sqrt((1.0 + rho) * (1.0 + rho * rho)) * std::pow(rho, m - 1);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double sphere_area(int m) {  // surface area of S^{m-1}
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

}  // namespace

Rectangle::Rectangle(Kind kind, IsotropicFrame frame, HPoint center, double r1, double r2)
    : kind_(kind), frame_(std::move(frame)), center_(std::move(center)), r1_(r1), r2_(r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(r1) || !std::isfinite(r2)) {
    throw std::invalid_argument("Rectangle: radii must be positive and finite");
  }
  if (center_.dim() != frame_.n()) {
    throw std::invalid_argument("Rectangle: center and frame dimensions differ");
  }
  if (kind_ == Kind::EuclideanSplit) frame_ = canonical_frame(frame_.n(), frame_.d());
}

Rectangle Rectangle::canonical(Kind kind, int n, int d, double r1, double r2) {
  return Rectangle(kind, canonical_frame(n, kind == Kind::EuclideanSplit ? 1 : d), HPoint(n), r1,
                   r2);
}

void Rectangle::world_to_local(std::span<const double> world,
                               std::span<double> local) const noexcept {
  const int n = frame_.n();
  const int m = 2 * n;
  std::array<double, 17> diff{};
  std::vector<double> heap;
  double* q = diff.data();
  if (m + 1 > static_cast<int>(diff.size())) {
    heap.resize(static_cast<std::size_t>(m + 1));
    q = heap.data();
  }
  coords::left_difference(center_.coords(), world, {q, static_cast<std::size_t>(m + 1)});
  if (kind_ == Kind::EuclideanSplit) {
    for (int i = 0; i <= m; ++i) local[i] = q[i];
    return;
  }
  const double* Ut = frame_.transpose_row_major().data();
  for (int r = 0; r < m; ++r) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += Ut[r * m + c] * q[c];
    local[r] = s;
  }
  local[m] = q[m];
}

void Rectangle::local_to_world(std::span<const double> local,
                               std::span<double> world) const noexcept {
  const int n = frame_.n();
  const int m = 2 * n;
  std::array<double, 17> buf{};
  std::vector<double> heap;
  double* g = buf.data();
  if (m + 1 > static_cast<int>(buf.size())) {
    heap.resize(static_cast<std::size_t>(m + 1));
    g = heap.data();
  }
  if (kind_ == Kind::EuclideanSplit) {
    for (int i = 0; i <= m; ++i) g[i] = local[i];
  } else {
    const double* Ut = frame_.transpose_row_major().data();
    for (int c = 0; c < m; ++c) g[c] = 0.0;
    // w = U l = (U^T)^T l.
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) g[c] += Ut[r * m + c] * local[r];
    }
    g[m] = local[m];
  }
  coords::mul(center_.coords(), {g, static_cast<std::size_t>(m + 1)}, world);
}

bool Rectangle::contains_local(std::span<const double> l) const noexcept {
  const int n = frame_.n();
  const int m = 2 * n;
  if (kind_ == Kind::EuclideanSplit) {
    double h = 0.0;
    for (int i = 0; i < m; ++i) h += l[i] * l[i];
    return h <= r1_ * r1_ && std::abs(l[m]) <= r2_ * r2_;
  }
  const int d = frame_.d();
  double hv = 0.0;
  for (int i = 0; i < d; ++i) hv += l[i] * l[i];
  if (hv > r1_ * r1_) return false;
  double hp = 0.0;
  for (int i = d; i < m; ++i) hp += l[i] * l[i];
  const double shear = 2.0 * xd_dot_yd(l.data(), n, d);
  const double zeta = kind_ == Kind::Type1 ? l[m] + shear : l[m] - shear;
  const double r2sq = r2_ * r2_;
  return hp * hp + zeta * zeta <= r2sq * r2sq;
}

bool Rectangle::contains_coords(std::span<const double> world) const noexcept {
  std::array<double, 17> buf{};
  std::vector<double> heap;
  std::span<double> local(buf.data(), world.size());
  if (world.size() > buf.size()) {
    heap.resize(world.size());
    local = heap;
  }
  world_to_local(world, local);
  return contains_local(local);
}

bool Rectangle::contains(const HPoint& p) const {
  require_dim(*this, p, "contains");
  return contains_coords(p.coords());
}

Rectangle translate(const Rectangle& rect, const HPoint& g) {
  require_dim(rect, g, "translate");
  return Rectangle(rect.kind(), rect.frame(), group_mul(g, rect.center()), rect.r1(), rect.r2());
}

double CoordBox::volume() const {
  double v = 1.0;
  for (double h : half) v *= 2.0 * h;
  return v;
}

CoordBox bounding_box(const Rectangle& rect) {
  const int n = rect.n();
  const int m = 2 * n;
  CoordBox box;
  box.half.assign(static_cast<std::size_t>(m + 1), rect.r2());
  if (rect.kind() == Kind::EuclideanSplit) {
    for (int i = 0; i < m; ++i) box.half[i] = rect.r1();
    box.half[m] = rect.r2() * rect.r2();
    return box;
  }
  for (int i = 0; i < rect.d(); ++i) box.half[i] = rect.r1();
  // |z| <= |zeta| + 2|<x^d, y^d>| <= r2^2 + 2 r1 r2.
  box.half[m] = rect.r2() * rect.r2() + 2.0 * rect.r1() * rect.r2();
  return box;
}

double slice_constant(int m) {
  if (m < 1) throw std::invalid_argument("slice_constant: m must be >= 1");
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  auto f = [m](double s) { return slice_integrand(s, m); };
  const double fa = f(0.0), fm = f(0.5), fb = f(1.0);
  const double radial = adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, simpson(0.0, 1.0, fa, fm, fb),
                                         1e-13, 60);
  const double value = sphere_area(m) * radial;
  cache.emplace(m, value);
  return value;
}

double koranyi_ball_volume(int n) { return slice_constant(2 * n); }

double euclidean_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("euclidean_ball_volume: d must be >= 0");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double measure(const Rectangle& rect) {
  const int n = rect.n();
  if (rect.kind() == Kind::EuclideanSplit) {
    return euclidean_ball_volume(2 * n) * std::pow(rect.r1(), 2 * n) * 2.0 * rect.r2() * rect.r2();
  }
  const int d = rect.d();
  return euclidean_ball_volume(d) * std::pow(rect.r1(), d) * slice_constant(2 * n - d) *
         std::pow(rect.r2(), 2 * n + 2 - d);
}

PointCloud sample_interior(const Rectangle& rect, std::size_t count, std::uint64_t seed,
                           int workers) {
  if (count < 1) throw std::invalid_argument("sample_interior: count must be >= 1");
  const int n = rect.n();
  const int m = 2 * n;
  const int d = rect.kind() == Kind::EuclideanSplit ? 0 : rect.d();
  const std::size_t stride = static_cast<std::size_t>(m + 1);
  const double r1 = rect.r1();
  const double r2 = rect.r2();
  const double r2sq = r2 * r2;

  // Proposal in sheared local coordinates (x^d, rest, zeta), where zeta is the
  // z coordinate with the shear +-2<x^d, y^d> removed; the shear has unit
  // Jacobian, so uniform acceptance here is uniform on the rectangle.
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::vector<double>> parts(chunks);
  std::vector<std::size_t> attempts(chunks, 0);
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    const std::size_t want = std::min(kSampleChunk, count - c * kSampleChunk);
    Rng rng(derive_seed(seed, c));
    std::vector<double> local(stride);
    std::vector<double>& out = parts[c];
    out.resize(want * stride);
    std::size_t got = 0;
    std::size_t tries = 0;
    while (got < want) {
      ++tries;
      if (tries > 64 && static_cast<double>(got + 1) / static_cast<double>(tries) < kMinAcceptance) {
        attempts[c] = tries;
        throw std::runtime_error("sample_interior: acceptance rate below 1e-4 after " +
                                 std::to_string(tries) + " proposals (" + std::to_string(got) +
                                 " accepted); the proposal box does not fit the rectangle");
      }
      if (rect.kind() == Kind::EuclideanSplit) {
        double h = 0.0;
        for (int i = 0; i < m; ++i) {
          local[i] = rng.uniform(-r1, r1);
          h += local[i] * local[i];
        }
        local[m] = rng.uniform(-r2sq, r2sq);
        if (h > r1 * r1) continue;
      } else {
        double hv = 0.0;
        for (int i = 0; i < d; ++i) {
          local[i] = rng.uniform(-r1, r1);
          hv += local[i] * local[i];
        }
        double hp = 0.0;
        for (int i = d; i < m; ++i) {
          local[i] = rng.uniform(-r2, r2);
          hp += local[i] * local[i];
        }
        const double zeta = rng.uniform(-r2sq, r2sq);
        if (hv > r1 * r1 || hp * hp + zeta * zeta > r2sq * r2sq) continue;
        const double shear = 2.0 * xd_dot_yd(local.data(), n, d);
        local[m] = rect.kind() == Kind::Type1 ? zeta - shear : zeta + shear;
      }
      rect.local_to_world(local, {out.data() + got * stride, stride});
      ++got;
    }
    attempts[c] = tries;
  });
  PointCloud cloud(n);
  cloud.reserve(count);
  for (const auto& part : parts) {
    for (std::size_t i = 0; i * stride < part.size(); ++i) {
      cloud.push_back(std::span<const double>(part.data() + i * stride, stride));
    }
  }
  return cloud;
}

std::vector<CloudRow> point_cloud(const Rectangle& rect, std::size_t count, std::uint64_t seed) {
  if (rect.n() != 1) throw std::invalid_argument("point_cloud: only n = 1 is supported");
  const CoordBox box = bounding_box(rect);
  Rng rng(derive_seed(seed, 0xC10D));
  std::vector<CloudRow> rows;
  rows.reserve(count);
  std::array<double, 3> local{};
  std::array<double, 3> world{};
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < 3; ++k) local[k] = rng.uniform(-box.half[k], box.half[k]);
    rect.local_to_world(local, world);
    rows.push_back({world[0], world[1], world[2], rect.contains_local(local)});
  }
  return rows;
}

void write_cloud_csv(std::ostream& out, const std::vector<CloudRow>& rows) {
  out << "x,y,z,inside\n";
  out.precision(17);
  for (const auto& r : rows) out << r.x << ',' << r.y << ',' << r.z << ',' << (r.inside ? 1 : 0) << '\n';
}

void to_json(nlohmann::json& j, const Rectangle& r) {
  nlohmann::json frame;
  to_json(frame, r.frame());
  const auto c = r.center().coords();
  j = nlohmann::json{{"kind", to_string(r.kind())},
                     {"frame", frame},
                     {"center", std::vector<double>(c.begin(), c.end())},
                     {"r1", r.r1()},
                     {"r2", r.r2()}};
}

Rectangle rectangle_from_json(const nlohmann::json& j) {
  const Kind kind = parse_kind(j.at("kind").get<std::string>());
  const double r1 = j.at("r1").get<double>();
  const double r2 = j.at("r2").get<double>();
  IsotropicFrame frame = j.contains("frame") ? frame_from_json(j.at("frame"))
                                             : canonical_frame(j.at("n").get<int>(), j.value("d", 1));
  HPoint center(frame.n());
  if (j.contains("center")) {
    center = HPoint::from_coords(j.at("center").get<std::vector<double>>());
  }
  return Rectangle(kind, std::move(frame), std::move(center), r1, r2);
}

}  // namespace heis
