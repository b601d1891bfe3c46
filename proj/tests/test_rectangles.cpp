#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "heis/rectangles.hpp"
#include "support.hpp"

using namespace heis;

namespace {

constexpr Kind kKinds[] = {Kind::Type1, Kind::Type2, Kind::EuclideanSplit};

/// Hit rate of uniform proposals in the bounding box times its volume.
double box_hit_measure(const Rectangle& rect, int samples, std::uint64_t seed) {
  const CoordBox box = bounding_box(rect);
  Rng rng(seed);
  std::vector<double> l(box.half.size());
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = rng.uniform(-box.half[i], box.half[i]);
    hits += rect.contains_local(l);
  }
  return box.volume() * hits / samples;
}

}  // namespace

TEST(Rectangle, MembershipExamples) {
  const Rectangle R = Rectangle::canonical(Kind::Type2, 1, 1, 1.0, 0.5);
  EXPECT_TRUE(R.contains(HPoint(1)));
  EXPECT_TRUE(R.contains(HPoint({1.0}, {0.0}, 0.0)));
  EXPECT_FALSE(R.contains(HPoint({0.0}, {0.0}, 0.26)));
  EXPECT_TRUE(R.contains(HPoint({0.0}, {0.0}, 0.25)));  // closed
  EXPECT_THROW(R.contains(HPoint(2)), std::invalid_argument);
  EXPECT_THROW(Rectangle::canonical(Kind::Type1, 1, 1, 0.0, 1.0), std::invalid_argument);
}

TEST(Rectangle, MembershipMatchesProjections) {
  Rng rng(1);
  for (int rep = 0; rep < 3000; ++rep) {
    const int n = 1 + rep % 2;
    const int d = 1 + rep % n;
    const Kind kind = rep % 3 == 0 ? Kind::Type2 : Kind::Type1;
    const Rectangle R(kind, random_isotropic_frame(n, d, 50 + rep), test::random_point(rng, n),
                      rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5));
    const HPoint p = group_mul(R.center(), test::random_point(rng, n, 1.5));
    const HPoint q = group_mul(inverse(R.center()), p);
    const Splitting s = kind == Kind::Type1 ? project_P(R.frame(), q) : project_Q(R.frame(), q);
    const double h = koranyi_norm(s.h), v = koranyi_norm(s.v);
    if (std::abs(h - R.r1()) < 1e-9 || std::abs(v - R.r2()) < 1e-9) continue;
    EXPECT_EQ(R.contains(p), h <= R.r1() && v <= R.r2());
  }
}

TEST(Rectangle, TranslateConjugation) {
  Rng rng(2);
  const Rectangle R(Kind::Type1, random_isotropic_frame(2, 1, 3), HPoint(2), 0.7, 0.4);
  const Rectangle same = translate(R, HPoint(2));
  EXPECT_EQ(same.center(), R.center());
  const HPoint g = test::random_point(rng, 2, 2.0);
  EXPECT_EQ(translate(R, g).center(), g);
  for (int rep = 0; rep < 2000; ++rep) {
    const HPoint p = test::random_point(rng, 2, 0.8);
    EXPECT_EQ(translate(R, g).contains(group_mul(g, p)), R.contains(p));
    EXPECT_EQ(same.contains(p), R.contains(p));
  }
}

TEST(Rectangle, BoundingBoxExamples) {
  const CoordBox e = bounding_box(Rectangle::canonical(Kind::EuclideanSplit, 1, 1, 1.0, 0.5));
  EXPECT_EQ(e.half, (std::vector<double>{1.0, 1.0, 0.25}));
  // Within the conservative bounds |coords| <= sqrt(2) max(r), |z| <= 3 max(r)^2.
  const CoordBox b = bounding_box(Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 1.0));
  for (int i = 0; i < 2; ++i) EXPECT_LE(b.half[i], std::sqrt(2.0));
  EXPECT_LE(b.half[2], 3.0);
}

TEST(RectangleProperty, BoundingBoxIsSuperset) {
  Rng rng(3);
  for (Kind kind : kKinds) {
    for (auto [r1, r2] : {std::pair{1.0, 1.0}, {2.0, 0.3}, {0.3, 2.0}}) {
      const Rectangle R = Rectangle::canonical(kind, 1, 1, r1, r2);
      const CoordBox box = bounding_box(R);
      std::vector<double> l(3);
      int members = 0;
      for (int s = 0; s < 100000; ++s) {
        for (int i = 0; i < 3; ++i) l[i] = rng.uniform(-2.0 * box.half[i], 2.0 * box.half[i]);
        if (!R.contains_local(l)) continue;
        ++members;
        for (int i = 0; i < 3; ++i) ASSERT_LE(std::abs(l[i]), box.half[i]);
      }
      EXPECT_GT(members, 500);
    }
  }
}

TEST(Measure, SliceConstantMatchesOracle) {
  // K(1) = 4 int_0^1 sqrt(1-u^4) du, K(2) = pi^2/2.
  EXPECT_NEAR(slice_constant(1), 3.4960767391, 1e-9);
  EXPECT_NEAR(slice_constant(2), std::pow(M_PI, 2) / 2, 1e-9);
  for (int m = 1; m <= 8; ++m) {
    EXPECT_NEAR(slice_constant(m), test::oracle_slice_constant(m), 1e-10 * slice_constant(m));
  }
  for (int d = 0; d <= 6; ++d) {
    EXPECT_NEAR(euclidean_ball_volume(d), test::oracle_ball_volume(d), 1e-13);
  }
}

TEST(Measure, WorkedValueAndScaling) {
  EXPECT_NEAR(measure(Rectangle::canonical(Kind::Type2, 1, 1, 1.0, 1.0)), 6.992153, 1e-6);
  for (Kind kind : {Kind::Type1, Kind::Type2}) {
    for (int n = 1; n <= 3; ++n) {
      for (int d = 1; d <= n; ++d) {
        const double unit = measure(Rectangle::canonical(kind, n, d, 1.0, 1.0));
        EXPECT_NEAR(unit,
                    test::oracle_ball_volume(d) * test::oracle_slice_constant(2 * n - d),
                    1e-10 * unit);
        const double r1 = 0.3, r2 = 1.7;
        EXPECT_NEAR(measure(Rectangle::canonical(kind, n, d, r1, r2)) / unit,
                    std::pow(r1, d) * std::pow(r2, 2 * n + 2 - d), 1e-12);
      }
    }
  }
  const double e = measure(Rectangle::canonical(Kind::EuclideanSplit, 2, 1, 0.5, 0.7));
  EXPECT_NEAR(e, test::oracle_ball_volume(4) * std::pow(0.5, 4) * 2 * 0.49, 1e-13);
}

TEST(Measure, TranslationInvariant) {
  Rng rng(4);
  const Rectangle R(Kind::Type2, random_isotropic_frame(2, 2, 5), HPoint(2), 0.4, 0.9);
  const Rectangle T = translate(R, test::random_point(rng, 2, 3.0));
  EXPECT_EQ(measure(T), measure(R));
  EXPECT_NEAR(box_hit_measure(T, 200000, 6), measure(R), 0.03 * measure(R));
}

TEST(Measure, MonteCarloHitRate) {
  for (Kind kind : kKinds) {
    const Rectangle R = Rectangle::canonical(kind, 1, 1, 1.0, 0.5);
    EXPECT_NEAR(box_hit_measure(R, 1000000, 7), measure(R), 0.02 * measure(R)) << to_string(kind);
  }
}

TEST(Sampling, PointsAreMembersAndDeterministic) {
  for (Kind kind : kKinds) {
    const Rectangle R(kind, random_isotropic_frame(2, 1, 8), HPoint({1.0, 0.5}, {0.0, 2.0}, 1.0),
                      0.8, 0.3);
    const PointCloud c = sample_interior(R, 5000, 9);
    ASSERT_EQ(c.size(), 5000u);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_TRUE(R.contains(c.point(i)));
    EXPECT_EQ(c.data(), sample_interior(R, 5000, 9).data());
    EXPECT_EQ(c.data(), sample_interior(R, 5000, 9, 3).data());
    EXPECT_NE(c.data(), sample_interior(R, 5000, 10).data());
  }
  EXPECT_THROW(sample_interior(Rectangle::canonical(Kind::Type1, 1, 1, 1, 1), 0, 1),
               std::invalid_argument);
}

TEST(Sampling, SymmetricMean) {
  const Rectangle R = Rectangle::canonical(Kind::Type2, 1, 1, 1.0, 0.5);
  const std::size_t N = 200000;
  const PointCloud c = sample_interior(R, N, 11);
  for (int k = 0; k < 3; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      s += c[i][k];
      s2 += c[i][k] * c[i][k];
    }
    const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
    EXPECT_LE(std::abs(mean), 5 * se) << "coordinate " << k;
  }
}

TEST(Sampling, UniformAgainstSubregionVolume) {
  // Share of samples with x >= 0.5 against the exact share: for the canonical
  // Type1 rectangle the x^d marginal is uniform on [-r1, r1].
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 0.5);
  const std::size_t N = 200000;
  const PointCloud c = sample_interior(R, N, 12);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < N; ++i) hits += c[i][0] >= 0.5;
  const double share = static_cast<double>(hits) / N;
  EXPECT_NEAR(share, 0.25, 5 * std::sqrt(0.25 * 0.75 / N));
}

TEST(RectangleProperty, OrthosymplecticEquivariance) {
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2;
    const int d = 1 + rep % 2;
    const IsotropicFrame fv = random_isotropic_frame(n, d, 100 + rep);
    const IsotropicFrame fw = random_isotropic_frame(n, d, 200 + rep);
    const Eigen::MatrixXd M = fv.matrix() * fw.matrix().transpose();
    for (Kind kind : {Kind::Type1, Kind::Type2}) {
      const Rectangle Rv(kind, fv, HPoint(n), 0.9, 0.5), Rw(kind, fw, HPoint(n), 0.9, 0.5);
      for (int s = 0; s < 50; ++s) {
        const HPoint p = test::random_point(rng, n);
        EXPECT_EQ(Rw.contains(p), Rv.contains(apply_orthosymplectic(M, p)));
      }
    }
  }
}

TEST(RectangleProperty, BallSandwich) {
  Rng rng(14);
  const double c = 4.0;
  for (Kind kind : kKinds) {
    for (int n = 1; n <= 2; ++n) {
      const Rectangle R(kind, random_isotropic_frame(n, 1, 15 + n), HPoint(n), 1.0, 1.0);
      for (int s = 0; s < 20000; ++s) {
        const HPoint q = dilate(test::random_ball_point(rng, n), 1.0 / c);
        EXPECT_TRUE(R.contains(q));
      }
      const PointCloud pts = sample_interior(R, 20000, 16);
      for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LE(koranyi_norm(pts.point(i)), c);
    }
  }
}

TEST(RectangleProperty, Type2HorizontalProjectionIsClose) {
  for (int n = 1; n <= 2; ++n) {
    const Rectangle R(Kind::Type2, random_isotropic_frame(n, n, 17), HPoint(n), 1.3, 0.4);
    const PointCloud pts = sample_interior(R, 20000, 18);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const HPoint p = pts.point(i);
      EXPECT_LE(distance(project_P(R.frame(), p).h, p), R.r2() + 1e-12);
    }
  }
}

TEST(PointCloudOutput, FigureShapes) {
  EXPECT_THROW(point_cloud(Rectangle::canonical(Kind::Type1, 2, 1, 1, 1), 10, 1),
               std::invalid_argument);
  const Rectangle fig1 = Rectangle::canonical(Kind::Type2, 1, 1, 0.5, 1.0);
  const auto rows = point_cloud(fig1, 20000, 19);
  std::size_t inside = 0;
  for (const auto& r : rows) {
    EXPECT_EQ(r.inside, fig1.contains(HPoint({r.x}, {r.y}, r.z)));
    inside += r.inside;
    if (r.inside) EXPECT_LE(std::abs(r.x), 0.5);
  }
  EXPECT_GT(inside, 2000u);

  // Translating to (1,0,0) shears z by +2y.
  const Rectangle fig3 = translate(fig1, HPoint({1.0}, {0.0}, 0.0));
  double syz = 0.0, syy = 0.0, szz = 0.0;
  for (const auto& r : point_cloud(fig3, 20000, 20)) {
    if (!r.inside) continue;
    syz += r.y * r.z;
    syy += r.y * r.y;
    szz += r.z * r.z;
  }
  EXPECT_GT(syz / std::sqrt(syy * szz), 0.5);

  std::ostringstream os;
  write_cloud_csv(os, {{0.5, -1.0, 0.25, true}});
  EXPECT_EQ(os.str().substr(0, 15), "x,y,z,inside\n0.");
}

TEST(Rectangle, JsonRoundTrip) {
  const Rectangle R(Kind::Type2, random_isotropic_frame(2, 1, 21),
                    HPoint({1.0, 2.0}, {3.0, 4.0}, 5.0), 0.25, 0.75);
  const nlohmann::json j = R;
  EXPECT_EQ(j["kind"], "type2");
  EXPECT_EQ(j["center"].size(), 5u);
  const Rectangle S = rectangle_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(S.kind(), R.kind());
  EXPECT_EQ(S.center(), R.center());
  EXPECT_EQ(S.r1(), R.r1());
  EXPECT_EQ(S.r2(), R.r2());
  EXPECT_TRUE(S.frame().matrix().isApprox(R.frame().matrix(), 0.0));
}
