#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "heis/analysis.hpp"
#include "heis/net.hpp"
#include "heis/svf.hpp"
#include "support.hpp"

using namespace heis;

namespace {

/// First-fit net by exhaustive comparison.
std::vector<std::size_t> brute_force_net(const std::vector<std::vector<double>>& pts, double eps) {
  std::vector<std::size_t> net;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool near = false;
    for (std::size_t j : net) {
      std::vector<double> inv = pts[j];
      for (double& c : inv) c = -c;
      if (test::oracle_norm(test::oracle_mul(inv, pts[i])) < eps * (1 - kNetSlack)) {
        near = true;
        break;
      }
    }
    if (!near) net.push_back(i);
  }
  return net;
}

}  // namespace

TEST(GreedyNet, Examples) {
  const HPoint a({0.0}, {0.0}, 0.0), b({0.01}, {0.0}, 0.0);
  EXPECT_EQ(greedy_net({a}, 0.1), std::vector<HPoint>{a});
  EXPECT_EQ(greedy_net({a, b}, 0.1), std::vector<HPoint>{a});
  EXPECT_TRUE(greedy_net({}, 0.1).empty());
  std::vector<HPoint> line;
  const double eps = 0.1;
  for (int k = 0; k < 10; ++k) line.push_back(HPoint({k * eps}, {0.0}, 0.0));
  EXPECT_EQ(greedy_net(line, eps).size(), 10u);
}

TEST(GreedyNetProperty, MatchesBruteForceAndIsValid) {
  Rng rng(1);
  for (int n = 1; n <= 2; ++n) {
    for (double eps : {0.05, 0.2, 0.6}) {
      PointCloud cloud(n);
      std::vector<std::vector<double>> pts;
      for (int i = 0; i < 1500; ++i) {
        // Spread over a region with a large twist so the hash window matters.
        HPoint p = test::random_point(rng, n, 1.0);
        p = group_mul(HPoint::from_coords(std::vector<double>(2 * n + 1, 3.0)), p);
        cloud.push_back(p);
        pts.push_back(test::to_vec(p));
      }
      const auto idx = greedy_net_indices(cloud, eps);
      EXPECT_EQ(idx, brute_force_net(pts, eps)) << "n=" << n << " eps=" << eps;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          EXPECT_GE(distance(cloud.point(idx[a]), cloud.point(idx[b])), eps * (1 - kNetSlack));
        }
      }
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        double best = 1e300;
        for (std::size_t j : idx) best = std::min(best, distance(cloud.point(i), cloud.point(j)));
        EXPECT_LE(best, eps);
      }
    }
  }
}

TEST(GreedyNet, CoveredQuery) {
  GreedyNet net(1, 0.5);
  EXPECT_TRUE(net.offer(std::vector<double>{0, 0, 0}));
  EXPECT_FALSE(net.offer(std::vector<double>{0.1, 0, 0}));
  EXPECT_TRUE(net.covered(std::vector<double>{0, 0, 0.2}));
  EXPECT_FALSE(net.covered(std::vector<double>{0, 0, 0.3}));  // sqrt(0.3) > 0.5
  EXPECT_EQ(net.size(), 1u);
}

TEST(CoveringCount, LargeRadiusAndMonotone) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 0.5);
  EXPECT_EQ(covering_count(R, 10.0, 5000, 1).count, 1u);
  std::size_t prev = 0;
  for (double eps : {0.8, 0.4, 0.2, 0.1}) {
    const CoveringCount c = covering_count(R, eps, 20000, 2);
    EXPECT_GE(c.count, prev);
    prev = c.count;
  }
  const auto counts = net_counts(sample_interior(R, 20000, 2), {0.8, 0.4, 0.2, 0.1});
  EXPECT_TRUE(std::is_sorted(counts.begin(), counts.end()));
  EXPECT_EQ(counts.back(), prev);
}

TEST(CoveringCount, WideType1UsesSqrtBalls) {
  // r = (R, 1) with eps = sqrt(R): N grows like (r1/r2)^{1/2}.
  std::vector<std::pair<double, double>> pts;
  for (double R : {16.0, 64.0, 256.0, 1024.0}) {
    const Rectangle rect = Rectangle::canonical(Kind::Type1, 1, 1, R, 1.0);
    pts.emplace_back(R, static_cast<double>(covering_count(rect, std::sqrt(R), 100000, 3).count));
  }
  EXPECT_NEAR(fit_loglog(pts).slope, 0.5, 0.15);
}

TEST(FitLogLog, Examples) {
  std::vector<std::pair<double, double>> exact, flat, noisy;
  for (double s : {1.0, 0.5, 0.25, 0.125}) {
    exact.emplace_back(s, 3 * s * s);
    flat.emplace_back(s, 7.0);
  }
  LogLogFit f = fit_loglog(exact);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
  EXPECT_NEAR(fit_loglog(flat).slope, 0.0, 1e-12);
  Rng rng(4);
  for (int i = 0; i < 8; ++i) {
    const double s = std::pow(0.5, i);
    noisy.emplace_back(s, std::pow(s, 1.5) * (1 + 0.05 * rng.normal()));
  }
  EXPECT_NEAR(fit_loglog(noisy).slope, 1.5, 0.1);
  EXPECT_THROW(fit_loglog({{1, 1}, {2, 2}}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({{1, 1}, {2, -2}, {3, 3}}), std::invalid_argument);
}

TEST(Theory, ProfileSlopes) {
  const AspectProfile ball{1, 1}, thin{0, 1}, flat{1, 0};
  EXPECT_DOUBLE_EQ(profile_theory_slope(Kind::Type1, 1, 1, ball, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(profile_theory_slope(Kind::Type1, 1, 1, thin, 3.5), 2.0);
  EXPECT_DOUBLE_EQ(profile_theory_slope(Kind::Type2, 1, 1, thin, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(profile_theory_slope(Kind::Type1, 1, 1, flat, 3.5), 0.5);
  // Energy of a ball family: I_t ~ s^{4n+4-t}.
  EXPECT_DOUBLE_EQ(energy_theory_slope(Kind::Type1, 1, 1, ball, 0.5), 7.5);
  EXPECT_DOUBLE_EQ(energy_theory_slope(Kind::Type2, 2, 1, ball, 3.5), 8.5);
  // Type 1, r = (1, s), t in ]d, d+2[: (8n+8-3d-t)/2.
  EXPECT_DOUBLE_EQ(energy_theory_slope(Kind::Type1, 1, 1, thin, 1.5), 5.75);
  // Type 2, r = (1, s), t > d: 4n+4-d-t, so the capacity bound scales as s^{t-d}.
  EXPECT_DOUBLE_EQ(energy_theory_slope(Kind::Type2, 1, 1, thin, 2.5), 4.5);
  EXPECT_DOUBLE_EQ(6.0 - energy_theory_slope(Kind::Type2, 1, 1, thin, 2.5), 1.5);
  EXPECT_THROW(energy_theory_slope(Kind::Type1, 1, 1, thin, 4.0), std::invalid_argument);
}

TEST(Content, EstimateStructure) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 0.25);
  const ContentEstimate e = content_estimate(R, 2.0, 20000, 5);
  ASSERT_FALSE(e.ladder.empty());
  for (std::size_t i = 1; i < e.ladder.size(); ++i) EXPECT_LT(e.ladder[i].eps, e.ladder[i - 1].eps);
  EXPECT_GE(e.best_count, 1.0);
  EXPECT_NEAR(e.value, e.best_count * e.best_eps * e.best_eps, 1e-12 * e.value);
  for (const auto& s : e.ladder) EXPECT_GE(s.count * s.eps * s.eps, e.value * (1 - 1e-12));
  EXPECT_LE(e.value, std::pow(e.ladder.front().eps, 2.0) * (1 + 1e-12));

  ContentOptions net;
  net.method = ContentMethod::GreedyNet;
  const ContentEstimate g = content_estimate(R, 2.0, 20000, 5, 1, net);
  EXPECT_GT(g.value, 0.0);
  EXPECT_THROW(content_estimate(R, 5.0, 20000, 5), std::invalid_argument);
  EXPECT_THROW(content_estimate(R, 2.0, 10, 5), std::invalid_argument);
}

TEST(Content, WorkerCountDoesNotChangeResult) {
  const Rectangle R = Rectangle::canonical(Kind::Type2, 1, 1, 1.0, 0.5);
  EXPECT_EQ(content_estimate(R, 3.5, 20000, 6, 1).value, content_estimate(R, 3.5, 20000, 6, 3).value);
}

TEST(Energy, SmallTGivesSquaredMeasure) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 0.4, 0.2);
  const double lam = measure(R);
  const EnergyEstimate e = energy_mc(R, 1e-3, 100000, 7);
  EXPECT_NEAR(e.value / (lam * lam), 1.0, 0.01);
  EXPECT_LT(e.clipped_mass_fraction, 0.05);
  EXPECT_TRUE(e.warnings.empty());
}

TEST(EnergyProperty, MonotoneInT) {
  // Diameter below 1/2, so d^{-t} increases with t pointwise.
  const Rectangle R(Kind::Type2, random_isotropic_frame(2, 1, 8), HPoint(2), 0.15, 0.1);
  const std::vector<double> ts{0.5, 1.0, 2.0, 3.0, 4.5, 5.5};
  const auto es = energy_mc_multi(R, ts, 50000, 9);
  for (std::size_t i = 1; i < es.size(); ++i) EXPECT_GE(es[i].value, es[i - 1].value);
}

TEST(Energy, BallEnergyScaling) {
  const Rectangle unit = Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 1.0);
  const ScalingReport r = energy_scaling(unit, {1, 1}, 2.5, {1.0, 0.5, 0.25, 0.125}, 100000, 10);
  EXPECT_DOUBLE_EQ(r.theory_slope, 5.5);
  EXPECT_TRUE(r.within(0.2)) << r.slope;
}

TEST(Energy, TranslationInvariant) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 0.5, 0.3);
  const Rectangle T = translate(R, HPoint({2.0}, {-1.0}, 0.5));
  const EnergyEstimate a = energy_mc(R, 2.0, 200000, 11), b = energy_mc(T, 2.0, 200000, 12);
  EXPECT_LE(std::abs(a.value - b.value), 3 * std::hypot(a.error, b.error));
}

TEST(Energy, Errors) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 0.5, 0.3);
  EXPECT_THROW(energy_mc(R, 4.0, 100000, 1), std::invalid_argument);
  EXPECT_THROW(energy_mc(R, 1.0, 100, 1), std::invalid_argument);
  const double cap = capacity_lower_bound(R, 3.9, 20000, 1);
  EXPECT_TRUE(std::isfinite(cap) && cap > 0.0);
}

TEST(SliceCheck, Saturation) {
  // a beyond the diameter of A: the whole of A = {|x^d| <= r1, |(x', y)| <= r2,
  // |z + 2<x^d, y^d>| <= r2^2}.
  const double r1 = 1.0, r2 = 0.5;
  const SliceCheck s = slice_measure_check(1, 1, r1, r2, HPoint(1), 100.0, 400000, 1);
  const double lamA = 2 * r1 * 2 * r2 * 2 * r2 * r2;
  EXPECT_NEAR(s.mc_measure, lamA, 0.02 * lamA);
  EXPECT_DOUBLE_EQ(s.general_bound, r1 * std::pow(r2, 3));
  EXPECT_FALSE(s.improved);
}

TEST(SliceCheck, SmallRadiiFollowBallVolume) {
  const HPoint p({0.2}, {0.1}, 0.0);
  double prev = -1;
  for (double a : {0.02, 0.01, 0.005}) {
    const SliceCheck s = slice_measure_check(1, 1, 1.0, 0.5, p, a, 200000, 2);
    const double ratio = s.mc_measure / std::pow(a, 4);
    EXPECT_LT(ratio, 20.0);
    if (prev > 0) EXPECT_NEAR(ratio, prev, 0.1 * prev);
    prev = ratio;
  }
}

TEST(SliceCheck, ImprovedBranch) {
  const SliceCheck s = slice_measure_check(1, 1, 10.0, 1.0, HPoint({5.0}, {0.0}, 0.0), 0.5, 400000, 3);
  EXPECT_TRUE(s.improved);
  EXPECT_DOUBLE_EQ(s.bound, std::pow(0.5, 3) * 1.0 / 5.0);
  EXPECT_GT(s.hits, 0u);
  EXPECT_LE(s.mc_measure, 4 * s.bound);
  EXPECT_GE(s.upper_confidence, s.mc_measure);
}

TEST(ScalingReport, Serialization) {
  ScalingReport r;
  r.points = {{1.0, 2.0, 0.1}, {0.5, 0.5, 0.01}, {0.25, 0.125, 0.0}};
  fit_report(r);
  r.theory_slope = 2.0;
  EXPECT_TRUE(r.within(1e-9));
  nlohmann::json j = r;
  EXPECT_EQ(j["points"].size(), 3u);
  EXPECT_NEAR(j["slope"].get<double>(), 2.0, 1e-12);
  std::ostringstream os;
  write_csv(os, r);
  EXPECT_EQ(os.str().substr(0, 21), "scale,estimate,stderr");
}
