#include "heis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "heis/net.hpp"
#include "heis/random.hpp"
#include "heis/svf.hpp"

namespace heis {

bool ScalingReport::within(double tol) const noexcept {
  return std::isfinite(slope) && std::abs(slope - theory_slope) <= tol;
}

void to_json(nlohmann::json& j, const ScalingReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"scale", p.scale}, {"estimate", p.estimate}, {"stderr", p.error}});
  }
  j = nlohmann::json{{"points", pts},
                     {"slope", r.slope},
                     {"slope_stderr", r.slope_stderr},
                     {"theory_slope", r.theory_slope},
                     {"warnings", r.warnings}};
}

void write_csv(std::ostream& out, const ScalingReport& r) {
  out.precision(12);
  out << "scale,estimate,stderr\n";
  for (const auto& p : r.points) out << p.scale << ',' << p.estimate << ',' << p.error << '\n';
}

LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_loglog: need at least 3 points");
  const double k = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [s, e] : points) {
    if (!(s > 0.0) || !(e > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    mx += std::log(s);
    my += std::log(e);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [s, e] : points) {
    const double dx = std::log(s) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog: scales must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [s, e] : points) {
    const double res = std::log(e) - (fit.intercept + fit.slope * std::log(s));
    rss += res * res;
  }
  fit.slope_stderr = std::sqrt(rss / (k - 2.0) / sxx);
  return fit;
}

void fit_report(ScalingReport& r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : r.points) pts.emplace_back(p.scale, p.estimate);
  const LogLogFit fit = fit_loglog(pts);
  r.slope = fit.slope;
  r.slope_stderr = fit.slope_stderr;
}

CoveringCount covering_count(const Rectangle& rect, double eps, std::size_t sample_budget,
                             std::uint64_t seed, int workers) {
  if (!(eps > 0.0)) throw std::invalid_argument("covering_count: eps must be > 0");
  if (sample_budget < 10) throw std::invalid_argument("covering_count: budget too small");
  const PointCloud cloud = sample_interior(rect, sample_budget, seed, workers);
  GreedyNet net(rect.n(), eps);
  const std::size_t late_start = cloud.size() - cloud.size() / 10;
  CoveringCount out;
  out.samples = cloud.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (net.offer(cloud[i]) && i >= late_start) ++out.late_additions;
  }
  out.count = net.size();
  out.saturation_warning =
      static_cast<double>(out.late_additions) > 0.005 * static_cast<double>(out.count);
  return out;
}

std::vector<std::size_t> net_counts(const PointCloud& cloud, const std::vector<double>& eps) {
  std::vector<std::size_t> out;
  out.reserve(eps.size());
  for (double e : eps) {
    GreedyNet net(cloud.dim(), e);
    for (std::size_t i = 0; i < cloud.size(); ++i) net.offer(cloud[i]);
    out.push_back(net.size());
  }
  return out;
}

namespace {

// Upper bound for the Koranyi norm of local coordinates inside the box.
double box_norm_bound(const CoordBox& box) {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < box.half.size(); ++i) h += box.half[i] * box.half[i];
  const double z = box.half.back();
  return std::sqrt(std::sqrt(h * h + z * z));
}

struct NetGrowth {
  std::size_t count = 0;
  double covered = 0.0;
  bool usable = false;
};

NetGrowth grow_net(const PointCloud& cloud, const PointCloud& holdout, const HPoint& first,
                   double eps, double saturation_fraction) {
  GreedyNet net(cloud.dim(), eps);
  net.offer(first.coords());
  const std::size_t cap =
      static_cast<std::size_t>(saturation_fraction * static_cast<double>(cloud.size()));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    net.offer(cloud[i]);
    if (net.size() > cap) return {net.size(), 0.0, false};
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < holdout.size(); ++i) hit += net.covered(holdout[i]) ? 1 : 0;
  return {net.size(), static_cast<double>(hit) / static_cast<double>(holdout.size()), true};
}

void sample_unit_ball(Rng& rng, int m, double* u) {
  while (true) {
    double h = 0.0;
    for (int i = 0; i < m; ++i) {
      u[i] = rng.uniform(-1.0, 1.0);
      h += u[i] * u[i];
    }
    u[m] = rng.uniform(-1.0, 1.0);
    if (h * h + u[m] * u[m] <= 1.0) return;
  }
}

void record(ContentEstimate& est, double eps, double count, double covered, double t) {
  est.ladder.push_back({eps, count, covered});
  const double v = count * std::pow(eps, t);
  if (v < est.value) {
    est.value = v;
    est.best_eps = eps;
    est.best_count = count;
  }
}

void ball_mass_content(const Rectangle& rect, double t, std::size_t budget, std::uint64_t seed,
                       int workers, const ContentOptions& opt, ContentEstimate& est) {
  const int m = 2 * rect.n();
  const double Q = m + 2.0;
  const double lambda = measure(rect);
  const double cB = koranyi_ball_volume(rect.n());
  const PointCloud ps = sample_interior(rect, budget, seed, workers);
  PointCloud us(rect.n());
  us.reserve(ps.size());
  {
    Rng rng(derive_seed(seed, 0xBA11));
    std::vector<double> u(static_cast<std::size_t>(m + 1));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      sample_unit_ball(rng, m, u.data());
      us.push_back(u);
    }
  }
  // Independent pairs (p_i, p_{i+J/2}) estimate the same pair mass and are
  // accurate at radii comparable to the whole set, where ball probes rarely
  // land inside.
  const std::size_t half = ps.size() / 2;
  std::vector<double> pair_dist(half);
  for (std::size_t i = 0; i < half; ++i) pair_dist[i] = coords::distance(ps[i], ps[i + half]);
  std::sort(pair_dist.begin(), pair_dist.end());

  const std::size_t chunk = 8192;
  const std::size_t chunks = (ps.size() + chunk - 1) / chunk;
  std::vector<std::size_t> hits(chunks);
  double eps = 2.0 * box_norm_bound(bounding_box(rect)) * 1.001;
  // Every cover by eps-balls has at least lambda / (c_B eps^Q) of them, so the
  // descent stops once lambda eps^{t-Q} / c_B passes the best value.
  for (int level = 0; level < 1000; ++level, eps *= opt.ladder_ratio) {
    if (t < Q && lambda / cB * std::pow(eps, t - Q) > est.value) break;
    parallel_chunks(chunks, workers, [&](std::size_t c) {
      std::vector<double> u(static_cast<std::size_t>(m + 1)), w(static_cast<std::size_t>(m + 1));
      std::size_t h = 0;
      const std::size_t end = std::min(ps.size(), (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) {
        const auto ui = us[i];
        for (int k = 0; k < m; ++k) u[k] = eps * ui[k];
        u[m] = eps * eps * ui[m];
        coords::mul(ps[i], u, w);
        h += rect.contains_coords(w) ? 1 : 0;
      }
      hits[c] = h;
    });
    std::size_t ball_hits = 0;
    for (std::size_t h : hits) ball_hits += h;
    const auto pair_hits = static_cast<std::size_t>(
        std::upper_bound(pair_dist.begin(), pair_dist.end(), eps) - pair_dist.begin());
    // Pair mass C(eps) = lambda^2 P[d(p, p') <= eps] = lambda c_B eps^Q P[q in R].
    double mass = 0.0;
    if (pair_hits >= ball_hits) {
      if (pair_hits < opt.min_hits) continue;
      mass = lambda * lambda * static_cast<double>(pair_hits) / static_cast<double>(half);
    } else {
      if (ball_hits < opt.min_hits) continue;
      mass = lambda * cB * std::pow(eps, Q) * static_cast<double>(ball_hits) /
             static_cast<double>(ps.size());
    }
    record(est, eps, std::max(1.0, lambda * lambda / mass), 1.0, t);
    if (t >= Q && ball_hits == ps.size()) break;
  }
}

void greedy_net_content(const Rectangle& rect, double t, std::size_t budget, std::uint64_t seed,
                        int workers, const ContentOptions& opt, ContentEstimate& est) {
  const double Q = 2.0 * rect.n() + 2.0;
  const PointCloud cloud = sample_interior(rect, budget, seed, workers);
  const std::size_t nh = std::max<std::size_t>(
      1000, static_cast<std::size_t>(opt.holdout_fraction * static_cast<double>(budget)));
  const PointCloud holdout = sample_interior(rect, nh, derive_seed(seed, 0x401D), workers);
  const double floor_coef = measure(rect) / koranyi_ball_volume(rect.n());
  auto evaluate = [&](double eps) {
    const NetGrowth g = grow_net(cloud, holdout, rect.center(), eps, opt.saturation_fraction);
    if (!g.usable || g.covered < opt.min_coverage) {
      est.hit_saturation = true;
      return false;
    }
    record(est, eps, static_cast<double>(g.count) / g.covered, g.covered, t);
    return true;
  };
  // Coarse descent with ratio^4, then the fine ladder around the best radius.
  const double coarse = std::pow(opt.ladder_ratio, 4);
  const double top = 2.0 * box_norm_bound(bounding_box(rect)) * 1.001;
  for (double eps = top; !(t < Q && floor_coef * std::pow(eps, t - Q) > est.value);
       eps *= coarse) {
    if (!evaluate(eps)) break;
  }
  if (est.ladder.empty()) return;
  const double centre = est.best_eps;
  for (int k = -3; k <= 3; ++k) {
    const double e = centre * std::pow(opt.ladder_ratio, k);
    if (k != 0 && e <= top && !evaluate(e) && k > 0) break;
  }
}

}  // namespace

ContentEstimate content_estimate(const Rectangle& rect, double t, std::size_t sample_budget,
                                 std::uint64_t seed, int workers, const ContentOptions& opt) {
  const double Q = 2.0 * rect.n() + 2.0;
  if (!(t >= 0.0 && t <= Q)) throw std::invalid_argument("content_estimate: t outside [0, 2n+2]");
  if (!(opt.ladder_ratio > 0.0 && opt.ladder_ratio < 1.0)) {
    throw std::invalid_argument("content_estimate: ladder ratio must lie in (0, 1)");
  }
  if (!(opt.min_coverage > 0.0 && opt.min_coverage <= 1.0)) {
    throw std::invalid_argument("content_estimate: min_coverage must lie in (0, 1]");
  }
  if (sample_budget < 1000) throw std::invalid_argument("content_estimate: budget below 1000");
  ContentEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  if (opt.method == ContentMethod::BallMass) {
    ball_mass_content(rect, t, sample_budget, seed, workers, opt, est);
  } else {
    greedy_net_content(rect, t, sample_budget, seed, workers, opt, est);
  }
  if (est.ladder.empty()) throw std::runtime_error("content_estimate: no usable radius");
  std::sort(est.ladder.begin(), est.ladder.end(),
            [](const LadderStep& x, const LadderStep& y) { return x.eps > y.eps; });
  return est;
}

std::pair<double, double> AspectProfile::radii(double s) const noexcept {
  return {c1 * std::pow(s, gamma1), c2 * std::pow(s, gamma2)};
}

namespace {

Aspect profile_aspect(const AspectProfile& prof) {
  if (prof.gamma1 < prof.gamma2) return Aspect::Wide;
  if (prof.gamma1 > prof.gamma2) return Aspect::Tall;
  return aspect_of(prof.c1, prof.c2);
}

}  // namespace

double profile_theory_slope(Kind kind, int n, int d, const AspectProfile& prof, double t) {
  const auto [a, b] = svf_exponents(kind, n, d, t, profile_aspect(prof));
  return prof.gamma1 * a + prof.gamma2 * b;
}

ScalingReport content_scaling(Kind kind, int n, int d, const AspectProfile& prof, double t,
                              const std::vector<double>& scales, std::size_t budget,
                              std::uint64_t seed, int workers, const ContentOptions& opt) {
  ScalingReport rep;
  rep.theory_slope = profile_theory_slope(kind, n, d, prof, t);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw std::invalid_argument("content_scaling: scales must be strictly decreasing");
    }
    const auto [r1, r2] = prof.radii(scales[i]);
    const Rectangle rect = Rectangle::canonical(kind, n, d, r1, r2);
    const ContentEstimate est = content_estimate(rect, t, budget, derive_seed(seed, i), workers, opt);
    if (est.hit_saturation && est.best_eps == est.ladder.back().eps) {
      rep.warnings.push_back("scale " + std::to_string(scales[i]) +
                             ": content minimum sits at the finest unsaturated radius");
    }
    rep.points.push_back({scales[i], est.value, 0.0});
  }
  fit_report(rep);
  return rep;
}

SliceCheck slice_measure_check(int n, int d, double r1, double r2, const HPoint& p, double a,
                               std::size_t samples, std::uint64_t seed) {
  if (n < 1 || d < 1 || d > n) throw std::invalid_argument("slice_measure_check: bad (n, d)");
  if (p.dim() != n) throw std::invalid_argument("slice_measure_check: dimension mismatch");
  if (!(a > 0.0) || !(r1 > 0.0) || !(r2 > 0.0)) {
    throw std::invalid_argument("slice_measure_check: a, r1, r2 must be positive");
  }
  if (samples < 1) throw std::invalid_argument("slice_measure_check: samples must be >= 1");
  const int m = 2 * n;
  const auto c = p.coords();
  const double z0 = c[m];

  SliceCheck out;
  out.samples = samples;
  const double Q = m + 2.0;
  out.general_bound = std::min({std::pow(a, Q), std::pow(a, d) * std::pow(r2, Q - d),
                                std::pow(r1, d) * std::pow(r2, Q - d)});
  double rho_d = 0.0;
  for (int i = 0; i < d; ++i) rho_d += c[i] * c[i];
  rho_d = std::sqrt(rho_d);
  out.improved = rho_d > 0.0 && a <= rho_d;
  out.bound = out.improved
                  ? std::min(std::pow(a, 2 * n + 1) * r2 * r2 / rho_d,
                             std::pow(a, d + 2) * std::pow(r2, 2 * n + 1 - d) / rho_d)
                  : out.general_bound;

  // Horizontal sampling box: intersection of the coordinate boxes of both
  // systems of inequalities.
  std::vector<double> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
  double box_vol = 1.0;
  for (int i = 0; i < m; ++i) {
    const double r = i < d ? r1 : r2;
    lo[i] = std::max(-r, c[i] - a);
    hi[i] = std::min(r, c[i] + a);
    if (!(hi[i] > lo[i])) {
      box_vol = 0.0;
      break;
    }
    box_vol *= hi[i] - lo[i];
  }
  if (box_vol == 0.0) return out;

  Rng rng(derive_seed(seed, 0x511CE));
  std::vector<double> w(static_cast<std::size_t>(m));
  double sum = 0.0, sum2 = 0.0, max_len = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i) w[i] = rng.uniform(lo[i], hi[i]);
    double hv = 0.0, hv_off = 0.0, hp = 0.0, hp_off = 0.0;
    for (int i = 0; i < m; ++i) {
      const double off = w[i] - c[i];
      if (i < d) {
        hv += w[i] * w[i];
        hv_off += off * off;
      } else {
        hp += w[i] * w[i];
        hp_off += off * off;
      }
    }
    double len = 0.0;
    if (hv <= r1 * r1 && hv_off <= a * a && hp <= r2 * r2 && hp_off <= a * a) {
      double xy = 0.0;
      for (int i = 0; i < d; ++i) xy += w[i] * w[n + i];
      double s_pq = 0.0;  // <rho, y> - <y0, x>
      for (int i = 0; i < n; ++i) s_pq += c[i] * w[n + i] - c[n + i] * w[i];
      const double c1 = -2.0 * xy;
      const double c2 = z0 + 2.0 * s_pq;
      const double lo_z = std::max(c1 - r2 * r2, c2 - a * a);
      const double hi_z = std::min(c1 + r2 * r2, c2 + a * a);
      len = std::max(0.0, hi_z - lo_z);
    }
    if (len > 0.0) ++out.hits;
    sum += len;
    sum2 += len * len;
    max_len = std::max(max_len, len);
  }
  const double k = static_cast<double>(samples);
  const double mean = sum / k;
  const double var = std::max(0.0, sum2 / k - mean * mean);
  out.mc_measure = box_vol * mean;
  out.error = box_vol * std::sqrt(var / k);
  if (out.hits == 0) {
    out.upper_confidence = box_vol * 2.0 * std::min(r2 * r2, a * a) * 3.0 / k;
  } else {
    out.upper_confidence = out.mc_measure + 3.0 * out.error;
  }
  return out;
}

}  // namespace heis
