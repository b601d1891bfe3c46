#include "heis/limsup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "heis/analysis.hpp"
#include "heis/net.hpp"
#include "heis/random.hpp"
#include "heis/rectangles.hpp"

namespace heis {

namespace {

constexpr std::uint64_t kCenterStream = 0xCE17E5ULL;
constexpr std::uint64_t kPointStream = 0x9017E5ULL;
constexpr double kBlockLadderRatio = 0.8408964152537145;  // 2^{-1/4}
constexpr double kBlockSaturation = 0.25;

double rect_diameter(double r1, double r2, Kind kind, int n, int d) {
  const Rectangle r = Rectangle::canonical(kind, n, d, r1, r2);
  const CoordBox box = bounding_box(r);
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < box.half.size(); ++i) h += box.half[i] * box.half[i];
  const double z = box.half.back();
  return 2.0 * std::sqrt(std::sqrt(h * h + z * z));
}

bool in_window(std::span<const double> p, const SimConfig& cfg) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < cfg.window_lo[i] || p[i] > cfg.window_hi[i]) return false;
  }
  return true;
}

IsotropicFrame sim_frame(const SimConfig& cfg) {
  const int n = cfg.family.n;
  const int d = cfg.family.kind == Kind::EuclideanSplit ? 1 : cfg.family.d;
  return cfg.frame_seed == 0 ? canonical_frame(n, d) : random_isotropic_frame(n, d, cfg.frame_seed);
}

}  // namespace

void normalize(SimConfig& cfg) {
  validate(cfg.family);
  const int n = cfg.family.n;
  const std::size_t dim = static_cast<std::size_t>(2 * n + 1);
  if (cfg.window_lo.empty() && cfg.window_hi.empty()) {
    cfg.window_lo.assign(dim, 0.0);
    cfg.window_hi.assign(dim, 1.0);
  }
  if (cfg.window_lo.size() != dim || cfg.window_hi.size() != dim) {
    throw std::invalid_argument("SimConfig: window must have 2n+1 coordinates");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(cfg.window_lo[i] < cfg.window_hi[i])) {
      throw std::invalid_argument("SimConfig: window must be a nonempty box");
    }
  }
  if (cfg.stage_start < 1 || cfg.stage_end < cfg.stage_start) {
    throw std::invalid_argument("SimConfig: need 1 <= stage_start <= stage_end");
  }
  if (cfg.points_per_rect < 1) throw std::invalid_argument("SimConfig: points_per_rect >= 1");
  if (cfg.eps_ladder.empty()) {
    const auto [r1, r2] = cfg.family.radii(static_cast<double>(cfg.stage_start));
    double e = std::min(0.5, std::max(r1, r2));
    for (int i = 0; i < 6; ++i, e *= 0.5) cfg.eps_ladder.push_back(e);
  }
  for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
    const double e = cfg.eps_ladder[i];
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("SimConfig: eps_ladder must lie in (0, 1)");
    if (i > 0 && !(e < cfg.eps_ladder[i - 1])) {
      throw std::invalid_argument("SimConfig: eps_ladder must be decreasing");
    }
  }
  if (cfg.workers < 1) cfg.workers = 1;
}

std::vector<HPoint> sample_centers(const SimConfig& cfg_in) {
  SimConfig cfg = cfg_in;
  normalize(cfg);
  std::vector<HPoint> out;
  out.reserve(static_cast<std::size_t>(cfg.stage_end - cfg.stage_start + 1));
  std::vector<double> c(cfg.window_lo.size());
  for (std::uint64_t k = cfg.stage_start; k <= cfg.stage_end; ++k) {
    Rng rng(derive_seed(cfg.seed ^ kCenterStream, k));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = rng.uniform(cfg.window_lo[i], cfg.window_hi[i]);
    out.push_back(HPoint::from_coords(c));
  }
  return out;
}

PointCloud finite_stage_cloud(const SimConfig& cfg_in, std::vector<std::uint64_t>* owner) {
  SimConfig cfg = cfg_in;
  normalize(cfg);
  const int n = cfg.family.n;
  const IsotropicFrame frame = sim_frame(cfg);
  const std::vector<HPoint> centers = sample_centers(cfg);
  const std::size_t count = centers.size();
  std::vector<PointCloud> parts(count, PointCloud(n));
  parallel_chunks(count, cfg.workers, [&](std::size_t i) {
    const std::uint64_t k = cfg.stage_start + i;
    const auto [r1, r2] = cfg.family.radii(static_cast<double>(k));
    const Rectangle rect(cfg.family.kind, frame, centers[i], r1, r2);
    const PointCloud pts =
        sample_interior(rect, cfg.points_per_rect, derive_seed(cfg.seed ^ kPointStream, k), 1);
    PointCloud kept(n);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (in_window(pts[j], cfg)) kept.push_back(pts[j]);
    }
    parts[i] = std::move(kept);
  });
  PointCloud cloud(n);
  if (owner) owner->clear();
  for (std::size_t i = 0; i < count; ++i) {
    cloud.append(parts[i]);
    if (owner) owner->insert(owner->end(), parts[i].size(), cfg.stage_start + i);
  }
  if (cloud.empty()) {
    throw std::runtime_error(
        "finite_stage_cloud: every rectangle missed the window; enlarge W or shrink the radii");
  }
  return cloud;
}

DimensionEstimate estimate_dimension(const PointCloud& cloud, const std::vector<double>& eps_ladder,
                                     const DimensionOptions& opt) {
  if (cloud.empty()) throw std::invalid_argument("estimate_dimension: empty cloud");
  if (eps_ladder.size() < 4) throw std::invalid_argument("estimate_dimension: need >= 4 scales");
  if (!(opt.oversampling >= 1.0)) throw std::invalid_argument("estimate_dimension: oversampling < 1");
  const bool windowed = !opt.count_lo.empty();
  const auto len = static_cast<std::size_t>(2 * cloud.dim() + 1);
  if (windowed && (opt.count_lo.size() != len || opt.count_hi.size() != len)) {
    throw std::invalid_argument("estimate_dimension: count window must have 2n+1 coordinates");
  }
  DimensionEstimate est;
  est.eps = eps_ladder;
  est.counts.resize(eps_ladder.size());
  est.saturated.resize(eps_ladder.size());
  for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
    GreedyNet net(cloud.dim(), eps_ladder[k]);
    bool reached = false;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      net.offer(cloud[i]);
      if (static_cast<double>(i + 1) >= opt.oversampling * static_cast<double>(net.size())) {
        reached = true;
        break;
      }
    }
    std::size_t count = net.size();
    if (windowed) {
      count = 0;
      const PointCloud& c = net.centers();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const auto p = c[i];
        bool in = true;
        for (std::size_t j = 0; j < p.size() && in; ++j) {
          in = p[j] >= opt.count_lo[j] && p[j] <= opt.count_hi[j];
        }
        count += in ? 1 : 0;
      }
    }
    est.counts[k] = count;
    est.saturated[k] = !reached || count == 0;
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!est.saturated[i]) pts.emplace_back(1.0 / eps_ladder[i], static_cast<double>(est.counts[i]));
  }
  if (pts.size() >= 3) {
    const LogLogFit fit = fit_loglog(pts);
    est.slope = fit.slope;
    est.slope_stderr = fit.slope_stderr;
    est.valid = true;
  }
  return est;
}

namespace {

double block_content(const BlockSummary& b, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [eps, count] : b.ladder) {
    best = std::min(best, static_cast<double>(count) * std::pow(eps, t));
  }
  return best;
}

LogLogFit block_fit(const std::vector<BlockSummary>& blocks, double t) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& b : blocks) {
    if (b.ladder.empty()) continue;
    pts.emplace_back(static_cast<double>(b.k_end - b.k_begin), block_content(b, t));
  }
  return fit_loglog(pts);
}

}  // namespace

double block_growth_slope(const std::vector<BlockSummary>& blocks, double t) {
  return block_fit(blocks, t).slope;
}

SimReport run_experiment(const SimConfig& cfg_in) {
  SimConfig cfg = cfg_in;
  normalize(cfg);
  const PowerLawFamily& fam = cfg.family;
  const int n = fam.n;
  const double Q = 2.0 * n + 2.0;

  SimReport rep;
  rep.seed = cfg.seed;
  rep.workers = cfg.workers;
  rep.predicted = dimension_predict(fam);

  std::vector<std::uint64_t> owner;
  const PointCloud cloud = finite_stage_cloud(cfg, &owner);
  rep.cloud_size = cloud.size();

  // Dyadic blocks fully inside [N, M].
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  for (std::uint64_t b = cfg.stage_start; 2 * b - 1 <= cfg.stage_end; b *= 2) {
    ranges.emplace_back(b, 2 * b);
  }
  if (ranges.empty()) {
    throw std::invalid_argument("run_experiment: stage_end must be at least 2 stage_start - 1");
  }
  rep.blocks.resize(ranges.size());
  parallel_chunks(ranges.size(), cfg.workers, [&](std::size_t bi) {
    BlockSummary& blk = rep.blocks[bi];
    blk.k_begin = ranges[bi].first;
    blk.k_end = ranges[bi].second;
    PointCloud part(n);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (owner[i] >= blk.k_begin && owner[i] < blk.k_end) part.push_back(cloud[i]);
    }
    blk.points = part.size();
    if (part.empty()) return;
    const auto [r1, r2] = fam.radii(static_cast<double>(blk.k_begin));
    blk.top_eps = rect_diameter(r1, r2, fam.kind, n, fam.d);
    for (double eps = blk.top_eps;; eps *= kBlockLadderRatio) {
      GreedyNet net(n, eps);
      for (std::size_t i = 0; i < part.size(); ++i) net.offer(part[i]);
      if (static_cast<double>(net.size()) > kBlockSaturation * static_cast<double>(part.size())) {
        break;
      }
      blk.ladder.emplace_back(eps, net.size());
    }
  });

  std::size_t usable = 0;
  for (const auto& b : rep.blocks) usable += b.ladder.empty() ? 0 : 1;
  if (usable < 3) {
    rep.warnings.push_back("fewer than 3 dyadic blocks with an unsaturated radius; widen [N, M] "
                           "or raise points_per_rect");
  } else {
    auto sigma = [&](double t) { return block_growth_slope(rep.blocks, t); };
    double t_star = Q;
    if (sigma(0.0) <= 0.0) {
      t_star = 0.0;
    } else if (sigma(Q) < 0.0) {
      const double step = 0.01;
      double lo = 0.0;
      for (double t = step; t <= Q + 1e-12; t += step) {
        if (sigma(t) < 0.0) break;
        lo = t;
      }
      double hi = std::min(Q, lo + step);
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sigma(mid) >= 0.0 ? lo : hi) = mid;
      }
      t_star = 0.5 * (lo + hi);
    }
    rep.estimated_dimension = t_star;
    const double h = 0.05;
    const double tl = std::max(0.0, t_star - h), th = std::min(Q, t_star + h);
    const double deriv = (sigma(th) - sigma(tl)) / (th - tl);
    const double se = block_fit(rep.blocks, t_star).slope_stderr;
    rep.estimated_stderr = std::abs(deriv) > 1e-9 ? se / std::abs(deriv) : 0.0;
    rep.fit_valid = true;
  }

  rep.pooled = estimate_dimension(cloud, cfg.eps_ladder);
  if (!rep.pooled.valid) {
    rep.warnings.push_back("pooled box-counting diagnostic: fewer than 3 unsaturated scales");
  }
  return rep;
}

void to_json(nlohmann::json& j, const SimConfig& c) {
  nlohmann::json fam;
  to_json(fam, c.family);
  j = nlohmann::json{{"family", fam},
                     {"window", {{"lo", c.window_lo}, {"hi", c.window_hi}}},
                     {"stage_start", c.stage_start},
                     {"stage_end", c.stage_end},
                     {"eps_ladder", c.eps_ladder},
                     {"points_per_rect", c.points_per_rect},
                     {"seed", c.seed},
                     {"workers", c.workers},
                     {"frame_seed", c.frame_seed}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.family = family_from_json(j.at("family"));
  if (j.contains("window")) {
    c.window_lo = j.at("window").at("lo").get<std::vector<double>>();
    c.window_hi = j.at("window").at("hi").get<std::vector<double>>();
  }
  c.stage_start = j.value("stage_start", c.stage_start);
  c.stage_end = j.value("stage_end", c.stage_end);
  if (j.contains("eps_ladder")) c.eps_ladder = j.at("eps_ladder").get<std::vector<double>>();
  c.points_per_rect = j.value("points_per_rect", c.points_per_rect);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.frame_seed = j.value("frame_seed", c.frame_seed);
  return c;
}

void to_json(nlohmann::json& j, const SimReport& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) {
    nlohmann::json ladder = nlohmann::json::array();
    for (const auto& [e, c] : b.ladder) ladder.push_back({e, c});
    blocks.push_back({{"k_begin", b.k_begin},
                      {"k_end", b.k_end},
                      {"points", b.points},
                      {"top_eps", b.top_eps},
                      {"ladder", ladder}});
  }
  nlohmann::json pooled{{"slope", r.pooled.slope},
                        {"slope_stderr", r.pooled.slope_stderr},
                        {"eps", r.pooled.eps},
                        {"counts", r.pooled.counts},
                        {"saturated", r.pooled.saturated},
                        {"valid", r.pooled.valid}};
  j = nlohmann::json{{"estimated_dimension", r.estimated_dimension},
                     {"estimated_stderr", r.estimated_stderr},
                     {"predicted", r.predicted},
                     {"fit_valid", r.fit_valid},
                     {"cloud_size", r.cloud_size},
                     {"seed", r.seed},
                     {"workers", r.workers},
                     {"blocks", blocks},
                     {"pooled_box_counting", pooled},
                     {"warnings", r.warnings}};
}

void write_counts_csv(std::ostream& out, const SimReport& r) {
  out.precision(12);
  out << "eps,count,saturated\n";
  for (std::size_t i = 0; i < r.pooled.eps.size(); ++i) {
    out << r.pooled.eps[i] << ',' << r.pooled.counts[i] << ',' << (r.pooled.saturated[i] ? 1 : 0)
        << '\n';
  }
}

}  // namespace heis
