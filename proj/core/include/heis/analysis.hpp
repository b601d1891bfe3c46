#pragma once

// Numerical estimators for covering numbers, Hausdorff content, Riesz
// energy and capacity of rectangles, plus log-log slope fitting.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "heis/group.hpp"
#include "heis/kind.hpp"
#include "heis/rectangles.hpp"

namespace heis {

struct ScalePoint {
  double scale = 0.0;
  double estimate = 0.0;
  double error = 0.0;  // standard error of the estimate, 0 if unknown
};

struct ScalingReport {
  std::vector<ScalePoint> points;  // scales strictly decreasing
  double slope = 0.0;
  double slope_stderr = 0.0;
  double theory_slope = 0.0;
  std::vector<std::string> warnings;

  bool within(double tol) const noexcept;
};

void to_json(nlohmann::json& j, const ScalingReport& r);
void write_csv(std::ostream& out, const ScalingReport& r);

struct LogLogFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log(estimate) on log(scale). Needs >= 3 points.
LogLogFit fit_loglog(const std::vector<std::pair<double, double>>& points);

/// Fills slope and slope_stderr of a report from its points.
void fit_report(ScalingReport& r);

// Covering numbers --------------------------------------------------------

struct CoveringCount {
  std::size_t count = 0;
  std::size_t samples = 0;
  std::size_t late_additions = 0;  // net points added during the last 10% of samples
  bool saturation_warning = false;
};

/// Greedy eps-net size over a uniform sample of the rectangle.
CoveringCount covering_count(const Rectangle& rect, double eps, std::size_t sample_budget,
                             std::uint64_t seed, int workers = 1);

/// Net sizes of one cloud at several radii (processed independently).
std::vector<std::size_t> net_counts(const PointCloud& cloud, const std::vector<double>& eps);

// Hausdorff content --------------------------------------------------------

enum class ContentMethod {
  /// N(eps) = lambda^2 / C(eps) with C the pair mass of {d <= eps} in R x R,
  /// estimated from ball probes q uniform in B(p, eps) or from independent
  /// uniform pairs, whichever has more hits. The same samples serve every
  /// radius.
  BallMass,
  /// Greedy eps-net over a uniform cloud, divided by the share of a held-out
  /// sample it covers.
  GreedyNet,
};

struct ContentOptions {
  ContentMethod method = ContentMethod::BallMass;
  double ladder_ratio = 0.9170040432046712;  // 2^{-1/8}
  /// BallMass: radii with fewer hits than this are skipped.
  std::size_t min_hits = 400;
  /// GreedyNet: a radius is unusable once the net holds more than this
  /// fraction of the cloud, or covers less than min_coverage of the held-out
  /// sample (holdout_fraction of the budget).
  double saturation_fraction = 0.2;
  double holdout_fraction = 0.05;
  double min_coverage = 0.5;
};

struct LadderStep {
  double eps = 0.0;
  double count = 0.0;    // covering number estimate
  double covered = 1.0;  // GreedyNet: held-out share within eps of the net
};

struct ContentEstimate {
  double value = 0.0;  // min over usable eps of count(eps) eps^t
  double best_eps = 0.0;
  double best_count = 0.0;
  std::vector<LadderStep> ladder;  // eps decreasing
  bool hit_saturation = false;     // GreedyNet: descent ended at a saturated radius
};

/// Proxy for the t-dimensional Hausdorff content: the cheapest cover by balls
/// of one radius, minimised over a geometric eps ladder that starts where one
/// ball covers everything.
ContentEstimate content_estimate(const Rectangle& rect, double t, std::size_t sample_budget,
                                 std::uint64_t seed, int workers = 1,
                                 const ContentOptions& opt = {});

/// Radii r(s) = (c1 s^gamma1, c2 s^gamma2).
struct AspectProfile {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::pair<double, double> radii(double s) const noexcept;
};

/// gamma1 a(t) + gamma2 b(t) with (a, b) the exponents of Phi^t in the aspect
/// of r(s) for s < 1.
double profile_theory_slope(Kind kind, int n, int d, const AspectProfile& prof, double t);

ScalingReport content_scaling(Kind kind, int n, int d, const AspectProfile& prof, double t,
                              const std::vector<double>& scales, std::size_t budget,
                              std::uint64_t seed, int workers = 1,
                              const ContentOptions& opt = {});

// Energy and capacity -----------------------------------------------------

struct EnergyOptions {
  double delta_factor = 1e-3;  // kernel clipping radius delta = factor * min(r1, r2)
  std::size_t batches = 50;
};

struct EnergyEstimate {
  double value = 0.0;   // estimate of I_t(R)
  double error = 0.0;   // batch-means standard error
  double t = 0.0;
  std::size_t samples = 0;
  double delta = 0.0;
  /// Fraction of the pair mass lambda x lambda at distance below delta.
  double clipped_mass_fraction = 0.0;
  /// Share of the estimate contributed by the analytic term for d < delta.
  double clipped_energy_fraction = 0.0;
  std::vector<std::string> warnings;
};

/// Monte Carlo estimate of I_t(R) = double integral of d(p,q)^{-t} over R x R.
EnergyEstimate energy_mc(const Rectangle& rect, double t, std::size_t samples,
                         std::uint64_t seed, int workers = 1, const EnergyOptions& opt = {});

/// Energies for several t from one set of samples; non-decreasing in t when
/// the rectangle has diameter below 1/2.
std::vector<EnergyEstimate> energy_mc_multi(const Rectangle& rect, const std::vector<double>& ts,
                                            std::size_t samples, std::uint64_t seed,
                                            int workers = 1, const EnergyOptions& opt = {});

/// lambda(R)^2 / I_t(R).
double capacity_lower_bound(const Rectangle& rect, double t, std::size_t samples,
                            std::uint64_t seed, int workers = 1);

/// Slope of log I_t against log s for the profile, from the energy case
/// table of type 1 and type 2 rectangles.
double energy_theory_slope(Kind kind, int n, int d, const AspectProfile& prof, double t);

ScalingReport energy_scaling(const Rectangle& unit, const AspectProfile& prof, double t,
                             const std::vector<double>& scales, std::size_t samples,
                             std::uint64_t seed, int workers = 1);

// Slice measure -----------------------------------------------------------

struct SliceCheck {
  double mc_measure = 0.0;
  double error = 0.0;
  double upper_confidence = 0.0;  // one-sided, ~3 sigma (rule of three on zero hits)
  double bound = 0.0;             // unit-constant min-bound, improved branch when active
  double general_bound = 0.0;     // min(a^Q, a^d r2^{Q-d}, r1^d r2^{Q-d})
  bool improved = false;          // 0 < a <= |rho^d|
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// Monte Carlo measure of A cap B(a) for the canonical frame, with the
/// analytic bound. p must satisfy the defining inequalities of A.
SliceCheck slice_measure_check(int n, int d, double r1, double r2, const HPoint& p, double a,
                               std::size_t samples, std::uint64_t seed);

}  // namespace heis
