#pragma once

// Finite-stage simulation of limsup sets of randomly centered rectangles.
//
// Rectangles k in [N, M] get i.i.d. uniform centers in a window W. The
// dimension estimate comes from dyadic blocks of stages [N 2^b, N 2^{b+1}):
// for each block the cheapest uniform cover of the block's clipped cloud at
// radii below the block's rectangle size gives C_b(t), and the estimate is
// the t where log C_b(t) stops growing with log(block size). That t is the
// empirical convergence threshold of sum_k Phi^t(r_k). A box-counting slope
// of the pooled cloud is reported alongside as a diagnostic.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "heis/group.hpp"
#include "heis/point_cloud.hpp"
#include "heis/svf.hpp"

namespace heis {

struct SimConfig {
  PowerLawFamily family;
  std::vector<double> window_lo;  // default [0,1]^{2n+1}
  std::vector<double> window_hi;
  std::uint64_t stage_start = 16;   // N
  std::uint64_t stage_end = 1024;   // M
  std::vector<double> eps_ladder;   // for the pooled box-counting diagnostic
  std::size_t points_per_rect = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t frame_seed = 0;     // 0: canonical frame, else a random isotropic frame
};

/// Fills defaults (window, ladder) and checks invariants.
void normalize(SimConfig& cfg);

std::vector<HPoint> sample_centers(const SimConfig& cfg);

/// Points of the rectangles N..M restricted to W. `owner`, if given, receives
/// the stage k of each point.
PointCloud finite_stage_cloud(const SimConfig& cfg, std::vector<std::uint64_t>* owner = nullptr);

struct DimensionOptions {
  /// N(eps) is the net size at the first prefix of the cloud holding this
  /// many points per net point, so every radius sees the same sampling
  /// density. A radius is saturated if the cloud runs out first.
  double oversampling = 10.0;
  /// If non-empty, only net points inside this box are counted.
  std::vector<double> count_lo;
  std::vector<double> count_hi;
};

struct DimensionEstimate {
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> eps;
  std::vector<std::size_t> counts;
  std::vector<bool> saturated;
  bool valid = false;  // at least 3 unsaturated scales entered the fit
};

/// Slope of log N(eps) against log(1/eps) over unsaturated ladder scales.
DimensionEstimate estimate_dimension(const PointCloud& cloud, const std::vector<double>& eps_ladder,
                                     const DimensionOptions& opt = {});

struct BlockSummary {
  std::uint64_t k_begin = 0;
  std::uint64_t k_end = 0;  // exclusive
  std::size_t points = 0;
  double top_eps = 0.0;
  std::vector<std::pair<double, std::size_t>> ladder;  // (eps, net count)
};

struct SimReport {
  double estimated_dimension = 0.0;
  double estimated_stderr = 0.0;
  double predicted = 0.0;
  std::vector<BlockSummary> blocks;
  DimensionEstimate pooled;  // box-counting diagnostic
  std::size_t cloud_size = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> warnings;
  bool fit_valid = false;
};

SimReport run_experiment(const SimConfig& cfg);

/// log C_b(t) regressed on log(block size); exposed for tests.
double block_growth_slope(const std::vector<BlockSummary>& blocks, double t);

void to_json(nlohmann::json& j, const SimConfig& c);
SimConfig sim_config_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const SimReport& r);
void write_counts_csv(std::ostream& out, const SimReport& r);

}  // namespace heis
