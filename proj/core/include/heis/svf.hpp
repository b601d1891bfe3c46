#pragma once

// Directed singular value functions Phi^t(r1, r2) of the three rectangle
// families and the critical exponent of power-law radius sequences.

#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "heis/kind.hpp"

namespace heis {

struct SvfSpec {
  Kind kind = Kind::Type1;
  int n = 1;
  int d = 1;  // ignored for EuclideanSplit
  double t = 0.0;
  double r1 = 1.0;
  double r2 = 1.0;
};

/// On [t_lo, t_hi] the exponents are a = a0 + a1 t, b = b0 + b1 t, and
/// Phi^t = r1^a r2^b. Intervals are closed and tile [0, 2n+2].
struct SvfBranch {
  double t_lo, t_hi;
  double a0, a1;
  double b0, b1;
  double a(double t) const noexcept { return a0 + a1 * t; }
  double b(double t) const noexcept { return b0 + b1 * t; }
};

/// Branch table for one kind and aspect. Empty intervals are dropped.
std::vector<SvfBranch> svf_branches(Kind kind, int n, int d, Aspect aspect);

/// The t values where the exponent pair changes slope, interior to ]0, 2n+2[.
std::vector<double> svf_breakpoints(Kind kind, int n, int d, Aspect aspect);

std::pair<double, double> svf_exponents(Kind kind, int n, int d, double t, Aspect aspect);

double svf_eval(const SvfSpec& spec);

struct PowerLawFamily {
  Kind kind = Kind::Type1;
  int n = 1;
  int d = 1;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;

  /// r_k = (c1 k^-alpha1, c2 k^-alpha2), k >= 1.
  std::pair<double, double> radii(double k) const noexcept;
};

void validate(const PowerLawFamily& f);

/// Aspect the sequence settles into as k grows.
Aspect asymptotic_aspect(const PowerLawFamily& f);

/// E(t) = alpha1 a(t) + alpha2 b(t), the decay rate of Phi^t(r_k) in k.
double decay_rate(const PowerLawFamily& f, double t);

/// min(E^{-1}(1), 2n+2), by inverting the piecewise-linear E exactly.
double critical_exponent(const PowerLawFamily& f);

/// Predicted dimension of the limsup set; equal to critical_exponent.
double dimension_predict(const PowerLawFamily& f);

/// sum_{k=1}^{K} Phi^t(r_k), with the aspect re-evaluated for each k.
double series_partial_sum_oracle(const PowerLawFamily& f, double t, std::uint64_t K);

void to_json(nlohmann::json& j, const PowerLawFamily& f);
PowerLawFamily family_from_json(const nlohmann::json& j);

}  // namespace heis
