// Riesz t-energy of the uniform measure on a rectangle.
//
// With rho = min(r1, r2), I_t = lambda E_p[near(p)] + lambda^2 E[d^{-t}; d > rho]
// where the second term uses independent uniform pairs and
//   near(p) = int over R cap B(p,rho) of d(p,q)^{-t} dq
//           = rho^{-t} lambda(R cap B(p,rho)) + int_0^rho t a^{-t-1} lambda(R cap B(p,a)) da.
// In the layer-cake integral:
//   a < delta      : c_B t delta^{Q-t} / (Q-t)            (ball-volume law)
//   [delta, rho]   : log a uniform, q = p * dilate(u, a) with u uniform in the
//                    unit ball, weight L t c_B a^{Q-t} 1_R(q), L = log(rho/delta).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "heis/analysis.hpp"
#include "heis/random.hpp"
#include "heis/svf.hpp"

namespace heis {

namespace {


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

}  // namespace

std::vector<EnergyEstimate> energy_mc_multi(const Rectangle& rect, const std::vector<double>& ts,
                                            std::size_t samples, std::uint64_t seed, int workers,
                                            const EnergyOptions& opt) {
  const int n = rect.n();
  const int m = 2 * n;
  const double Q = m + 2.0;
  for (double t : ts) {
    if (!(t > 0.0)) throw std::invalid_argument("energy_mc: t must be positive");
    if (t >= Q) {
      throw std::invalid_argument("energy_mc: t=" + std::to_string(t) +
                                  " >= 2n+2, the energy of a rectangle diverges");
    }
  }
  if (samples < 10000) throw std::invalid_argument("energy_mc: need at least 1e4 samples");
  if (opt.batches < 2) throw std::invalid_argument("energy_mc: need at least 2 batches");

  const double lambda = measure(rect);
  const double cB = koranyi_ball_volume(n);
  const double rho = std::min(rect.r1(), rect.r2());
  const double delta = opt.delta_factor * rho;
  const double L = std::log(rho / delta);
  const std::size_t nt = ts.size();
  const std::size_t B = opt.batches;
  const std::size_t per = (samples + B - 1) / B;

  std::vector<double> batch_means(B * nt, 0.0);
  parallel_chunks(B, workers, [&](std::size_t b) {
    const PointCloud ps = sample_interior(rect, per, derive_seed(seed, 3 * b), 1);
    const PointCloud partners = sample_interior(rect, per, derive_seed(seed, 3 * b + 1), 1);
    Rng rng(derive_seed(seed, 3 * b + 2));
    std::vector<double> u(static_cast<std::size_t>(m + 1));
    std::vector<double> q(static_cast<std::size_t>(m + 1));
    std::vector<double> acc(nt, 0.0);
    const double rho_q = std::pow(rho, Q);
    auto probe = [&](const std::span<const double> p, double a) {
      sample_unit_ball(rng, m, u.data());
      for (int k = 0; k < m; ++k) u[k] *= a;
      u[m] *= a * a;
      coords::mul(p, u, q);
      return rect.contains_coords(q);
    };
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto p = ps[i];
      if (probe(p, rho)) {
        for (std::size_t j = 0; j < nt; ++j) acc[j] += cB * rho_q * std::pow(rho, -ts[j]);
      }
      const double a = delta * std::exp(L * rng.uniform());
      if (probe(p, a)) {
        const double la = std::log(a);
        for (std::size_t j = 0; j < nt; ++j) acc[j] += L * ts[j] * cB * std::exp((Q - ts[j]) * la);
      }
      const double dist = coords::distance(p, partners[i]);
      if (dist > rho) {
        const double ld = std::log(dist);
        for (std::size_t j = 0; j < nt; ++j) acc[j] += lambda * std::exp(-ts[j] * ld);
      }
    }
    for (std::size_t j = 0; j < nt; ++j) {
      batch_means[b * nt + j] = acc[j] / static_cast<double>(ps.size());
    }
  });

  std::vector<EnergyEstimate> out(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = ts[j];
    const double near_term = cB * t * std::pow(delta, Q - t) / (Q - t);
    double mean = 0.0;
    for (std::size_t b = 0; b < B; ++b) mean += batch_means[b * nt + j];
    mean /= static_cast<double>(B);
    double var = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double dlt = batch_means[b * nt + j] - mean;
      var += dlt * dlt;
    }
    var /= static_cast<double>(B - 1);
    EnergyEstimate& e = out[j];
    e.t = t;
    e.samples = per * B;
    e.delta = delta;
    const double rt = mean + near_term;
    e.value = lambda * rt;
    e.error = lambda * std::sqrt(var / static_cast<double>(B));
    e.clipped_mass_fraction = std::min(1.0, cB * std::pow(delta, Q) / lambda);
    e.clipped_energy_fraction = near_term / rt;
    if (e.clipped_mass_fraction > 0.05) {
      e.warnings.push_back("clipped mass fraction above 5%; the estimate may be biased");
    }
  }
  return out;
}

EnergyEstimate energy_mc(const Rectangle& rect, double t, std::size_t samples, std::uint64_t seed,
                         int workers, const EnergyOptions& opt) {
  return energy_mc_multi(rect, {t}, samples, seed, workers, opt).front();
}

double capacity_lower_bound(const Rectangle& rect, double t, std::size_t samples,
                            std::uint64_t seed, int workers) {
  const double lambda = measure(rect);
  return lambda * lambda / energy_mc(rect, t, samples, seed, workers).value;
}

double energy_theory_slope(Kind kind, int n, int d, const AspectProfile& prof, double t) {
  const double Q = 2.0 * n + 2.0;
  if (!(t > 0.0 && t < Q)) throw std::invalid_argument("energy_theory_slope: t outside ]0, 2n+2[");
  const Aspect aspect = prof.gamma1 < prof.gamma2   ? Aspect::Wide
                        : prof.gamma1 > prof.gamma2 ? Aspect::Tall
                                                    : aspect_of(prof.c1, prof.c2);
  double A = 0.0, B = 0.0;  // I_t ~ r1^A r2^B
  const double dd = d;
  if (kind == Kind::EuclideanSplit) {
    // No case table for this family; use lambda^2 / Phi^t.
    const auto [a, b] = svf_exponents(kind, n, d, t, aspect);
    A = 4.0 * n - a;
    B = 4.0 - b;
  } else if (aspect == Aspect::Tall) {
    if (t <= Q - dd) {
      A = 2 * dd;
      B = 2 * Q - 2 * dd - t;
    } else {
      A = Q + dd - t;
      B = Q - dd;
    }
  } else if (kind == Kind::Type2) {
    if (t <= dd) {
      A = 2 * dd - t;
      B = 2 * Q - 2 * dd;
    } else {
      A = dd;
      B = 2 * Q - dd - t;
    }
  } else if (t <= dd) {
    A = 2 * dd - t;
    B = 2 * Q - 2 * dd;
  } else if (t <= dd + 2) {
    A = (3 * dd - t) / 2;
    B = (4 * Q - 3 * dd - t) / 2;
  } else if (t <= Q - 1) {
    // Logarithmic case for d = 1 is asserted at the power-law level only.
    A = d >= 2 ? dd - 1 : 0.0;
    B = d >= 2 ? 2 * Q + 1 - dd - t : 2 * Q - t;
  } else {
    A = t + dd - Q;
    B = 3 * Q - dd - 2 * t;
  }
  return prof.gamma1 * A + prof.gamma2 * B;
}

ScalingReport energy_scaling(const Rectangle& unit, const AspectProfile& prof, double t,
                             const std::vector<double>& scales, std::size_t samples,
                             std::uint64_t seed, int workers) {
  ScalingReport rep;
  rep.theory_slope = energy_theory_slope(unit.kind(), unit.n(), unit.d(), prof, t);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw std::invalid_argument("energy_scaling: scales must be strictly decreasing");
    }
    const auto [r1, r2] = prof.radii(scales[i]);
    const Rectangle rect(unit.kind(), unit.frame(), unit.center(), r1, r2);
    const EnergyEstimate e = energy_mc(rect, t, samples, derive_seed(seed, i), workers);
    for (const auto& w : e.warnings) rep.warnings.push_back(w);
    rep.points.push_back({scales[i], e.value, e.error});
  }
  fit_report(rep);
  return rep;
}

}  // namespace heis
