#include "heis/svf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace heis {

namespace {

void require_nd(Kind kind, int n, int d) {
  if (n < 1) throw std::invalid_argument("svf: n must be >= 1");
  if (kind != Kind::EuclideanSplit && (d < 1 || d > n)) {
    throw std::invalid_argument("svf: d=" + std::to_string(d) + " outside [1, " +
                                std::to_string(n) + "]");
  }
}

}  // namespace

std::vector<SvfBranch> svf_branches(Kind kind, int n, int d, Aspect aspect) {
  require_nd(kind, n, d);
  const double Q = 2.0 * n + 2.0;
  const double dd = d;
  std::vector<SvfBranch> all;
  if (kind == Kind::EuclideanSplit) {
    if (aspect == Aspect::Tall) {
      all = {{0.0, 2.0, 0, 0, 0, 1}, {2.0, Q, -2, 1, 2, 0}};
    } else {
      all = {{0.0, Q - 1.0, 0, 1, 0, 0}, {Q - 1.0, Q, 2.0 * (Q - 1.0), -1, -2.0 * (Q - 1.0), 2}};
    }
  } else if (aspect == Aspect::Tall) {
    all = {{0.0, Q - dd, 0, 0, 0, 1}, {Q - dd, Q, dd - Q, 1, Q - dd, 0}};
  } else if (kind == Kind::Type2) {
    all = {{0.0, dd, 0, 1, 0, 0}, {dd, Q, dd, 0, -dd, 1}};
  } else {
    all = {{0.0, dd, 0, 1, 0, 0},
           {dd, dd + 2.0, 0.5 * dd, 0.5, -0.5 * dd, 0.5},
           {dd + 2.0, Q - 1.0, dd + 1.0, 0, -dd - 1.0, 1},
           {Q - 1.0, Q, Q + dd, -1, -(Q + dd), 2}};
  }
  std::vector<SvfBranch> out;
  for (const auto& b : all) {
    if (b.t_hi > b.t_lo) out.push_back(b);
  }
  return out;
}

std::vector<double> svf_breakpoints(Kind kind, int n, int d, Aspect aspect) {
  std::vector<double> bp;
  const auto branches = svf_branches(kind, n, d, aspect);
  for (std::size_t i = 1; i < branches.size(); ++i) bp.push_back(branches[i].t_lo);
  return bp;
}

std::pair<double, double> svf_exponents(Kind kind, int n, int d, double t, Aspect aspect) {
  const double Q = 2.0 * n + 2.0;
  if (!(t >= 0.0 && t <= Q)) {
    throw std::invalid_argument("svf: t=" + std::to_string(t) + " outside [0, 2n+2]");
  }
  const auto branches = svf_branches(kind, n, d, aspect);
  for (const auto& b : branches) {
    if (t <= b.t_hi) return {b.a(t), b.b(t)};
  }
  const auto& last = branches.back();
  return {last.a(t), last.b(t)};
}

double svf_eval(const SvfSpec& s) {
  if (!(s.r1 > 0.0) || !(s.r2 > 0.0)) throw std::invalid_argument("svf: radii must be positive");
  const auto [a, b] = svf_exponents(s.kind, s.n, s.d, s.t, aspect_of(s.r1, s.r2));
  if (s.r1 == s.r2) return std::pow(s.r1, s.t);  // a + b = t on every branch
  return std::pow(s.r1, a) * std::pow(s.r2, b);
}

std::pair<double, double> PowerLawFamily::radii(double k) const noexcept {
  return {c1 * std::pow(k, -alpha1), c2 * std::pow(k, -alpha2)};
}

void validate(const PowerLawFamily& f) {
  require_nd(f.kind, f.n, f.d);
  if (!(f.alpha1 > 0.0) || !(f.alpha2 > 0.0)) {
    throw std::invalid_argument("PowerLawFamily: decay exponents must be positive");
  }
  if (!(f.c1 > 0.0) || !(f.c2 > 0.0)) {
    throw std::invalid_argument("PowerLawFamily: prefactors must be positive");
  }
}

Aspect asymptotic_aspect(const PowerLawFamily& f) {
  if (f.alpha1 > f.alpha2) return Aspect::Tall;
  if (f.alpha1 < f.alpha2) return Aspect::Wide;
  return f.c1 <= f.c2 ? Aspect::Tall : Aspect::Wide;
}

double decay_rate(const PowerLawFamily& f, double t) {
  validate(f);
  const auto [a, b] = svf_exponents(f.kind, f.n, f.d, t, asymptotic_aspect(f));
  return f.alpha1 * a + f.alpha2 * b;
}

double critical_exponent(const PowerLawFamily& f) {
  validate(f);
  const double Q = 2.0 * f.n + 2.0;
  for (const auto& br : svf_branches(f.kind, f.n, f.d, asymptotic_aspect(f))) {
    // E is linear on the branch: E(t) = e0 + e1 t.
    const double e0 = f.alpha1 * br.a0 + f.alpha2 * br.b0;
    const double e1 = f.alpha1 * br.a1 + f.alpha2 * br.b1;
    const double e_hi = e0 + e1 * br.t_hi;
    if (e_hi < 1.0) continue;
    const double e_lo = e0 + e1 * br.t_lo;
    if (e_lo >= 1.0) return br.t_lo;
    if (e1 <= 0.0) throw std::logic_error("critical_exponent: decay rate is not increasing");
    return (1.0 - e0) / e1;
  }
  return Q;
}

double dimension_predict(const PowerLawFamily& f) { return critical_exponent(f); }

double series_partial_sum_oracle(const PowerLawFamily& f, double t, std::uint64_t K) {
  validate(f);
  if (K < 1) throw std::invalid_argument("series_partial_sum_oracle: K must be >= 1");
  double sum = 0.0;
  double comp = 0.0;
  SvfSpec spec{f.kind, f.n, f.d, t, 1.0, 1.0};
  for (std::uint64_t k = 1; k <= K; ++k) {
    const auto [r1, r2] = f.radii(static_cast<double>(k));
    spec.r1 = r1;
    spec.r2 = r2;
    const double term = svf_eval(spec);
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

void to_json(nlohmann::json& j, const PowerLawFamily& f) {
  j = nlohmann::json{{"kind", to_string(f.kind)}, {"n", f.n},        {"d", f.d},
                     {"alpha1", f.alpha1},         {"alpha2", f.alpha2}, {"c1", f.c1},
                     {"c2", f.c2}};
}

PowerLawFamily family_from_json(const nlohmann::json& j) {
  PowerLawFamily f;
  f.kind = parse_kind(j.value("kind", std::string("type1")));
  f.n = j.value("n", 1);
  f.d = j.value("d", 1);
  f.alpha1 = j.at("alpha1").get<double>();
  f.alpha2 = j.at("alpha2").get<double>();
  f.c1 = j.value("c1", 1.0);
  f.c2 = j.value("c2", 1.0);
  validate(f);
  return f;
}

}  // namespace heis
