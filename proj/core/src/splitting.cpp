#include "heis/splitting.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "heis/random.hpp"

namespace heis {

namespace {

constexpr double kFrameTol = 1e-10;

void require_len(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty() || u.size() % 2 != 0) {
    throw std::invalid_argument("sigma: vectors must have equal even length 2n");
  }
}

double sigma_unchecked(const double* u, const double* v, int n) noexcept {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += u[i] * v[n + i] - u[n + i] * v[i];
  return s;
}

void require_frame_dim(const IsotropicFrame& f, const HPoint& p) {
  if (f.n() != p.dim()) {
    throw std::invalid_argument("projection: frame has n=" + std::to_string(f.n()) +
                                " but point has n=" + std::to_string(p.dim()));
  }
}

// Horizontal part of p split into its V and V^perp components, both in world
// coordinates.
std::pair<Eigen::VectorXd, Eigen::VectorXd> split_horizontal(const IsotropicFrame& f,
                                                             const HPoint& p) {
  const int m = 2 * f.n();
  Eigen::Map<const Eigen::VectorXd> w(p.horizontal().data(), m);
  const auto UV = f.matrix().leftCols(f.d());
  Eigen::VectorXd pv = UV * (UV.transpose() * w);
  Eigen::VectorXd pperp = w - pv;
  return {std::move(pv), std::move(pperp)};
}

HPoint make_point(const Eigen::VectorXd& w, double z) {
  std::vector<double> c(w.data(), w.data() + w.size());
  c.push_back(z);
  return HPoint::from_coords(c);
}

}  // namespace

double sigma(std::span<const double> u, std::span<const double> v) {
  require_len(u, v);
  return sigma_unchecked(u.data(), v.data(), static_cast<int>(u.size() / 2));
}

Eigen::MatrixXd symplectic_matrix(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

IsotropicFrame::IsotropicFrame(int n, int d, Eigen::MatrixXd U) : n_(n), d_(d), U_(std::move(U)) {
  if (n < 1) throw std::invalid_argument("IsotropicFrame: n must be >= 1");
  if (d < 1 || d > n) {
    throw std::invalid_argument("IsotropicFrame: d=" + std::to_string(d) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  if (U_.rows() != 2 * n || U_.cols() != 2 * n) {
    throw std::invalid_argument("IsotropicFrame: U must be 2n x 2n");
  }
  if (!U_.allFinite()) throw std::invalid_argument("IsotropicFrame: non-finite entries");
  if (orthogonality_residual() > kFrameTol) {
    throw std::invalid_argument("IsotropicFrame: U is not orthogonal");
  }
  if (symplectic_residual() > kFrameTol) {
    throw std::invalid_argument("IsotropicFrame: U does not preserve sigma");
  }
  if (isotropy_residual() > kFrameTol) {
    throw std::invalid_argument("IsotropicFrame: first d columns are not isotropic");
  }
  Ut_.resize(static_cast<std::size_t>(4 * n * n));
  for (int r = 0; r < 2 * n; ++r) {
    for (int c = 0; c < 2 * n; ++c) Ut_[static_cast<std::size_t>(r * 2 * n + c)] = U_(c, r);
  }
}

double IsotropicFrame::orthogonality_residual() const {
  const Eigen::MatrixXd E = U_.transpose() * U_ - Eigen::MatrixXd::Identity(2 * n_, 2 * n_);
  return E.cwiseAbs().maxCoeff();
}

double IsotropicFrame::symplectic_residual() const {
  const Eigen::MatrixXd J = symplectic_matrix(n_);
  return (U_.transpose() * J * U_ - J).cwiseAbs().maxCoeff();
}

double IsotropicFrame::isotropy_residual() const {
  const Eigen::MatrixXd J = symplectic_matrix(n_);
  const auto V = U_.leftCols(d_);
  return (V.transpose() * J * V).cwiseAbs().maxCoeff();
}

IsotropicFrame canonical_frame(int n, int d) {
  if (n < 1) throw std::invalid_argument("canonical_frame: n must be >= 1");
  return IsotropicFrame(n, d, Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

Eigen::MatrixXd random_orthosymplectic(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_orthosymplectic: n must be >= 1");
  Rng rng(derive_seed(seed, 0x5AB1EULL));
  const double scale = std::sqrt(0.5);
  Eigen::MatrixXcd Z(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const double re = rng.normal() * scale;
      const double im = rng.normal() * scale;
      Z(r, c) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
  Eigen::MatrixXcd Q = qr.householderQ();
  const Eigen::MatrixXcd& R = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const std::complex<double> rii = R(i, i);
    const double mag = std::abs(rii);
    const std::complex<double> phase = mag > 0.0 ? rii / mag : std::complex<double>(1.0, 0.0);
    Q.col(i) *= phase;
  }
  Eigen::MatrixXd M(2 * n, 2 * n);
  const Eigen::MatrixXd A = Q.real();
  const Eigen::MatrixXd B = Q.imag();
  M.topLeftCorner(n, n) = A;
  M.topRightCorner(n, n) = -B;
  M.bottomLeftCorner(n, n) = B;
  M.bottomRightCorner(n, n) = A;
  return M;
}

IsotropicFrame random_isotropic_frame(int n, int d, std::uint64_t seed) {
  if (d < 1 || d > n) {
    throw std::invalid_argument("random_isotropic_frame: d=" + std::to_string(d) +
                                " outside [1, " + std::to_string(n) + "]");
  }
  return IsotropicFrame(n, d, random_orthosymplectic(n, seed));
}

HPoint apply_orthosymplectic(const Eigen::MatrixXd& M, const HPoint& p) {
  if (M.rows() != 2 * p.dim() || M.cols() != 2 * p.dim()) {
    throw std::invalid_argument("apply_orthosymplectic: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> w(p.horizontal().data(), 2 * p.dim());
  return make_point(M * w, p.z());
}

Splitting project_P(const IsotropicFrame& frame, const HPoint& p) {
  require_frame_dim(frame, p);
  auto [pv, pperp] = split_horizontal(frame, p);
  const double s = sigma_unchecked(pperp.data(), pv.data(), frame.n());
  return {make_point(pv, 0.0), make_point(pperp, p.z() - 2.0 * s)};
}

Splitting project_Q(const IsotropicFrame& frame, const HPoint& p) {
  require_frame_dim(frame, p);
  auto [pv, pperp] = split_horizontal(frame, p);
  const double s = sigma_unchecked(pperp.data(), pv.data(), frame.n());
  return {make_point(pv, 0.0), make_point(pperp, p.z() + 2.0 * s)};
}

void to_json(nlohmann::json& j, const IsotropicFrame& f) {
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(f.matrix().size()));
  for (int r = 0; r < f.matrix().rows(); ++r) {
    for (int c = 0; c < f.matrix().cols(); ++c) rows.push_back(f.matrix()(r, c));
  }
  j = nlohmann::json{{"n", f.n()}, {"d", f.d()}, {"U", rows}};
}

IsotropicFrame frame_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  if (!j.contains("U")) return canonical_frame(n, d);
  const auto rows = j.at("U").get<std::vector<double>>();
  if (n < 1 || rows.size() != static_cast<std::size_t>(4 * n * n)) {
    throw std::invalid_argument("frame JSON: U must hold (2n)^2 entries");
  }
  Eigen::MatrixXd U(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    for (int c = 0; c < 2 * n; ++c) U(r, c) = rows[static_cast<std::size_t>(r * 2 * n + c)];
  }
  return IsotropicFrame(n, d, std::move(U));
}

}  // namespace heis
