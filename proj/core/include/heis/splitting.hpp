#pragma once

// Symplectic structure on R^{2n}, isotropic frames and the two semidirect
// splittings of H^n along a horizontal subgroup V x {0} and its complement
// V^perp x R.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "heis/group.hpp"

namespace heis {

/// sigma(u, v) = <x,y'> - <y,x'> for u = (x,y), v = (x',y') in R^{2n}.
double sigma(std::span<const double> u, std::span<const double> v);

/// The matrix J of sigma: sigma(u, v) = u^T J v.
Eigen::MatrixXd symplectic_matrix(int n);

/// An orthosymplectic 2n x 2n matrix U; its first d columns span an isotropic
/// subspace V and the remaining columns span V^perp.
class IsotropicFrame {
 public:
  /// Validates orthogonality, sigma-preservation and isotropy to 1e-10.
  IsotropicFrame(int n, int d, Eigen::MatrixXd U);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  const Eigen::MatrixXd& matrix() const noexcept { return U_; }

  /// Row-major copy of U^T, the map from world horizontal coordinates to
  /// frame coordinates.
  std::span<const double> transpose_row_major() const noexcept { return Ut_; }

  /// max |U^T U - I|.
  double orthogonality_residual() const;
  /// max |U^T J U - J|.
  double symplectic_residual() const;
  /// max |sigma(col_i, col_j)| over i, j < d.
  double isotropy_residual() const;

 private:
  int n_;
  int d_;
  Eigen::MatrixXd U_;
  std::vector<double> Ut_;
};

IsotropicFrame canonical_frame(int n, int d);

/// Haar-distributed element of the orthosymplectic group, realised as the
/// real form [[A, -B], [B, A]] of a Haar unitary A + iB.
Eigen::MatrixXd random_orthosymplectic(int n, std::uint64_t seed);

IsotropicFrame random_isotropic_frame(int n, int d, std::uint64_t seed);

/// The automorphism (w, z) -> (M w, z) of H^n induced by an orthosymplectic M.
HPoint apply_orthosymplectic(const Eigen::MatrixXd& M, const HPoint& p);

struct Splitting {
  HPoint h;  // component in V x {0}
  HPoint v;  // component in V^perp x R
};

/// p = v * h.
Splitting project_P(const IsotropicFrame& frame, const HPoint& p);
/// p = h * v.
Splitting project_Q(const IsotropicFrame& frame, const HPoint& p);

void to_json(nlohmann::json& j, const IsotropicFrame& f);
IsotropicFrame frame_from_json(const nlohmann::json& j);

}  // namespace heis
