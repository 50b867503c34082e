// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <memory>
#include <vector>

#include "hmortar/assembly.hpp"
#include "hmortar/errors.hpp"
#include "hmortar/harmonics.hpp"
#include "hmortar/infsup.hpp"
#include "hmortar/jacobi.hpp"
#include "hmortar/spline_space.hpp"

namespace hmortar {

/// Rank threshold on eig(S): min < kRankTolerance * max flags a singular
/// multiplier Schur complement.
inline constexpr double kRankTolerance = 1e-12;

/// Mortar saddle-point system
///   [ A  B^T ] [u     ]   [f]
///   [ B  0   ] [lambda] = [0]
/// with A = diag(A_stator, A_rotor) and B = [B1 E1 | -R(alpha) B2 E2].
/// Stator dofs come first.
struct SaddleSystem {
  SplineSpace2D stator;
  SplineSpace2D rotor;
  HarmonicSpace harmonics;
  SparseMatrix A;
  Eigen::MatrixXd B1;  // (2N+1) x n_stator_trace
  Eigen::MatrixXd B2;  // (2N+1) x n_rotor_trace, unsigned, unrotated
  SparseMatrix B;
  Eigen::VectorXd rhs;
  double alpha = 0.0;

  int stator_dofs() const { return stator.num_dofs(); }
  int rotor_dofs() const { return rotor.num_dofs(); }
  int field_dofs() const { return stator_dofs() + rotor_dofs(); }
  int dimension() const { return field_dofs() + harmonics.dim(); }

  Eigen::MatrixXd dense_system() const {
    const int n = field_dofs(), m = harmonics.dim();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = Eigen::MatrixXd(A);
    const Eigen::MatrixXd Bd(B);
    K.bottomLeftCorner(m, n) = Bd;
    K.topRightCorner(n, m) = Bd.transpose();
    return K;
  }
};

namespace detail {

inline SparseMatrix build_coupling(const SaddleSystem& s) {
  const Eigen::MatrixXd B2r = -(rotation_blocks(s.harmonics.order(), s.alpha) * s.B2);
  std::vector<Triplet> trips;
  const int m = s.harmonics.dim();
  trips.reserve(static_cast<std::size_t>(m) * (s.B1.cols() + B2r.cols()));
  const auto& d1 = s.stator.interface_dofs();
  const auto& d2 = s.rotor.interface_dofs();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < s.B1.cols(); ++j) trips.emplace_back(i, d1[j], s.B1(i, j));
    for (int j = 0; j < B2r.cols(); ++j)
      trips.emplace_back(i, s.stator_dofs() + d2[j], B2r(i, j));
  }
  SparseMatrix B(m, s.field_dofs());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

inline SparseMatrix block_diagonal(const SparseMatrix& A1, const SparseMatrix& A2) {
  std::vector<Triplet> trips;
  trips.reserve(A1.nonZeros() + A2.nonZeros());
  for (int k = 0; k < A1.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A1, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  const int off = static_cast<int>(A1.rows());
  for (int k = 0; k < A2.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A2, k); it; ++it)
      trips.emplace_back(off + it.row(), off + it.col(), it.value());
  SparseMatrix A(A1.rows() + A2.rows(), A1.cols() + A2.cols());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

}  // namespace detail

inline SaddleSystem assemble_system(const SplineSpace2D& stator, const SplineSpace2D& rotor,
                                    const HarmonicSpace& harmonics, const SourceSpec& src,
                                    double alpha = 0.0, const QuadratureOptions& quad = {}) {
  if (stator.subdomain() != Subdomain::stator || rotor.subdomain() != Subdomain::rotor)
    throw std::invalid_argument("assemble_system: expected a stator and a rotor space");
  const double rg = harmonics.r_gamma();
  const double tol = 1e-12 * rg;
  if (std::abs(stator.interface_radius() - rg) > tol ||
      std::abs(rotor.interface_radius() - rg) > tol)
    throw std::invalid_argument("assemble_system: inconsistent interface radii");
  if (!std::isfinite(alpha)) throw std::invalid_argument("rotor angle must be finite");
  src.validate();

  SaddleSystem s{stator, rotor, harmonics, {}, {}, {}, {}, {}, alpha};
  s.A = detail::block_diagonal(assemble_stiffness(stator, src.nu, quad),
                               assemble_stiffness(rotor, src.nu, quad));
  s.B1 = assemble_coupling(stator.angular(), harmonics, 1.0, quad.interface_extra);
  s.B2 = assemble_coupling(rotor.angular(), harmonics, 1.0, quad.interface_extra);
  s.B = detail::build_coupling(s);
  s.rhs.resize(s.field_dofs());
  s.rhs << assemble_rhs(stator, src, quad), assemble_rhs(rotor, src, quad);
  return s;
}

/// Re-targets the rotor angle; only the coupling rows change.
inline void set_rotation(SaddleSystem& s, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("rotor angle must be finite");
  s.alpha = alpha;
  s.B = detail::build_coupling(s);
}

/// Raw solution of a saddle system with generic blocks.
struct SaddleSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  Eigen::VectorXd schur_spectrum;  // eigenvalues of B A^{-1} B^T, ascending
};

/// Schur-complement solver: factor A once, then per coupling matrix
/// S = B A^{-1} B^T, S lambda = B A^{-1} f, u = A^{-1} (f - B^T lambda).
class SaddleSolver {
 public:
  explicit SaddleSolver(const SparseMatrix& A) : chol_(factorize(A)) {}

  SaddleSolution solve(const SparseMatrix& B, const Eigen::VectorXd& f) const {
    const Eigen::MatrixXd S = schur_complement(*chol_, B);
    const Eigen::VectorXd eig = jacobi_eigen(S).values;
    const double lo = eig.size() ? eig[0] : 0.0, hi = eig.size() ? eig[eig.size() - 1] : 0.0;
    if (eig.size() && !(hi > 0.0 && lo > kRankTolerance * hi)) throw InfSupViolation(lo, hi);

    SaddleSolution out;
    out.schur_spectrum = eig;
    const Eigen::VectorXd Af = chol_->solve(f);
    if (eig.size()) {
      const Eigen::VectorXd g = B * Af;
      const auto ldlt = S.ldlt();
      out.lambda = ldlt.solve(g);
      out.lambda += ldlt.solve(g - S * out.lambda);
      out.u = chol_->solve(f - B.transpose() * out.lambda);
    } else {
      out.lambda.resize(0);
      out.u = Af;
    }
    return out;
  }

 private:
  std::unique_ptr<Cholesky> chol_;
};

struct SolveResult {
  Eigen::VectorXd u_stator;
  Eigen::VectorXd u_rotor;
  Eigen::VectorXd lambda;
  Eigen::VectorXd jump_moments;   // B u = <[u_h], psi_m>
  double field_residual = 0.0;    // ||A u + B^T lambda - f|| / ||f||
  double constraint_residual = 0.0;
  double energy = 0.0;            // (nu grad u, grad u)
  double load_pairing = 0.0;      // <j, u>
  double h1_norm = 0.0;           // sqrt(energy)
  double alpha = 0.0;
  Eigen::VectorXd schur_spectrum;

  Eigen::VectorXd u() const {
    Eigen::VectorXd all(u_stator.size() + u_rotor.size());
    all << u_stator, u_rotor;
    return all;
  }
};

namespace detail {

inline SolveResult finish(const SaddleSystem& s, SaddleSolution sol) {
  SolveResult r;
  r.alpha = s.alpha;
  r.u_stator = sol.u.head(s.stator_dofs());
  r.u_rotor = sol.u.tail(s.rotor_dofs());
  r.lambda = sol.lambda;
  r.jump_moments = s.B * sol.u;
  const Eigen::VectorXd Au = s.A * sol.u;
  const Eigen::VectorXd res = Au + s.B.transpose() * sol.lambda - s.rhs;
  const double fn = s.rhs.norm();
  r.field_residual = fn > 0.0 ? res.norm() / fn : res.norm();
  r.constraint_residual = r.jump_moments.norm();
  r.energy = sol.u.dot(Au);
  r.load_pairing = s.rhs.dot(sol.u);
  r.h1_norm = std::sqrt(std::max(r.energy, 0.0));
  r.schur_spectrum = std::move(sol.schur_spectrum);
  return r;
}

}  // namespace detail

/// Throws InfSupViolation when the multiplier space is too rich.
inline SolveResult solve(const SaddleSystem& s) {
  SaddleSolver solver(s.A);
  return detail::finish(s, solver.solve(s.B, s.rhs));
}

/// Solves for each rotor angle with a single factorization of A. Rotor
/// sources move with the rotor, so only the coupling is rebuilt.
inline std::vector<SolveResult> sweep_rotation(const SaddleSystem& templ,
                                               const std::vector<double>& angles) {
  SaddleSolver solver(templ.A);
  SaddleSystem s = templ;
  std::vector<SolveResult> out;
  out.reserve(angles.size());
  for (double a : angles) {
    set_rotation(s, a);
    out.push_back(detail::finish(s, solver.solve(s.B, s.rhs)));
  }
  return out;
}

}  // namespace hmortar
