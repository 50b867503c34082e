// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "hmortar/assembly.hpp"
#include "hmortar/errors.hpp"
#include "hmortar/geometry.hpp"
#include "hmortar/harmonics.hpp"
#include "hmortar/jacobi.hpp"
#include "hmortar/spline_space.hpp"

namespace hmortar {

/// beta' at or below this value is reported as numerically zero (unstable).
inline constexpr double kStabilityThreshold = 1e-6;

// ---------------------------------------------------------------------------
// Continuous constant on the stator annulus.
//
// For mu = cos(n t) the Neumann problem -lap z = 0, z(R2) = 0, dz/dn = mu at
// R1 separates; with the H^{-1/2} weight (1+n^2)^{-1/2} the Rayleigh quotient
// <mu, z> / ||mu||^2 is
//   n = 0:  R1 ln(R2/R1)
//   n >= 1: R1 tanh(n ln(R2/R1)) sqrt(1+n^2) / n
// ---------------------------------------------------------------------------

inline double analytic_beta_squared(const AnnulusGeometry& geom, int n) {
  const double R1 = geom.r_gamma, L = std::log(geom.r_outer / geom.r_gamma);
  if (n == 0) return R1 * L;
  return R1 * std::tanh(n * L) * std::sqrt(1.0 + double(n) * n) / n;
}

struct AnalyticBeta {
  std::vector<double> per_mode;  // beta_n, n = 0..n_max
  int argmin = 0;
  double min = 0.0;
};

inline AnalyticBeta analytic_beta(const AnnulusGeometry& geom, int n_max) {
  geom.validate();
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  AnalyticBeta out;
  out.per_mode.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.per_mode[n] = std::sqrt(analytic_beta_squared(geom, n));
  out.argmin = static_cast<int>(
      std::min_element(out.per_mode.begin(), out.per_mode.end()) - out.per_mode.begin());
  out.min = out.per_mode[out.argmin];
  return out;
}

// ---------------------------------------------------------------------------
// Schur complements.
// ---------------------------------------------------------------------------

using Cholesky = Eigen::SimplicialLLT<SparseMatrix>;

inline std::unique_ptr<Cholesky> factorize(const SparseMatrix& A) {
  auto f = std::make_unique<Cholesky>(A);
  if (f->info() != Eigen::Success)
    throw NumericalError("sparse Cholesky failed: matrix not positive definite");
  return f;
}

/// S = B A^{-1} B^T for a dense B (rows = multipliers). Solves are done in
/// column blocks against one factorization.
inline Eigen::MatrixXd schur_complement(const Cholesky& chol, const Eigen::MatrixXd& B,
                                        int block = 64) {
  const int m = static_cast<int>(B.rows());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  for (int c0 = 0; c0 < m; c0 += block) {
    const int nc = std::min(block, m - c0);
    const Eigen::MatrixXd rhs = B.middleRows(c0, nc).transpose();
    const Eigen::MatrixXd X = chol.solve(rhs);
    if (chol.info() != Eigen::Success) throw NumericalError("Cholesky solve failed");
    S.middleCols(c0, nc) = B * X;
  }
  return 0.5 * (S + S.transpose());
}

/// Sparse-coupling variant; only column blocks of B^T are densified.
inline Eigen::MatrixXd schur_complement(const Cholesky& chol, const SparseMatrix& B,
                                        int block = 64) {
  const int m = static_cast<int>(B.rows());
  const SparseMatrix Bt = B.transpose();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  for (int c0 = 0; c0 < m; c0 += block) {
    const int nc = std::min(block, m - c0);
    const Eigen::MatrixXd rhs(Bt.middleCols(c0, nc));
    const Eigen::MatrixXd X = chol.solve(rhs);
    if (chol.info() != Eigen::Success) throw NumericalError("Cholesky solve failed");
    S.middleCols(c0, nc) = B * X;
  }
  return 0.5 * (S + S.transpose());
}

inline Eigen::MatrixXd schur_complement(const SparseMatrix& A, const Eigen::MatrixXd& B) {
  if (B.cols() != A.rows()) throw std::invalid_argument("schur_complement: size mismatch");
  if (B.rows() == 0 || B.isZero(0.0)) return Eigen::MatrixXd::Zero(B.rows(), B.rows());
  return schur_complement(*factorize(A), B);
}

/// T = E A^{-1} E^T restricted to the given dofs (discrete Neumann-to-trace
/// map). For B = B_trace E one has B A^{-1} B^T = B_trace T B_trace^T.
inline Eigen::MatrixXd interface_flexibility(const Cholesky& chol, int n_dofs,
                                             const std::vector<int>& dofs,
                                             int block = 64) {
  const int n = static_cast<int>(dofs.size());
  Eigen::MatrixXd T(n, n);
  for (int c0 = 0; c0 < n; c0 += block) {
    const int nc = std::min(block, n - c0);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_dofs, nc);
    for (int j = 0; j < nc; ++j) rhs(dofs[c0 + j], j) = 1.0;
    const Eigen::MatrixXd X = chol.solve(rhs);
    if (chol.info() != Eigen::Success) throw NumericalError("Cholesky solve failed");
    for (int i = 0; i < n; ++i) T.block(i, c0, 1, nc) = X.row(dofs[i]);
  }
  return 0.5 * (T + T.transpose());
}

// ---------------------------------------------------------------------------
// Generalized eigenproblem S x = lambda D x, D diagonal positive.
// ---------------------------------------------------------------------------

struct GeneralizedSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  double min = 0.0;
  double beta = 0.0;            // sqrt(max(min, 0))
};

inline GeneralizedSpectrum min_generalized_eig(const Eigen::MatrixXd& S,
                                               const Eigen::VectorXd& D) {
  if (S.rows() != S.cols() || S.rows() != D.size())
    throw std::invalid_argument("min_generalized_eig: size mismatch");
  if (!S.allFinite() || !D.allFinite())
    throw std::invalid_argument("min_generalized_eig: non-finite entries");
  if ((D.array() <= 0.0).any())
    throw std::invalid_argument("min_generalized_eig: D must be positive");
  const Eigen::VectorXd dinv = D.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd C = dinv.asDiagonal() * S * dinv.asDiagonal();
  GeneralizedSpectrum g;
  g.eigenvalues = jacobi_eigen(C).values;
  if (g.eigenvalues.size() > 0) {
    g.min = g.eigenvalues[0];
    g.beta = std::sqrt(std::max(g.min, 0.0));
  }
  return g;
}

inline GeneralizedSpectrum min_generalized_eig(const Eigen::MatrixXd& S,
                                               const SobolevGram& D) {
  return min_generalized_eig(S, D.diag);
}

// ---------------------------------------------------------------------------
// Discrete inf-sup analyzer.
// ---------------------------------------------------------------------------

enum class Scope { stator, full };

inline std::string_view to_string(Scope s) { return s == Scope::stator ? "stator" : "full"; }

struct InfSupResult {
  int level = 1;
  int degree = 1;
  int n_interface = 0;
  std::optional<double> c;
  int N = 0;
  int dim_MN = 1;
  Scope scope = Scope::stator;
  double alpha = 0.0;
  double beta_discrete = 0.0;
  Eigen::VectorXd spectrum;
  double beta_continuous = 0.0;
  double h_over_k = 0.0;
  double criterion_value = 0.0;
  bool stable = false;
};

/// Base meshes (level 1) of both rings. n_r = 0 selects the near-isotropic
/// default.
struct InfSupSetup {
  AnnulusGeometry geom;
  int n_theta_stator = 144;
  int n_theta_rotor = 128;
  int n_r_stator = 0;
  int n_r_rotor = 0;
  QuadratureOptions quad;

  PolarMesh base_mesh(Subdomain s) const {
    const int nt = s == Subdomain::stator ? n_theta_stator : n_theta_rotor;
    const int nr = s == Subdomain::stator ? n_r_stator : n_r_rotor;
    return nr > 0 ? build_mesh(geom, s, nt, nr) : build_mesh(geom, s, nt);
  }
};

/// Harmonic order from a scaling factor: N = floor(c n).
inline int harmonic_order(double c, int n_interface) {
  if (!(c >= 0.0)) throw std::invalid_argument("scaling factor must be >= 0");
  return static_cast<int>(std::floor(c * n_interface + 1e-9));
}

/// Computes discrete inf-sup constants with the gradient seminorm on the
/// field space (nu = 1). Per (level, degree, subdomain) the interface
/// flexibility T is computed once and reused for every harmonic order, so a
/// row of c values costs one set of sparse solves. Not thread-safe.
class InfSupAnalyzer {
 public:
  struct InterfaceOperator {
    SplineSpace2D space;
    Eigen::MatrixXd flexibility;
    SparseMatrix stiffness;
  };

  explicit InfSupAnalyzer(InfSupSetup setup) : setup_(std::move(setup)) {
    setup_.geom.validate();
  }

  const InfSupSetup& setup() const { return setup_; }

  PolarMesh mesh(int level, Subdomain s) const {
    return mesh_at_level(setup_.base_mesh(s), level);
  }

  int n_interface(int level) const { return mesh(level, Subdomain::stator).n_theta; }

  const InterfaceOperator& interface_operator(int level, int degree, Subdomain s) {
    const auto key = std::make_tuple(level, degree, s == Subdomain::stator ? 0 : 1);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    SplineSpace2D space(mesh(level, s), degree);
    SparseMatrix A = assemble_stiffness(space, constant_field(1.0), setup_.quad);
    const auto chol = factorize(A);
    Eigen::MatrixXd T = interface_flexibility(*chol, space.num_dofs(), space.interface_dofs());
    auto op = std::make_unique<InterfaceOperator>(
        InterfaceOperator{std::move(space), std::move(T), std::move(A)});
    return *cache_.emplace(key, std::move(op)).first->second;
  }

  /// Multiplier Schur complement B A^{-1} B^T of the chosen scope.
  Eigen::MatrixXd schur(int level, int degree, int N, Scope scope, double alpha = 0.0) {
    const HarmonicSpace H(N, setup_.geom.r_gamma);
    const auto& st = interface_operator(level, degree, Subdomain::stator);
    const Eigen::MatrixXd B1 =
        assemble_coupling(st.space.angular(), H, 1.0, setup_.quad.interface_extra);
    Eigen::MatrixXd S = B1 * st.flexibility * B1.transpose();
    if (scope == Scope::full) {
      const auto& rt = interface_operator(level, degree, Subdomain::rotor);
      const Eigen::MatrixXd B2 = rotation_blocks(N, alpha) *
                                 assemble_coupling(rt.space.angular(), H, -1.0,
                                                   setup_.quad.interface_extra);
      S += B2 * rt.flexibility * B2.transpose();
    }
    return 0.5 * (S + S.transpose());
  }

  InfSupResult compute(int level, int degree, int N, Scope scope, double alpha = 0.0) {
    const HarmonicSpace H(N, setup_.geom.r_gamma);
    const GeneralizedSpectrum g =
        min_generalized_eig(schur(level, degree, N, scope, alpha), gram(H, SobolevIndex::minus_half));
    InfSupResult r;
    r.level = level;
    r.degree = degree;
    r.n_interface = n_interface(level);
    r.N = N;
    r.dim_MN = H.dim();
    r.scope = scope;
    r.alpha = alpha;
    r.beta_discrete = g.beta;
    r.spectrum = g.eigenvalues;
    r.beta_continuous = analytic_beta(setup_.geom, N).min;
    // h in the reference coordinate xi = theta / pi of the harmonic basis.
    r.h_over_k = (2.0 / r.n_interface) / degree;
    r.criterion_value = N * r.h_over_k;
    r.stable = r.beta_discrete > kStabilityThreshold;
    return r;
  }

  InfSupResult compute_scaled(int level, int degree, double c, Scope scope, double alpha = 0.0) {
    InfSupResult r = compute(level, degree, harmonic_order(c, n_interface(level)), scope, alpha);
    r.c = c;
    return r;
  }

 private:
  InfSupSetup setup_;
  std::map<std::tuple<int, int, int>, std::unique_ptr<InterfaceOperator>> cache_;
};

/// One-shot convenience wrapper around InfSupAnalyzer.
inline InfSupResult discrete_infsup(const InfSupSetup& setup, int level, int degree, int N,
                                    Scope scope = Scope::stator) {
  InfSupAnalyzer analyzer(setup);
  return analyzer.compute(level, degree, N, scope);
}

/// One cell of a parameter sweep. `c` is informational when set; N is used.
struct SweepCell {
  int level = 1;
  int degree = 1;
  std::optional<double> c;
  int N = 0;
};

struct SweepEntry {
  SweepCell cell;
  std::optional<InfSupResult> result;
  std::string error;  // set when the cell failed
};

/// Evaluates all cells, grouped by (level, degree) so each group shares its
/// factorizations. Groups run on up to `threads` workers; the output keeps the
/// order of `cells` regardless of scheduling, and a failing cell does not stop
/// the sweep.
inline std::vector<SweepEntry> infsup_sweep(const InfSupSetup& setup,
                                            const std::vector<SweepCell>& cells,
                                            Scope scope = Scope::stator, double alpha = 0.0,
                                            int threads = 1) {
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cells.size(); ++i)
    groups[{cells[i].level, cells[i].degree}].push_back(i);
  std::vector<const std::vector<std::size_t>*> work;
  for (const auto& [key, idx] : groups) work.push_back(&idx);

  std::vector<SweepEntry> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g; (g = next.fetch_add(1)) < work.size();) {
      InfSupAnalyzer analyzer(setup);
      for (std::size_t i : *work[g]) {
        const SweepCell& cell = cells[i];
        out[i].cell = cell;
        try {
          InfSupResult r = analyzer.compute(cell.level, cell.degree, cell.N, scope, alpha);
          r.c = cell.c;
          out[i].result = std::move(r);
        } catch (const std::exception& e) {
          out[i].error = e.what();
        }
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(work.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

}  // namespace hmortar
