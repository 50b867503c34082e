// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "hmortar/manufactured.hpp"
#include "hmortar/saddle.hpp"
#include "oracles.hpp"

using namespace hmortar;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rig {
  AnnulusGeometry geom;
  SplineSpace2D stator;
  SplineSpace2D rotor;
  HarmonicSpace H;

  Rig(int ns, int nr, int k, int N)
      : stator(build_mesh(geom, Subdomain::stator, ns), k),
        rotor(build_mesh(geom, Subdomain::rotor, nr), k),
        H(N, geom.r_gamma) {}
};

SourceSpec stator_coil() {
  SourceSpec s;
  s.js = sector_field({{Sector{Subdomain::stator, 0.05, 0.06, 0.2, 0.9}, 1.0e6},
                       {Sector{Subdomain::stator, 0.05, 0.06, 3.3, 4.0}, -1.0e6}});
  return s;
}

SourceSpec mixed_source() {
  SourceSpec s = stator_coil();
  s.m = magnet_field({{Sector{Subdomain::rotor, 0.03, 0.04, 0.0, 1.0}, 1.0e5, 2.0e4},
                      {Sector{Subdomain::rotor, 0.03, 0.04, 3.0, 4.2}, -1.0e5, 0.0}});
  s.nu = per_subdomain_field(1.0, 2.5);
  s.nu_lo = 1.0;
  s.nu_hi = 2.5;
  return s;
}

}  // namespace

TEST(Saddle, DimensionsAndBlockLayout) {
  Rig r(16, 12, 2, 4);
  const SaddleSystem s = assemble_system(r.stator, r.rotor, r.H, zero_source());
  EXPECT_EQ(s.field_dofs(), r.stator.num_dofs() + r.rotor.num_dofs());
  EXPECT_EQ(s.dimension(), s.field_dofs() + 9);
  EXPECT_EQ(s.B.rows(), 9);
  EXPECT_EQ(s.B.cols(), s.field_dofs());
  EXPECT_EQ(s.A.rows(), s.field_dofs());
  const Eigen::MatrixXd K = s.dense_system();
  EXPECT_EQ(K.rows(), s.dimension());
  EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-15 * K.cwiseAbs().maxCoeff());
  EXPECT_TRUE(K.bottomRightCorner(9, 9).isZero(0.0));
}

TEST(Saddle, ZeroSourceGivesZeroSolution) {
  Rig r(16, 12, 1, 3);
  const SolveResult res = solve(assemble_system(r.stator, r.rotor, r.H, zero_source()));
  EXPECT_EQ(res.u().norm(), 0.0);
  EXPECT_EQ(res.lambda.norm(), 0.0);
  EXPECT_EQ(res.energy, 0.0);
}

TEST(Saddle, MatchesDenseKktSolve) {
  Rig r(12, 10, 2, 3);
  const SaddleSystem s = assemble_system(r.stator, r.rotor, r.H, mixed_source(), 0.4);
  const SolveResult res = solve(s);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s.dimension());
  rhs.head(s.field_dofs()) = s.rhs;
  const Eigen::VectorXd x = s.dense_system().fullPivLu().solve(rhs);
  const double scale = x.cwiseAbs().maxCoeff();
  EXPECT_LT((x.head(s.field_dofs()) - res.u()).cwiseAbs().maxCoeff(), 1e-9 * scale);
  EXPECT_LT((x.tail(s.harmonics.dim()) - res.lambda).cwiseAbs().maxCoeff(), 1e-9 * scale);
  EXPECT_LT(res.field_residual, 1e-12);
}

TEST(Saddle, MortarConstraintAndEnergyIdentity) {
  for (int k : {1, 2, 3}) {
    Rig r(24, 20, k, 6);
    const SolveResult res =
        solve(assemble_system(r.stator, r.rotor, r.H, mixed_source(), 0.25));
    EXPECT_LE(res.jump_moments.cwiseAbs().maxCoeff(), 1e-10 * res.h1_norm) << k;
    // With B u = 0 the multiplier term drops out: (A u, u) = (f, u).
    EXPECT_NEAR(res.energy, res.load_pairing, 1e-10 * res.energy) << k;
    EXPECT_GT(res.energy, 0.0);
  }
}

TEST(Saddle, SolutionIsInvariantUnderDofPermutation) {
  Rig r(12, 10, 2, 3);
  const SaddleSystem s = assemble_system(r.stator, r.rotor, r.H, mixed_source());
  const int n = s.field_dofs();
  Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(n, 0, n - 1);
  std::shuffle(idx.data(), idx.data() + n, std::mt19937(17));
  const Eigen::PermutationMatrix<Eigen::Dynamic> P(idx);
  const SparseMatrix Ap = (P * s.A * P.transpose()).eval();
  const SparseMatrix Bp = (s.B * P.transpose()).eval();
  const Eigen::VectorXd fp = P * s.rhs;
  const SaddleSolution ref = SaddleSolver(s.A).solve(s.B, s.rhs);
  const SaddleSolution perm = SaddleSolver(Ap).solve(Bp, fp);
  const double scale = ref.u.cwiseAbs().maxCoeff();
  EXPECT_LT((P.transpose() * perm.u - ref.u).cwiseAbs().maxCoeff(), 1e-10 * scale);
  EXPECT_LT((perm.lambda - ref.lambda).cwiseAbs().maxCoeff(),
            1e-10 * ref.lambda.cwiseAbs().maxCoeff());
}

TEST(Saddle, RotationByRotorMeshStepShiftsRotorCoefficients) {
  // A stator-only source; turning the rotor by j rotor cells re-labels the
  // rotor basis, so lambda is unchanged and rotor coefficients shift by j.
  const int nr = 20, j = 3;
  Rig r(24, nr, 2, 5);
  const SaddleSystem s0 = assemble_system(r.stator, r.rotor, r.H, stator_coil(), 0.0);
  const SolveResult a = solve(s0);
  SaddleSystem s1 = s0;
  set_rotation(s1, j * kTwoPi / nr);
  const SolveResult b = solve(s1);
  const double lscale = a.lambda.cwiseAbs().maxCoeff();
  EXPECT_LT((a.lambda - b.lambda).cwiseAbs().maxCoeff(), 1e-9 * lscale);
  EXPECT_LT((a.u_stator - b.u_stator).cwiseAbs().maxCoeff(), 1e-9 * a.u_stator.cwiseAbs().maxCoeff());
  const int na = r.rotor.angular().size();
  double diff = 0.0;
  for (int d = 0; d < r.rotor.num_dofs(); ++d) {
    const int layer = d / na, ia = d % na;
    const int src = layer * na + ((ia - j) % na + na) % na;
    diff = std::max(diff, std::abs(b.u_rotor[d] - a.u_rotor[src]));
  }
  EXPECT_LT(diff, 1e-9 * a.u_rotor.cwiseAbs().maxCoeff());
}

TEST(Saddle, RotationSweepMatchesIndividualSolves) {
  Rig r(16, 12, 1, 4);
  const SaddleSystem s = assemble_system(r.stator, r.rotor, r.H, mixed_source());
  const std::vector<double> angles{0.0, 0.3, 1.7};
  const auto sweep = sweep_rotation(s, angles);
  ASSERT_EQ(sweep.size(), 3u);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    SaddleSystem si = s;
    set_rotation(si, angles[i]);
    const SolveResult ri = solve(si);
    EXPECT_EQ(sweep[i].alpha, angles[i]);
    EXPECT_LT((sweep[i].u() - ri.u()).cwiseAbs().maxCoeff(), 1e-12 * ri.u().cwiseAbs().maxCoeff());
  }
}

TEST(Saddle, TooRichMultiplierSpaceIsRejected) {
  // Equal even meshes: the Nyquist row vanishes on both sides.
  Rig r(8, 8, 1, 4);
  const SaddleSystem s = assemble_system(r.stator, r.rotor, r.H, stator_coil());
  EXPECT_THROW(solve(s), InfSupViolation);
}

TEST(Saddle, InputValidation) {
  Rig r(8, 8, 1, 2);
  EXPECT_THROW(assemble_system(r.rotor, r.stator, r.H, zero_source()), std::invalid_argument);
  EXPECT_THROW(assemble_system(r.stator, r.rotor, HarmonicSpace(2, 0.05), zero_source()),
               std::invalid_argument);
  EXPECT_THROW(assemble_system(r.stator, r.rotor, r.H, zero_source(), NAN), std::invalid_argument);
  SourceSpec bad;
  bad.nu_lo = 0.0;
  EXPECT_THROW(assemble_system(r.stator, r.rotor, r.H, bad), std::invalid_argument);
}

// --- manufactured solution ----------------------------------------------------

TEST(Manufactured, SourceIsNegativeLaplacian) {
  const ManufacturedSolution ms{AnnulusGeometry{}, 3};
  const double h = 1e-4;
  for (double r : {0.025, 0.0447, 0.06})
    for (double t : {0.1, 1.0, 2.5}) {
      const double urr = (ms.value(r + h, t) - 2 * ms.value(r, t) + ms.value(r - h, t)) / (h * h);
      const double ur = (ms.value(r + h, t) - ms.value(r - h, t)) / (2 * h);
      const double utt = (ms.value(r, t + h) - 2 * ms.value(r, t) + ms.value(r, t - h)) / (h * h);
      const double lap = urr + ur / r + utt / (r * r);
      EXPECT_NEAR(ms.source(r, t), -lap, 1e-4 * std::abs(lap) + 1e-2);
    }
  EXPECT_NEAR(ms.value(0.02, 0.3), 0.0, 1e-15);
  EXPECT_NEAR(ms.value(0.0675, 0.3), 0.0, 1e-15);
}

TEST(Manufactured, RatesMatchDegreeOnShortStudy) {
  for (int k : {1, 2}) {
    ConvergenceSetup cs;
    cs.degree = k;
    cs.levels = 3;
    const auto rows = convergence_study(cs);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(std::isnan(rows[0].rate));
    EXPECT_NEAR(rows.back().rate, k, 0.35) << k;
    for (const auto& row : rows) EXPECT_LT(row.max_jump, 1e-10 * row.h1_norm);
    EXPECT_LT(rows.back().lambda_error, rows.front().lambda_error);
  }
}
