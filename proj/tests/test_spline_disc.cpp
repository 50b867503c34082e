// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "hmortar/assembly.hpp"
#include "hmortar/bspline.hpp"
#include "hmortar/quadrature.hpp"
#include "hmortar/spline_space.hpp"
#include "oracles.hpp"

using namespace hmortar;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> uniform_breaks(double a, double b, int n) {
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * i / n;
  x.back() = b;
  return x;
}

// Full-length value of every basis function at x.
std::vector<double> all_values(const SplineSpace1D& s, double x) {
  std::vector<double> v(s.size(), 0.0);
  const BasisEval e = s.eval(x);
  for (int j = 0; j <= s.degree(); ++j) v[s.global_index(e.span, j)] += e.values[j];
  return v;
}

}  // namespace

// --- quadrature -------------------------------------------------------------

TEST(Quadrature, GaussLegendreIsExactToDegreeTwoQMinusOne) {
  for (int q = 1; q <= 20; ++q) {
    const GaussRule& rule = gauss_legendre(q);
    ASSERT_EQ(rule.size(), q);
    for (int d = 0; d <= 2 * q - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < q; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "q=" << q << " d=" << d;
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

// --- 1D B-splines -------------------------------------------------------------

TEST(BSpline, OpenBasisMatchesRecursiveDefinition) {
  const std::vector<double> breaks{0.0, 0.1, 0.25, 0.3, 0.6, 0.75, 1.0};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int p = 1; p <= 5; ++p) {
    const SplineSpace1D s(p, breaks, false);
    const auto t = oracle::clamped_knots(breaks, p);
    ASSERT_EQ(s.size(), static_cast<int>(breaks.size()) - 1 + p);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = trial == 0 ? 1.0 : U(rng);
      const auto v = all_values(s, x);
      for (int i = 0; i < s.size(); ++i)
        EXPECT_NEAR(v[i], oracle::bspline(t, i, p, x), 1e-13) << "p=" << p << " x=" << x;
    }
  }
}

TEST(BSpline, PeriodicBasisMatchesWrappedCardinalSplines) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 8.0);
  for (int p = 1; p <= 5; ++p) {
    const int n = p + 3;
    const SplineSpace1D s(p, uniform_breaks(0.0, kTwoPi, n), true);
    ASSERT_EQ(s.size(), n);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = U(rng);
      const auto v = all_values(s, x);
      for (int i = 0; i < n; ++i)
        EXPECT_NEAR(v[i], oracle::periodic_bspline(n, kTwoPi, p, i, x), 1e-12)
            << "p=" << p << " i=" << i << " x=" << x;
    }
  }
}

TEST(BSpline, PartitionOfUnityAtRandomPoints) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  for (int p = 1; p <= 5; ++p)
    for (bool periodic : {true, false}) {
      const SplineSpace1D s(p, uniform_breaks(0.0, kTwoPi, 13), periodic);
      for (int i = 0; i < 1000; ++i) {
        const BasisEval e = s.eval(U(rng));
        double sum = 0.0, dsum = 0.0;
        for (int j = 0; j <= p; ++j) {
          EXPECT_GE(e.values[j], -1e-15);
          sum += e.values[j];
          dsum += e.derivs[j];
        }
        EXPECT_NEAR(sum, 1.0, 1e-13);
        EXPECT_NEAR(dsum, 0.0, 1e-10);
      }
    }
}

TEST(BSpline, QuadraticMidpointValues) {
  const SplineSpace1D s(2, uniform_breaks(0.0, 1.0, 8), true);
  const BasisEval e = s.eval(0.5 / 8);
  EXPECT_NEAR(e.values[0], 0.125, 1e-15);
  EXPECT_NEAR(e.values[1], 0.75, 1e-15);
  EXPECT_NEAR(e.values[2], 0.125, 1e-15);
}

TEST(BSpline, DerivativesMatchFiniteDifferences) {
  const SplineSpace1D s(3, {0.0, 0.2, 0.5, 0.7, 0.9, 1.3, 1.6}, true);
  const double h = 1e-6;
  for (double x : {0.05, 0.33, 0.71, 1.2, 1.55}) {
    const auto vp = all_values(s, x + h), vm = all_values(s, x - h);
    const BasisEval e = s.eval(x);
    for (int j = 0; j <= 3; ++j) {
      const int g = s.global_index(e.span, j);
      EXPECT_NEAR(e.derivs[j], (vp[g] - vm[g]) / (2 * h), 1e-6);
    }
  }
}

TEST(BSpline, SpanLookupAndValidation) {
  const SplineSpace1D open(2, uniform_breaks(0.0, 1.0, 4), false);
  EXPECT_EQ(open.find_span(0.0), 0);
  EXPECT_EQ(open.find_span(1.0), 3);
  EXPECT_THROW(open.find_span(1.5), std::out_of_range);
  const SplineSpace1D per(2, uniform_breaks(0.0, 1.0, 4), true);
  EXPECT_EQ(per.find_span(1.0), 0);
  EXPECT_EQ(per.find_span(-0.1), 3);
  EXPECT_THROW(SplineSpace1D(3, uniform_breaks(0.0, 1.0, 3), true), std::invalid_argument);
  EXPECT_THROW(SplineSpace1D(0, uniform_breaks(0.0, 1.0, 3), true), std::invalid_argument);
  EXPECT_THROW(SplineSpace1D(1, {0.0, 0.5, 0.5, 1.0}, false), std::invalid_argument);
}

// --- tensor spaces --------------------------------------------------------------

TEST(SplineSpace2D, DofCountsAndInterfaceLayer) {
  const AnnulusGeometry g;
  for (int k = 1; k <= 5; ++k)
    for (Subdomain sub : {Subdomain::stator, Subdomain::rotor}) {
      const SplineSpace2D s(build_mesh(g, sub, 24, 4), k);
      EXPECT_EQ(s.num_interface(), 24);
      EXPECT_EQ(s.num_full(), 24 * (4 + k));
      EXPECT_EQ(s.num_dofs(), 24 * (4 + k - 1));
      EXPECT_EQ(static_cast<int>(s.interface_dofs().size()), 24);
      for (int d : s.interface_dofs()) EXPECT_EQ(s.radial_layer_of_dof(d), s.interface_layer());
      EXPECT_EQ(s.dof(0, s.dirichlet_layer()), -1);
      EXPECT_EQ(trace_space(s).size(), 24);
    }
}

// --- assembly -------------------------------------------------------------------

TEST(Stiffness, SymmetricPositiveDefiniteWithConstantKernel) {
  const AnnulusGeometry g;
  for (int k = 1; k <= 3; ++k)
    for (Subdomain sub : {Subdomain::stator, Subdomain::rotor}) {
      const SplineSpace2D s(build_mesh(g, sub, 10, 3), k);
      const Eigen::MatrixXd A(assemble_stiffness(s, constant_field(1.0)));
      EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-14 * A.cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);

      const Eigen::MatrixXd Afull(
          assemble_stiffness(s, constant_field(1.0), {}, DofSelection::all));
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.num_full());
      EXPECT_LT((Afull * ones).cwiseAbs().maxCoeff(), 1e-13 * Afull.cwiseAbs().maxCoeff());
    }
}

TEST(Stiffness, QuadratureDoublingIsInvariant) {
  const AnnulusGeometry g;
  for (int k = 1; k <= 4; ++k) {
    const SplineSpace2D s(build_mesh(g, Subdomain::stator, 9, 2), k);
    const QuadratureOptions q;
    const Eigen::MatrixXd A1(assemble_stiffness(s, constant_field(1.0), q));
    const Eigen::MatrixXd A2(assemble_stiffness(s, constant_field(1.0), q.doubled(k)));
    EXPECT_LT((A1 - A2).cwiseAbs().maxCoeff() / A1.cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST(Stiffness, ScalesLinearlyWithReluctivity) {
  const SplineSpace2D s(build_mesh(AnnulusGeometry{}, Subdomain::rotor, 8, 2), 2);
  const Eigen::MatrixXd A1(assemble_stiffness(s, constant_field(1.0)));
  const Eigen::MatrixXd A7(assemble_stiffness(s, constant_field(7.0)));
  EXPECT_LT((7.0 * A1 - A7).cwiseAbs().maxCoeff(), 1e-12 * A7.cwiseAbs().maxCoeff());
  EXPECT_THROW(assemble_stiffness(s, constant_field(NAN)), AssemblyError);
}

TEST(Stiffness, LogarithmInterpolantEnergy) {
  // |grad ln r|^2 integrated over the stator ring is 2 pi ln(R2/R1).
  const AnnulusGeometry g;
  const SplineSpace2D s(build_mesh(g, Subdomain::stator, 8, 120), 1);
  const SparseMatrix A = assemble_stiffness(s, constant_field(1.0), {}, DofSelection::all);
  const auto rb = s.mesh().r_breaks();
  Eigen::VectorXd c(s.num_full());
  for (int ir = 0; ir < s.radial().size(); ++ir)
    for (int ia = 0; ia < s.angular().size(); ++ia) c[s.full_index(ia, ir)] = std::log(rb[ir]);
  const double exact = kTwoPi * std::log(g.r_outer / g.r_gamma);
  EXPECT_NEAR(exact, 2.58964, 1e-5);
  EXPECT_NEAR(c.dot(A * c), exact, 1e-4);
}

TEST(Rhs, UnitCurrentIntegratesBasisFunctions) {
  // sum over free dofs = |ring| - integral of the eliminated layer, which for
  // k = 1 is the outermost hat times 2 pi r.
  const AnnulusGeometry g;
  const SplineSpace2D s(build_mesh(g, Subdomain::stator, 12, 5), 1);
  SourceSpec src;
  src.js = constant_field(1.0);
  const double total = assemble_rhs(s, src).sum();
  const double a = g.r_outer - s.mesh().dr(), h = s.mesh().dr();
  const double layer = kTwoPi * oracle::simpson([&](double r) { return (r - a) / h * r; },
                                                a, g.r_outer, 200);
  EXPECT_NEAR(total, g.area(Subdomain::stator) - layer, 1e-15);
}

TEST(Rhs, UniformMagnetizationLoadsOnlyBoundaryFunctions) {
  // div m^perp = 0 for constant m; only functions touching the interface
  // (where m . t jumps) receive load.
  const AnnulusGeometry g;
  const SplineSpace2D s(build_mesh(g, Subdomain::rotor, 16, 4), 2);
  SourceSpec src;
  src.m = [](Subdomain, double, double) { return Vec2{0.3, -1.1}; };
  const Eigen::VectorXd f = assemble_rhs(s, src);
  double boundary = 0.0;
  for (int d = 0; d < s.num_dofs(); ++d) {
    if (s.radial_layer_of_dof(d) == s.interface_layer())
      boundary = std::max(boundary, std::abs(f[d]));
    else
      EXPECT_NEAR(f[d], 0.0, 1e-15) << d;
  }
  EXPECT_GT(boundary, 1e-6);
}

TEST(Rhs, EmptySourceGivesZeroVector) {
  const SplineSpace2D s(build_mesh(AnnulusGeometry{}, Subdomain::stator, 8, 2), 1);
  EXPECT_EQ(assemble_rhs(s, zero_source()).norm(), 0.0);
}

TEST(Trace, SelectionPicksInterfaceLayer) {
  const SplineSpace2D s(build_mesh(AnnulusGeometry{}, Subdomain::stator, 10, 3), 2);
  const SparseMatrix E = trace_matrix(s);
  EXPECT_EQ(E.rows(), 10);
  EXPECT_EQ(E.cols(), s.num_dofs());
  EXPECT_EQ(E.nonZeros(), 10);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(s.num_dofs(), 0.0, 1.0);
  const Eigen::VectorXd tr = E * u;
  for (int i = 0; i < 10; ++i) EXPECT_EQ(tr[i], u[s.interface_dofs()[i]]);
  // Interface values of u_h equal the trace spline with the same coefficients.
  const double theta = 0.37;
  const BasisEval e = s.angular().eval(theta);
  double v = 0.0;
  for (int j = 0; j <= 2; ++j) v += tr[s.angular().global_index(e.span, j)] * e.values[j];
  EXPECT_NEAR(evaluate(s, u, s.interface_radius(), theta).value, v, 1e-14);
}

TEST(Trace, L2ProjectionIsOrthogonalAndIdempotent) {
  const AnnulusGeometry g;
  for (int k = 1; k <= 3; ++k) {
    const SplineSpace1D tr(k, uniform_breaks(0.0, kTwoPi, 20), true);
    auto g8 = [](double t) { return std::cos(8 * t) + 0.3 * std::sin(3 * t); };
    const Eigen::VectorXd c = l2_project_trace(tr, g.r_gamma, g8, 8.0);
    // Residual orthogonal to every basis function: M c = <g, phi>.
    const Eigen::VectorXd b = trace_load(tr, g.r_gamma, g8, k + 12, 8);
    EXPECT_LT((trace_mass(tr, g.r_gamma) * c - b).cwiseAbs().maxCoeff(), 1e-14);
    // Projecting a spline returns it.
    auto spline = [&](double t) {
      const BasisEval e = tr.eval(t);
      double v = 0.0;
      for (int j = 0; j <= k; ++j) v += c[tr.global_index(e.span, j)] * e.values[j];
      return v;
    };
    const Eigen::VectorXd c2 = l2_project_trace(tr, g.r_gamma, spline);
    EXPECT_LT((c2 - c).cwiseAbs().maxCoeff(), 1e-12);
  }
}
