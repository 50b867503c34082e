// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hmortar/assembly.hpp"
#include "hmortar/geometry.hpp"
#include "hmortar/saddle.hpp"
#include "hmortar/source.hpp"

namespace hmortar {

/// u*(r, t) = sin(pi (r - r_shaft) / (r_outer - r_shaft)) cos(m t) on both
/// rings, nu = 1. It vanishes on both Dirichlet circles, is smooth across the
/// interface, and its flux there is lambda = du*/dr (normal pointing from the
/// rotor into the stator).
struct ManufacturedSolution {
  AnnulusGeometry geom;
  int mode = 3;

  double k() const { return std::numbers::pi / (geom.r_outer - geom.r_shaft); }
  double radial(double r) const { return std::sin(k() * (r - geom.r_shaft)); }
  double radial_d1(double r) const { return k() * std::cos(k() * (r - geom.r_shaft)); }
  double radial_d2(double r) const { return -k() * k() * radial(r); }

  double value(double r, double theta) const { return radial(r) * std::cos(mode * theta); }

  /// (du/dr, du/dtheta).
  std::pair<double, double> gradient(double r, double theta) const {
    return {radial_d1(r) * std::cos(mode * theta),
            -mode * radial(r) * std::sin(mode * theta)};
  }

  /// -lap u* = -(f'' + f'/r - m^2 f / r^2) cos(m t).
  double source(double r, double theta) const {
    const double m2 = double(mode) * mode;
    return -(radial_d2(r) + radial_d1(r) / r - m2 * radial(r) / (r * r)) *
           std::cos(mode * theta);
  }

  /// Coefficient of cos(m t) in lambda = du*/dr at r_gamma.
  double flux_coefficient() const { return radial_d1(geom.r_gamma); }

  SourceSpec source_spec() const {
    SourceSpec s;
    const ManufacturedSolution self = *this;
    s.js = [self](Subdomain, double r, double t) { return self.source(r, t); };
    return s;
  }

  PolarGradient exact_gradient() const {
    const ManufacturedSolution self = *this;
    return [self](double r, double t) { return self.gradient(r, t); };
  }
};

struct ConvergenceRow {
  int level = 1;
  int n_theta_stator = 0;
  int n_theta_rotor = 0;
  double h = 0.0;            // interface arc length per stator span
  double h1_error = 0.0;     // broken H1 seminorm error over both rings
  double rate = std::numeric_limits<double>::quiet_NaN();
  double lambda_coefficient = 0.0;
  double lambda_error = 0.0; // relative error of the cos(m t) multiplier coefficient
  double max_jump = 0.0;
  double h1_norm = 0.0;
};

struct ConvergenceSetup {
  AnnulusGeometry geom;
  int degree = 1;
  int n_theta_stator = 16;
  int n_theta_rotor = 12;
  int n_r_stator = 0;
  int n_r_rotor = 0;
  int levels = 4;
  int harmonic_order = 4;
  double alpha = 0.0;
  QuadratureOptions quad;
};

/// Solves the manufactured problem on successive uniform refinements.
inline std::vector<ConvergenceRow> convergence_study(const ConvergenceSetup& cs,
                                                     int mode = 3) {
  const ManufacturedSolution ms{cs.geom, mode};
  const SourceSpec src = ms.source_spec();
  auto base = [&](Subdomain s, int nt, int nr) {
    return nr > 0 ? build_mesh(cs.geom, s, nt, nr) : build_mesh(cs.geom, s, nt);
  };
  const PolarMesh bs = base(Subdomain::stator, cs.n_theta_stator, cs.n_r_stator);
  const PolarMesh br = base(Subdomain::rotor, cs.n_theta_rotor, cs.n_r_rotor);
  const HarmonicSpace H(cs.harmonic_order, cs.geom.r_gamma);

  std::vector<ConvergenceRow> rows;
  for (int level = 1; level <= cs.levels; ++level) {
    const SplineSpace2D st(mesh_at_level(bs, level), cs.degree);
    const SplineSpace2D rt(mesh_at_level(br, level), cs.degree);
    const SaddleSystem sys = assemble_system(st, rt, H, src, cs.alpha, cs.quad);
    const SolveResult res = solve(sys);

    ConvergenceRow row;
    row.level = level;
    row.n_theta_stator = st.mesh().n_theta;
    row.n_theta_rotor = rt.mesh().n_theta;
    row.h = cs.geom.r_gamma * st.mesh().dtheta();
    const double es = h1_seminorm_error(st, res.u_stator, ms.exact_gradient(), cs.quad);
    const double er = h1_seminorm_error(rt, res.u_rotor, ms.exact_gradient(), cs.quad);
    row.h1_error = std::sqrt(es * es + er * er);
    if (mode <= cs.harmonic_order) {
      row.lambda_coefficient = res.lambda[HarmonicSpace::cos_index(mode)];
      row.lambda_error = std::abs(row.lambda_coefficient - ms.flux_coefficient()) /
                         std::abs(ms.flux_coefficient());
    }
    row.max_jump = res.jump_moments.cwiseAbs().maxCoeff();
    row.h1_norm = res.h1_norm;
    if (!rows.empty())
      row.rate = std::log(rows.back().h1_error / row.h1_error) / std::log(rows.back().h / row.h);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hmortar
