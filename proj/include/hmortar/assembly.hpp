// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hmortar/errors.hpp"
#include "hmortar/quadrature.hpp"
#include "hmortar/source.hpp"
#include "hmortar/spline_space.hpp"

namespace hmortar {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

namespace detail {

/// Basis values at the Gauss points of every span of a 1D space.
struct SpanTable {
  int q = 0;
  std::vector<double> points;   // [span * q + i]
  std::vector<double> weights;  // mapped to the span
  std::vector<BasisEval> evals;
};

inline SpanTable tabulate(const SplineSpace1D& space, int q) {
  const GaussRule& rule = gauss_legendre(q);
  SpanTable t;
  t.q = q;
  const int n = space.spans();
  t.points.reserve(n * q);
  t.weights.reserve(n * q);
  t.evals.reserve(n * q);
  for (int s = 0; s < n; ++s) {
    const double a = space.span_lower(s), b = space.span_upper(s);
    for (int i = 0; i < q; ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      t.points.push_back(x);
      t.weights.push_back(0.5 * (b - a) * rule.weights[i]);
      t.evals.push_back(space.eval_on_span(s, x));
    }
  }
  return t;
}

inline void require_finite(double v, const char* what, int element) {
  if (!std::isfinite(v)) throw AssemblyError(std::string("non-finite ") + what, element);
}

}  // namespace detail

enum class DofSelection { free, all };

/// (nu grad u, grad v) pulled back to polar coordinates:
/// nu (u_r v_r + u_t v_t / r^2) r dr dtheta. With DofSelection::all the
/// Dirichlet layer is kept and indices are full tensor indices.
inline SparseMatrix assemble_stiffness(const SplineSpace2D& space,
                                       const ScalarField& nu,
                                       const QuadratureOptions& quad = {},
                                       DofSelection sel = DofSelection::free) {
  const int k = space.degree();
  const auto at = detail::tabulate(space.angular(), k + quad.angular_extra);
  const auto rt = detail::tabulate(space.radial(), k + quad.radial_extra);
  const int na = space.angular().spans(), nr = space.radial().spans();
  const int nloc = (k + 1) * (k + 1);
  const Subdomain sub = space.subdomain();

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(na) * nr * nloc * nloc);
  std::vector<double> ke(nloc * nloc);
  std::vector<int> idx(nloc);

  for (int er = 0; er < nr; ++er) {
    for (int ea = 0; ea < na; ++ea) {
      const int element = er * na + ea;
      std::fill(ke.begin(), ke.end(), 0.0);
      for (int qr = 0; qr < rt.q; ++qr) {
        const int pr = er * rt.q + qr;
        const double r = rt.points[pr];
        const BasisEval& R = rt.evals[pr];
        for (int qa = 0; qa < at.q; ++qa) {
          const int pa = ea * at.q + qa;
          const double theta = at.points[pa];
          const BasisEval& T = at.evals[pa];
          const double nuv = nu(sub, r, theta);
          detail::require_finite(nuv, "reluctivity", element);
          const double w = nuv * rt.weights[pr] * at.weights[pa];
          for (int i = 0; i < nloc; ++i) {
            const int ia = i % (k + 1), ir = i / (k + 1);
            const double dri = T.values[ia] * R.derivs[ir];
            const double dti = T.derivs[ia] * R.values[ir];
            for (int j = 0; j < nloc; ++j) {
              const int ja = j % (k + 1), jr = j / (k + 1);
              const double drj = T.values[ja] * R.derivs[jr];
              const double dtj = T.derivs[ja] * R.values[jr];
              ke[i * nloc + j] += w * (dri * drj * r + dti * dtj / r);
            }
          }
        }
      }
      const BasisEval& T0 = at.evals[ea * at.q];
      const BasisEval& R0 = rt.evals[er * rt.q];
      for (int i = 0; i < nloc; ++i) {
        const int ga = space.angular().global_index(T0.span, i % (k + 1));
        const int gr = R0.first + i / (k + 1);
        const int full = space.full_index(ga, gr);
        idx[i] = (sel == DofSelection::all) ? full : space.dof_of_full(full);
      }
      for (int i = 0; i < nloc; ++i) {
        if (idx[i] < 0) continue;
        for (int j = 0; j < nloc; ++j) {
          if (idx[j] < 0) continue;
          detail::require_finite(ke[i * nloc + j], "stiffness entry", element);
          trips.emplace_back(idx[i], idx[j], ke[i * nloc + j]);
        }
      }
    }
  }
  const int n = (sel == DofSelection::all) ? space.num_full() : space.num_dofs();
  SparseMatrix A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

/// Load vector: int j_s phi r - int m^perp . grad(phi) r, with
/// m^perp = (m_y, -m_x). In polar components m^perp . grad(phi) =
/// m_theta phi_r - m_r phi_theta / r.
inline Eigen::VectorXd assemble_rhs(const SplineSpace2D& space,
                                    const SourceSpec& src,
                                    const QuadratureOptions& quad = {}) {
  const int k = space.degree();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(space.num_dofs());
  if (!src.js && !src.m) return f;
  const auto at = detail::tabulate(space.angular(), k + quad.source_extra);
  const auto rt = detail::tabulate(space.radial(), k + quad.source_extra);
  const int na = space.angular().spans(), nr = space.radial().spans();
  const int nloc = (k + 1) * (k + 1);
  const Subdomain sub = space.subdomain();
  std::vector<double> fe(nloc);

  for (int er = 0; er < nr; ++er) {
    for (int ea = 0; ea < na; ++ea) {
      const int element = er * na + ea;
      std::fill(fe.begin(), fe.end(), 0.0);
      for (int qr = 0; qr < rt.q; ++qr) {
        const int pr = er * rt.q + qr;
        const double r = rt.points[pr];
        const BasisEval& R = rt.evals[pr];
        for (int qa = 0; qa < at.q; ++qa) {
          const int pa = ea * at.q + qa;
          const double theta = at.points[pa];
          const BasisEval& T = at.evals[pa];
          const double w = rt.weights[pr] * at.weights[pa] * r;
          const double js = src.js ? src.js(sub, r, theta) : 0.0;
          detail::require_finite(js, "source current", element);
          double m_r = 0.0, m_t = 0.0;
          if (src.m) {
            const Vec2 m = src.m(sub, r, theta);
            detail::require_finite(m.x, "magnetization", element);
            detail::require_finite(m.y, "magnetization", element);
            const double c = std::cos(theta), s = std::sin(theta);
            m_r = m.x * c + m.y * s;
            m_t = -m.x * s + m.y * c;
          }
          for (int i = 0; i < nloc; ++i) {
            const int ia = i % (k + 1), ir = i / (k + 1);
            const double phi = T.values[ia] * R.values[ir];
            const double phi_r = T.values[ia] * R.derivs[ir];
            const double phi_t = T.derivs[ia] * R.values[ir];
            fe[i] += w * (js * phi - (m_t * phi_r - m_r * phi_t / r));
          }
        }
      }
      const BasisEval& T0 = at.evals[ea * at.q];
      const BasisEval& R0 = rt.evals[er * rt.q];
      for (int i = 0; i < nloc; ++i) {
        const int ga = space.angular().global_index(T0.span, i % (k + 1));
        const int gr = R0.first + i / (k + 1);
        const int d = space.dof(ga, gr);
        if (d >= 0) f[d] += fe[i];
      }
    }
  }
  return f;
}

/// Selection E (n_interface x n_dofs): trace coefficients = E * u.
inline SparseMatrix trace_matrix(const SplineSpace2D& space) {
  const auto& dofs = space.interface_dofs();
  std::vector<Triplet> trips;
  trips.reserve(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    trips.emplace_back(static_cast<int>(i), dofs[i], 1.0);
  SparseMatrix E(static_cast<int>(dofs.size()), space.num_dofs());
  E.setFromTriplets(trips.begin(), trips.end());
  return E;
}

/// Mass matrix of a periodic trace space on the circle of the given radius.
inline SparseMatrix trace_mass(const SplineSpace1D& trace, double radius) {
  const int k = trace.degree();
  const auto t = detail::tabulate(trace, k + 2);
  std::vector<Triplet> trips;
  for (int s = 0; s < trace.spans(); ++s)
    for (int q = 0; q < t.q; ++q) {
      const BasisEval& e = t.evals[s * t.q + q];
      const double w = t.weights[s * t.q + q] * radius;
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
          trips.emplace_back(trace.global_index(s, i), trace.global_index(s, j),
                             w * e.values[i] * e.values[j]);
    }
  SparseMatrix M(trace.size(), trace.size());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

/// Loads int g phi_i radius dtheta with `panels` Gauss panels per span.
inline Eigen::VectorXd trace_load(const SplineSpace1D& trace, double radius,
                                  const std::function<double(double)>& g,
                                  int points, int panels) {
  const GaussRule& rule = gauss_legendre(points);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(trace.size());
  for (int s = 0; s < trace.spans(); ++s) {
    const double a = trace.span_lower(s), h = (trace.span_upper(s) - a) / panels;
    for (int p = 0; p < panels; ++p)
      for (int q = 0; q < rule.size(); ++q) {
        const double x = a + h * (p + 0.5 + 0.5 * rule.nodes[q]);
        const double w = 0.5 * h * rule.weights[q] * radius;
        const double gv = g(x);
        detail::require_finite(gv, "trace data", s);
        const BasisEval e = trace.eval_on_span(s, x);
        for (int i = 0; i <= trace.degree(); ++i)
          b[trace.global_index(s, i)] += w * gv * e.values[i];
      }
  }
  return b;
}

/// L2(Gamma) projection of g onto the trace space. `max_frequency` bounds the
/// oscillation of g and sets the panel count (phase <= pi/2 per panel).
inline Eigen::VectorXd l2_project_trace(const SplineSpace1D& trace, double radius,
                                        const std::function<double(double)>& g,
                                        double max_frequency = 0.0,
                                        const QuadratureOptions& quad = {}) {
  double hmax = 0.0;
  for (int s = 0; s < trace.spans(); ++s)
    hmax = std::max(hmax, trace.span_upper(s) - trace.span_lower(s));
  const int panels =
      std::max(1, static_cast<int>(std::ceil(max_frequency * hmax / (0.5 * std::numbers::pi))));
  const Eigen::VectorXd b =
      trace_load(trace, radius, g, trace.degree() + quad.interface_extra, panels);
  Eigen::SimplicialLDLT<SparseMatrix> solver(trace_mass(trace, radius));
  if (solver.info() != Eigen::Success)
    throw NumericalError("l2_project_trace: singular trace mass matrix");
  return solver.solve(b);
}

/// Value and polar gradient (d/dr, d/dtheta) of a discrete field.
struct FieldSample {
  double value = 0.0;
  double d_r = 0.0;
  double d_theta = 0.0;
};

/// `coeffs` indexed by free dofs.
inline FieldSample evaluate(const SplineSpace2D& space,
                            const Eigen::VectorXd& coeffs, double r,
                            double theta) {
  const BasisEval T = space.angular().eval(theta);
  const BasisEval R = space.radial().eval(r);
  const int k = space.degree();
  FieldSample out;
  for (int ir = 0; ir <= k; ++ir)
    for (int ia = 0; ia <= k; ++ia) {
      const int d = space.dof(space.angular().global_index(T.span, ia), R.first + ir);
      if (d < 0) continue;
      out.value += coeffs[d] * T.values[ia] * R.values[ir];
      out.d_r += coeffs[d] * T.values[ia] * R.derivs[ir];
      out.d_theta += coeffs[d] * T.derivs[ia] * R.values[ir];
    }
  return out;
}

/// Exact polar gradient (du/dr, du/dtheta) for error integrals.
using PolarGradient = std::function<std::pair<double, double>(double, double)>;

/// || grad(u - u_h) ||_{L2} on the ring.
inline double h1_seminorm_error(const SplineSpace2D& space,
                                const Eigen::VectorXd& coeffs,
                                const PolarGradient& exact,
                                const QuadratureOptions& quad = {}) {
  const int k = space.degree();
  const auto at = detail::tabulate(space.angular(), k + quad.source_extra);
  const auto rt = detail::tabulate(space.radial(), k + quad.source_extra);
  double sum = 0.0;
  for (std::size_t pr = 0; pr < rt.points.size(); ++pr) {
    const double r = rt.points[pr];
    const BasisEval& R = rt.evals[pr];
    for (std::size_t pa = 0; pa < at.points.size(); ++pa) {
      const double theta = at.points[pa];
      const BasisEval& T = at.evals[pa];
      double ur = 0.0, ut = 0.0;
      for (int ir = 0; ir <= k; ++ir)
        for (int ia = 0; ia <= k; ++ia) {
          const int d = space.dof(space.angular().global_index(T.span, ia), R.first + ir);
          if (d < 0) continue;
          ur += coeffs[d] * T.values[ia] * R.derivs[ir];
          ut += coeffs[d] * T.derivs[ia] * R.values[ir];
        }
      const auto [er, et] = exact(r, theta);
      const double dr = er - ur, dt = (et - ut) / r;
      sum += rt.weights[pr] * at.weights[pa] * r * (dr * dr + dt * dt);
    }
  }
  return std::sqrt(sum);
}

}  // namespace hmortar
