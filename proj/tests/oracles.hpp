// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by the test suites. None of these
// reuse library code paths beyond plain data types.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Textbook recursive Cox-de Boor on an explicit knot vector; half-open spans,
// with the right end of a clamped vector attached to the last span.
inline double bspline(const std::vector<double>& t, int i, int p, double x) {
  if (p == 0) {
    const bool last = x == t.back() && t[i] < t[i + 1] && t[i + 1] == t.back();
    return (t[i] <= x && x < t[i + 1]) || last ? 1.0 : 0.0;
  }
  double v = 0.0;
  if (t[i + p] > t[i]) v += (x - t[i]) / (t[i + p] - t[i]) * bspline(t, i, p - 1, x);
  if (t[i + p + 1] > t[i + 1])
    v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * bspline(t, i + 1, p - 1, x);
  return v;
}

inline std::vector<double> clamped_knots(const std::vector<double>& breaks, int p) {
  std::vector<double> t(p, breaks.front());
  t.insert(t.end(), breaks.begin(), breaks.end());
  t.insert(t.end(), p, breaks.back());
  return t;
}

// Uniform periodic basis function i on n spans of [0, period): the cardinal
// B-spline starting at breakpoint i, summed over its periodic images.
inline double periodic_bspline(int n, double period, int p, int i, double x) {
  std::vector<double> t(p + 2);
  for (int j = 0; j <= p + 1; ++j) t[j] = j;
  const double h = period / n;
  double u = std::fmod(x / h - i, double(n));
  if (u < 0) u += n;
  double v = 0.0;
  for (int wrap = -1; wrap <= 1; ++wrap) {
    const double s = u + wrap * n;
    if (s >= 0.0 && s < p + 1) v += bspline(t, 0, p, s);
  }
  return v;
}

// Dense route for B A^{-1} B^T via an explicit inverse.
inline Eigen::MatrixXd dense_schur(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd Ainv = A.inverse();
  const Eigen::MatrixXd S = B * Ainv * B.transpose();
  return 0.5 * (S + S.transpose());
}

// Smallest eigenvalue of S x = lambda D x with Eigen's generalized solver.
inline double min_generalized(const Eigen::MatrixXd& S, const Eigen::VectorXd& D) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::MatrixXd(D.asDiagonal()));
  return es.eigenvalues().minCoeff();
}

// beta_n^2 of the stator annulus by RK4 shooting on
//   f'' + f'/r - n^2 f / r^2 = 0,  f(R2) = 0,
// integrated inward from R2; beta_n^2 = f(R1)/(-f'(R1)) times the Sobolev
// weight sqrt(1+n^2) for n >= 1.
inline double shooting_beta_squared(double R1, double R2, int n, int steps = 20000) {
  auto rhs = [n](double r, double f, double g) {
    return std::pair<double, double>{g, -g / r + double(n) * n * f / (r * r)};
  };
  double r = R2, f = 0.0, g = 1.0;
  const double h = (R1 - R2) / steps;
  for (int s = 0; s < steps; ++s) {
    const auto [k1f, k1g] = rhs(r, f, g);
    const auto [k2f, k2g] = rhs(r + h / 2, f + h / 2 * k1f, g + h / 2 * k1g);
    const auto [k3f, k3g] = rhs(r + h / 2, f + h / 2 * k2f, g + h / 2 * k2g);
    const auto [k4f, k4g] = rhs(r + h, f + h * k3f, g + h * k3g);
    f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    g += h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    r += h;
  }
  const double ratio = f / (-g);
  return n == 0 ? ratio : ratio * std::sqrt(1.0 + double(n) * n);
}

// Composite Simpson rule on [a, b] with m (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
