// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hmortar/bspline.hpp"
#include "hmortar/quadrature.hpp"

namespace hmortar {

/// Trigonometric multiplier space of order N on the circle of radius
/// r_gamma, basis ordered [1, cos t, sin t, cos 2t, sin 2t, ..., sin Nt].
class HarmonicSpace {
 public:
  HarmonicSpace(int order, double r_gamma) : order_(order), r_gamma_(r_gamma) {
    if (order_ < 0) throw std::invalid_argument("harmonic order must be >= 0");
    if (!(r_gamma_ > 0.0))
      throw std::invalid_argument("interface radius must be positive");
  }

  int order() const { return order_; }
  double r_gamma() const { return r_gamma_; }
  int dim() const { return 2 * order_ + 1; }

  static int frequency(int index) { return (index + 1) / 2; }
  static bool is_sine(int index) { return index > 0 && index % 2 == 0; }
  static int cos_index(int n) { return n == 0 ? 0 : 2 * n - 1; }
  static int sin_index(int n) {
    if (n < 1) throw std::invalid_argument("sin mode needs n >= 1");
    return 2 * n;
  }

  double eval(int index, double theta) const {
    const int n = frequency(index);
    return is_sine(index) ? std::sin(n * theta) : std::cos(n * theta);
  }

  /// All basis values at theta by the angle-addition recurrence.
  void eval_all(double theta, double* out) const {
    out[0] = 1.0;
    if (order_ == 0) return;
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double c = 1.0, s = 0.0;
    for (int n = 1; n <= order_; ++n) {
      // Re-seed periodically to keep round-off growth bounded.
      if (n % 64 == 0) {
        c = std::cos(n * theta);
        s = std::sin(n * theta);
      } else {
        const double cn = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = cn;
      }
      out[2 * n - 1] = c;
      out[2 * n] = s;
    }
  }

  /// L2(Gamma) norm squared of basis function `index`.
  double l2_norm_squared(int index) const {
    return (index == 0 ? 2.0 : 1.0) * std::numbers::pi * r_gamma_;
  }

 private:
  int order_;
  double r_gamma_;
};

enum class SobolevIndex { minus_half, plus_half };

/// Diagonal Gram matrix of the H^{+-1/2}(Gamma) inner product in the
/// harmonic basis: weight (1 + n^2)^{+-1/2} times the L2(Gamma) norm.
struct SobolevGram {
  SobolevIndex index = SobolevIndex::minus_half;
  Eigen::VectorXd diag;

  Eigen::MatrixXd dense() const { return diag.asDiagonal(); }
  double norm(const Eigen::VectorXd& coeffs) const {
    return std::sqrt(coeffs.cwiseAbs2().dot(diag));
  }
};

inline double sobolev_weight(int n, SobolevIndex s) {
  const double w = std::sqrt(1.0 + static_cast<double>(n) * n);
  return s == SobolevIndex::minus_half ? 1.0 / w : w;
}

inline SobolevGram gram(const HarmonicSpace& space, SobolevIndex s) {
  SobolevGram g{s, Eigen::VectorXd(space.dim())};
  for (int i = 0; i < space.dim(); ++i)
    g.diag[i] =
        space.l2_norm_squared(i) * sobolev_weight(HarmonicSpace::frequency(i), s);
  return g;
}

/// Pairing matrix P(m, i) = int psi_m phi_i r_gamma dtheta between any
/// multiplier basis psi (evaluated all at once) and a periodic trace space.
/// Each span is split so the phase max_frequency * theta moves by at most
/// pi/2 per panel.
template <typename BasisFn>
Eigen::MatrixXd assemble_pairing(const SplineSpace1D& trace, double r_gamma,
                                 int num_multipliers, double max_frequency,
                                 BasisFn&& eval_all, int points) {
  const GaussRule& rule = gauss_legendre(points);
  const int k = trace.degree();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(num_multipliers, trace.size());
  std::vector<double> psi(num_multipliers);
  for (int s = 0; s < trace.spans(); ++s) {
    const double a = trace.span_lower(s), b = trace.span_upper(s);
    const int panels = std::max(
        1, static_cast<int>(std::ceil(max_frequency * (b - a) / (0.5 * std::numbers::pi))));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
      for (int q = 0; q < rule.size(); ++q) {
        const double x = a + h * (p + 0.5 + 0.5 * rule.nodes[q]);
        const double w = 0.5 * h * rule.weights[q] * r_gamma;
        const BasisEval e = trace.eval_on_span(s, x);
        eval_all(x, psi.data());
        for (int j = 0; j <= k; ++j) {
          const int col = trace.global_index(s, j);
          const double wj = w * e.values[j];
          for (int m = 0; m < num_multipliers; ++m) P(m, col) += wj * psi[m];
        }
      }
  }
  return P;
}

/// Mortar coupling B_l ((2N+1) x n_trace): sign * int psi_m phi_i r dtheta.
/// sign = +1 for the stator trace, -1 for the rotor ([v] = v1 - v2).
inline Eigen::MatrixXd assemble_coupling(const SplineSpace1D& trace,
                                         const HarmonicSpace& harmonics,
                                         double sign = 1.0,
                                         int extra_points = 8) {
  if (!trace.periodic())
    throw std::invalid_argument("coupling requires a periodic trace space");
  Eigen::MatrixXd B = assemble_pairing(
      trace, harmonics.r_gamma(), harmonics.dim(), harmonics.order(),
      [&](double x, double* out) { harmonics.eval_all(x, out); },
      trace.degree() + extra_points);
  if (sign != 1.0) B *= sign;
  return B;
}

/// Block-diagonal rotation acting on harmonic coefficients: mode 0 -> 1,
/// mode n -> [[cos n a, sin n a], [-sin n a, cos n a]].
inline Eigen::MatrixXd rotation_blocks(int order, double alpha) {
  if (order < 0) throw std::invalid_argument("harmonic order must be >= 0");
  const int dim = 2 * order + 1;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(dim, dim);
  R(0, 0) = 1.0;
  for (int n = 1; n <= order; ++n) {
    const double c = std::cos(n * alpha), s = std::sin(n * alpha);
    const int i = 2 * n - 1;
    R(i, i) = c;
    R(i, i + 1) = s;
    R(i + 1, i) = -s;
    R(i + 1, i + 1) = c;
  }
  return R;
}

/// Harmonic coefficients of a periodic spline function on Gamma up to
/// `order`: c_m = <v, psi_m> / ||psi_m||^2.
inline Eigen::VectorXd fourier_coefficients(const SplineSpace1D& trace,
                                            double r_gamma,
                                            const Eigen::VectorXd& trace_coeffs,
                                            int order) {
  const HarmonicSpace H(order, r_gamma);
  Eigen::VectorXd c = assemble_coupling(trace, H) * trace_coeffs;
  for (int m = 0; m < H.dim(); ++m) c[m] /= H.l2_norm_squared(m);
  return c;
}

}  // namespace hmortar
