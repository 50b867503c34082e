// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hmortar/errors.hpp"

namespace hmortar {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, empty unless requested
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices. Rotations follow
/// the stable tan(phi) formulation; entries negligible against both
/// diagonals are zeroed without rotating.
inline SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, bool want_vectors = false,
                                   int max_sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  if (!a.allFinite()) throw std::invalid_argument("jacobi_eigen: non-finite entries");
  if (n == 0) return {};
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  const double scale = a.cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300))
    throw std::invalid_argument("jacobi_eigen: matrix not symmetric");
  a = 0.5 * (a + a.transpose());

  SymmetricEigen out;
  Eigen::MatrixXd v;
  if (want_vectors) v = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();

  auto off_norm = [&] {
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
  };

  // A pair is converged once |a_pq| <= eps sqrt(|a_pp a_qq|); dropping it
  // perturbs the eigenvalues by O(eps) relative to the diagonals involved.
  for (int sweep = 0;; ++sweep) {
    if (sweep == max_sweeps) {
      if (off_norm() > 1e3 * eps * a.norm())
        throw NumericalError("jacobi_eigen: no convergence");
      break;
    }
    int rotations = 0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        if (std::abs(apq) <= eps * std::sqrt(std::abs(app) * std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        ++rotations;
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        if (want_vectors)
          for (int k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
      }
    }
    out.sweeps = sweep + 1;
    if (rotations == 0) break;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    if (want_vectors) out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

}  // namespace hmortar
