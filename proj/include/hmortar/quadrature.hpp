// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hmortar {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// P_q(x) and P_q'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(int q, double x) {
  double p0 = 1.0, p1 = x;
  for (int n = 2; n <= q; ++n) {
    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return {p1, q * (x * p1 - p0) / (x * x - 1.0)};
}

inline GaussRule compute_gauss_legendre(int q) {
  GaussRule rule;
  rule.nodes.assign(q, 0.0);
  rule.weights.assign(q, 0.0);
  if (q == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < q / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(q, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) {
    const double dp = legendre(q, 0.0).second;
    rule.weights[q / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

}  // namespace detail

/// Cached q-point rule. Thread-safe.
inline const GaussRule& gauss_legendre(int q) {
  if (q < 1 || q > 64)
    throw std::invalid_argument("gauss_legendre: point count out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, detail::compute_gauss_legendre(q)).first;
  return it->second;
}

/// Point counts per knot span. Angular matrix integrands are polynomial;
/// the radial ones carry r or 1/r, and sources are arbitrary.
struct QuadratureOptions {
  int angular_extra = 2;   // q = k + angular_extra
  int radial_extra = 6;    // q = k + radial_extra
  int source_extra = 6;    // loads and error integrals, both directions
  int interface_extra = 8; // per phase-bounded panel on the interface

  QuadratureOptions doubled(int degree) const {
    QuadratureOptions d;
    d.angular_extra = degree + 2 * angular_extra;
    d.radial_extra = degree + 2 * radial_extra;
    d.source_extra = degree + 2 * source_extra;
    d.interface_extra = degree + 2 * interface_extra;
    return d;
  }
};

}  // namespace hmortar
