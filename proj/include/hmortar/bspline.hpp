// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmortar {

/// Values and first derivatives of the degree+1 basis functions that are
/// active on one knot span. Active function j has global index
/// (first + j) mod size for periodic spaces and first + j otherwise.
struct BasisEval {
  int span = 0;
  int first = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};

/// Univariate B-spline space of maximal smoothness over the given
/// breakpoints. Open spaces use clamped end knots (dimension spans + degree);
/// periodic spaces wrap around the parametric interval (dimension spans).
class SplineSpace1D {
 public:
  SplineSpace1D(int degree, std::vector<double> breaks, bool periodic)
      : degree_(degree), breaks_(std::move(breaks)), periodic_(periodic) {
    if (degree_ < 1) throw std::invalid_argument("spline degree must be >= 1");
    if (breaks_.size() < 2)
      throw std::invalid_argument("spline space needs at least one span");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i] > breaks_[i - 1]))
        throw std::invalid_argument("spline breakpoints must be increasing");
    if (periodic_ && spans() < degree_ + 1)
      throw std::invalid_argument(
          "periodic spline space needs at least degree+1 spans");
    build_knots();
  }

  int degree() const { return degree_; }
  bool periodic() const { return periodic_; }
  int spans() const { return static_cast<int>(breaks_.size()) - 1; }
  int size() const { return periodic_ ? spans() : spans() + degree_; }
  double lower() const { return breaks_.front(); }
  double upper() const { return breaks_.back(); }
  double period() const { return upper() - lower(); }
  const std::vector<double>& breaks() const { return breaks_; }
  double span_lower(int s) const { return breaks_[s]; }
  double span_upper(int s) const { return breaks_[s + 1]; }

  /// Global index of active function j on span s.
  int global_index(int s, int j) const {
    const int raw = s - (periodic_ ? degree_ : 0) + j;
    return periodic_ ? ((raw % spans()) + spans()) % spans() : raw;
  }

  /// Maps xi into the parametric interval; periodic spaces wrap.
  double wrap(double xi) const {
    if (!periodic_) return xi;
    double t = std::fmod(xi - lower(), period());
    if (t < 0.0) t += period();
    if (t >= period()) t = 0.0;
    return lower() + t;
  }

  int find_span(double xi) const {
    const double x = wrap(xi);
    if (!periodic_) {
      const double tol = 1e-12 * (upper() - lower());
      if (!(x >= lower() - tol && x <= upper() + tol))
        throw std::out_of_range("spline parameter " + std::to_string(xi) +
                                " outside [" + std::to_string(lower()) + ", " +
                                std::to_string(upper()) + "]");
    }
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    int s = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(s, 0, spans() - 1);
  }

  BasisEval eval(double xi) const { return eval_on_span(find_span(xi), xi); }

  /// Cox-de Boor evaluation on a known span (xi may sit on a span boundary).
  BasisEval eval_on_span(int s, double xi) const {
    const int p = degree_;
    double x = wrap(xi);
    // A periodic wrap can move the right endpoint of the last span to 0.
    if (periodic_ && s == spans() - 1 && x < span_lower(s)) x += period();
    const int mu = s + p;  // index of span s in the extended knot vector
    const auto& U = knots_;

    std::vector<double> left(p + 1), right(p + 1);
    // ndu[j][r]: basis values (upper triangle) and knot differences (lower).
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1));
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = x - U[mu + 1 - j];
      right[j] = U[mu + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const double temp = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }

    BasisEval out;
    out.span = s;
    out.first = global_index(s, 0);
    out.values.resize(p + 1);
    out.derivs.resize(p + 1);
    for (int j = 0; j <= p; ++j) out.values[j] = ndu[j][p];
    // First derivatives: p (N_{r-1,p-1}/(u_{r+p}-u_r) - N_{r,p-1}/(...)).
    for (int r = 0; r <= p; ++r) {
      double d = 0.0;
      if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
      if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
      out.derivs[r] = p * d;
    }
    return out;
  }

  /// Extended knot vector used by the recursion (exposed for tests).
  const std::vector<double>& knots() const { return knots_; }

 private:
  void build_knots() {
    const int p = degree_, n = spans();
    knots_.resize(n + 1 + 2 * p);
    for (int j = 0; j < n + 1 + 2 * p; ++j) {
      const int b = j - p;
      if (periodic_) {
        const int wraps = (b >= 0) ? b / n : -((-b + n - 1) / n);
        const int idx = b - wraps * n;
        knots_[j] = breaks_[idx] + wraps * period();
      } else {
        knots_[j] = breaks_[std::clamp(b, 0, n)];
      }
    }
  }

  int degree_;
  std::vector<double> breaks_;
  bool periodic_;
  std::vector<double> knots_;
};

}  // namespace hmortar
