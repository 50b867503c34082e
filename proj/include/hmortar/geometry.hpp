// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmortar {

/// The two rings of the machine cross-section. The stator is the outer ring
/// (Dirichlet at r_outer), the rotor the inner one (Dirichlet at r_shaft).
enum class Subdomain { stator, rotor };

inline std::string_view to_string(Subdomain s) {
  return s == Subdomain::stator ? "stator" : "rotor";
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Concentric annuli r_shaft < r_gamma < r_outer. The interface is the circle
/// of radius r_gamma.
struct AnnulusGeometry {
  double r_shaft = 0.02;
  double r_gamma = 0.0447;
  double r_outer = 0.0675;

  bool operator==(const AnnulusGeometry&) const = default;

  void validate() const {
    if (!(std::isfinite(r_shaft) && std::isfinite(r_gamma) &&
          std::isfinite(r_outer)))
      throw std::invalid_argument("geometry radii must be finite");
    if (!(0.0 < r_shaft && r_shaft < r_gamma && r_gamma < r_outer))
      throw std::invalid_argument(
          "geometry requires 0 < r_shaft < r_gamma < r_outer");
  }

  double inner_radius(Subdomain s) const {
    return s == Subdomain::stator ? r_gamma : r_shaft;
  }
  double outer_radius(Subdomain s) const {
    return s == Subdomain::stator ? r_outer : r_gamma;
  }
  double radial_extent(Subdomain s) const {
    return outer_radius(s) - inner_radius(s);
  }
  double area(Subdomain s) const {
    const double a = inner_radius(s), b = outer_radius(s);
    return std::numbers::pi * (b * b - a * a);
  }
  double interface_length() const { return 2.0 * std::numbers::pi * r_gamma; }
};

/// F(r, theta) = (r cos theta, r sin theta). Jacobian determinant is r.
inline Point polar_map(double r, double theta) {
  if (!(r > 0.0))
    throw std::domain_error("polar_map: radius must be positive");
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// Uniform tensor mesh of one ring on the reference rectangle
/// [r_lo, r_hi] x [0, 2 pi). The angular direction is periodic.
struct PolarMesh {
  Subdomain subdomain = Subdomain::stator;
  double r_lo = 0.0;
  double r_hi = 0.0;
  int n_theta = 0;
  int n_r = 0;

  double dtheta() const { return 2.0 * std::numbers::pi / n_theta; }
  double dr() const { return (r_hi - r_lo) / n_r; }
  int num_elements() const { return n_theta * n_r; }

  std::vector<double> theta_breaks() const {
    std::vector<double> b(n_theta + 1);
    for (int i = 0; i <= n_theta; ++i) b[i] = i * dtheta();
    b.back() = 2.0 * std::numbers::pi;
    return b;
  }
  std::vector<double> r_breaks() const {
    std::vector<double> b(n_r + 1);
    for (int i = 0; i <= n_r; ++i) b[i] = r_lo + i * dr();
    b.front() = r_lo;
    b.back() = r_hi;
    return b;
  }

  /// Mapped area of element (it, ir), exact: dtheta (r1^2 - r0^2) / 2.
  double element_area(int it, int ir) const {
    (void)it;
    const double r0 = r_lo + ir * dr(), r1 = (ir + 1 == n_r) ? r_hi : r0 + dr();
    return 0.5 * dtheta() * (r1 * r1 - r0 * r0);
  }

  double interface_radius() const {
    return subdomain == Subdomain::stator ? r_lo : r_hi;
  }
};

/// Radial span count keeping elements near-isotropic at the interface:
/// ceil(extent / (r_gamma * dtheta)).
inline int default_radial_spans(const AnnulusGeometry& geom, Subdomain s,
                                int n_theta) {
  const double dtheta = 2.0 * std::numbers::pi / n_theta;
  const double spans = geom.radial_extent(s) / (geom.r_gamma * dtheta);
  return std::max(1, static_cast<int>(std::ceil(spans - 1e-12)));
}

inline PolarMesh build_mesh(const AnnulusGeometry& geom, Subdomain s,
                            int n_theta, int n_r) {
  geom.validate();
  if (n_theta < 3)
    throw std::invalid_argument("build_mesh: n_theta must be at least 3");
  if (n_r < 1) throw std::invalid_argument("build_mesh: n_r must be positive");
  return PolarMesh{s, geom.inner_radius(s), geom.outer_radius(s), n_theta, n_r};
}

inline PolarMesh build_mesh(const AnnulusGeometry& geom, Subdomain s,
                            int n_theta) {
  return build_mesh(geom, s, n_theta, default_radial_spans(geom, s, n_theta));
}

/// Uniform refinement: both span counts doubled.
inline PolarMesh refine(const PolarMesh& m) {
  PolarMesh r = m;
  r.n_theta *= 2;
  r.n_r *= 2;
  return r;
}

/// Mesh at refinement level >= 1, where level 1 is the base mesh.
inline PolarMesh mesh_at_level(const PolarMesh& base, int level) {
  if (level < 1) throw std::invalid_argument("refinement level must be >= 1");
  PolarMesh m = base;
  for (int l = 1; l < level; ++l) m = refine(m);
  return m;
}

}  // namespace hmortar
