// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hmortar/geometry.hpp"

namespace hmortar {

/// Cartesian vector (x, y).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Fields are evaluated in the subdomain's own frame: (subdomain, r, theta).
using ScalarField = std::function<double(Subdomain, double, double)>;
using VectorField = std::function<Vec2(Subdomain, double, double)>;

/// Piecewise constant value on an annular sector of one subdomain.
/// theta_begin may exceed theta_end, in which case the sector wraps past 0.
struct Sector {
  Subdomain subdomain = Subdomain::rotor;
  double r_min = 0.0;
  double r_max = 0.0;
  double theta_begin = 0.0;
  double theta_end = 0.0;

  bool operator==(const Sector&) const = default;

  bool contains(Subdomain s, double r, double theta) const {
    if (s != subdomain || r < r_min || r >= r_max) return false;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto wrap = [](double t) {
      double w = std::fmod(t, two_pi);
      return w < 0.0 ? w + two_pi : w;
    };
    const double a = wrap(theta_begin), b = wrap(theta_end), t = wrap(theta);
    if (std::abs(theta_end - theta_begin) >= two_pi) return true;
    return a <= b ? (t >= a && t < b) : (t >= a || t < b);
  }
};

struct ScalarSector {
  Sector sector;
  double value = 0.0;

  bool operator==(const ScalarSector&) const = default;
};

/// Magnetization given by its polar components in the sector.
struct MagnetSector {
  Sector sector;
  double m_r = 0.0;
  double m_theta = 0.0;

  bool operator==(const MagnetSector&) const = default;
};

inline ScalarField constant_field(double value) {
  return [value](Subdomain, double, double) { return value; };
}

inline ScalarField per_subdomain_field(double stator, double rotor) {
  return [stator, rotor](Subdomain s, double, double) {
    return s == Subdomain::stator ? stator : rotor;
  };
}

/// Sum of the sector values covering the point; `background` elsewhere.
inline ScalarField sector_field(std::vector<ScalarSector> sectors,
                                ScalarField background = constant_field(0.0)) {
  return [sectors = std::move(sectors), background](Subdomain s, double r,
                                                     double theta) {
    for (const auto& sec : sectors)
      if (sec.sector.contains(s, r, theta)) return sec.value;
    return background(s, r, theta);
  };
}

inline VectorField magnet_field(std::vector<MagnetSector> magnets) {
  return [magnets = std::move(magnets)](Subdomain s, double r, double theta) {
    for (const auto& m : magnets)
      if (m.sector.contains(s, r, theta)) {
        const double c = std::cos(theta), sn = std::sin(theta);
        return Vec2{m.m_r * c - m.m_theta * sn, m.m_r * sn + m.m_theta * c};
      }
    return Vec2{};
  };
}

/// Right-hand side data: j = j_s + div m^perp, reluctivity nu.
/// An empty j_s or m means zero.
struct SourceSpec {
  ScalarField js;
  VectorField m;
  ScalarField nu = constant_field(1.0);
  double nu_lo = 1.0;
  double nu_hi = 1.0;

  void validate() const {
    if (!(std::isfinite(nu_lo) && std::isfinite(nu_hi) && nu_lo > 0.0 &&
          nu_lo <= nu_hi))
      throw std::invalid_argument(
          "reluctivity bounds must satisfy 0 < nu_lo <= nu_hi < inf");
    if (!nu) throw std::invalid_argument("reluctivity field missing");
  }
};

inline SourceSpec zero_source() { return SourceSpec{}; }

}  // namespace hmortar
