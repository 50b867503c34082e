// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <vector>

#include "hmortar/bspline.hpp"
#include "hmortar/geometry.hpp"

namespace hmortar {

/// Tensor-product spline space on one ring: periodic in theta, clamped in r.
/// The radial function at the ring's Dirichlet boundary is eliminated; the
/// remaining functions are numbered contiguously (angular index fastest).
class SplineSpace2D {
 public:
  SplineSpace2D(const PolarMesh& mesh, int degree)
      : mesh_(mesh),
        angular_(degree, mesh.theta_breaks(), true),
        radial_(degree, mesh.r_breaks(), false) {
    const int na = angular_.size(), nr = radial_.size();
    dirichlet_layer_ = (mesh.subdomain == Subdomain::stator) ? nr - 1 : 0;
    interface_layer_ = (mesh.subdomain == Subdomain::stator) ? 0 : nr - 1;
    full_to_dof_.assign(static_cast<std::size_t>(na) * nr, -1);
    int next = 0;
    for (int ir = 0; ir < nr; ++ir) {
      if (ir == dirichlet_layer_) continue;
      for (int ia = 0; ia < na; ++ia) full_to_dof_[full_index(ia, ir)] = next++;
    }
    num_dofs_ = next;
    interface_dofs_.resize(na);
    for (int ia = 0; ia < na; ++ia)
      interface_dofs_[ia] = full_to_dof_[full_index(ia, interface_layer_)];
  }

  const PolarMesh& mesh() const { return mesh_; }
  Subdomain subdomain() const { return mesh_.subdomain; }
  int degree() const { return angular_.degree(); }
  const SplineSpace1D& angular() const { return angular_; }
  const SplineSpace1D& radial() const { return radial_; }
  double interface_radius() const { return mesh_.interface_radius(); }

  /// Functions before Dirichlet elimination.
  int num_full() const { return angular_.size() * radial_.size(); }
  int num_dofs() const { return num_dofs_; }
  int num_interface() const { return angular_.size(); }

  int full_index(int ia, int ir) const { return ir * angular_.size() + ia; }
  /// -1 for eliminated (Dirichlet) functions.
  int dof(int ia, int ir) const { return full_to_dof_[full_index(ia, ir)]; }
  int dof_of_full(int full) const { return full_to_dof_[full]; }
  int radial_layer_of_dof(int dof) const {
    // Layers are stored contiguously, skipping the Dirichlet one.
    const int layer = dof / angular_.size();
    return layer >= dirichlet_layer_ ? layer + 1 : layer;
  }

  int dirichlet_layer() const { return dirichlet_layer_; }
  int interface_layer() const { return interface_layer_; }
  /// Dof index of interface function ia (trace coefficient ia).
  const std::vector<int>& interface_dofs() const { return interface_dofs_; }

 private:
  PolarMesh mesh_;
  SplineSpace1D angular_;
  SplineSpace1D radial_;
  int dirichlet_layer_ = 0;
  int interface_layer_ = 0;
  int num_dofs_ = 0;
  std::vector<int> full_to_dof_;
  std::vector<int> interface_dofs_;
};

/// Periodic spline space of the interface trace.
inline SplineSpace1D trace_space(const SplineSpace2D& space) {
  return space.angular();
}

}  // namespace hmortar
