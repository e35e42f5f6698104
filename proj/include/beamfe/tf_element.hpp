#pragma once

// Torsion-free Kirchhoff-Love element for initially straight beams with
// isotropic sections. Twelve Hermite dofs, no rotational unknowns:
//   Pi = int 1/2 (EA eps^2 + EI kappa.kappa) ds,
//   eps = ||r'|| - 1,  kappa = r' x r'' / ||r'||^2.

#include <Eigen/Core>

#include "beamfe/hermite.hpp"
#include "beamfe/quadrature.hpp"
#include "beamfe/section.hpp"

namespace beamfe {

using Matrix12 = Eigen::Matrix<double, 12, 12>;

struct TFStrainState {
  double eps = 0.0;
  Eigen::Vector3d kappa_vec = Eigen::Vector3d::Zero();
  double kappa = 0.0;
};

class TorsionFreeElement {
 public:
  /// Throws DomainError for a curved initial geometry or an anisotropic section.
  TorsionFreeElement(const ElementReferenceGeometry& ref, const CrossSection& section, const Material& material,
                     int gauss_points = 4);

  const ElementReferenceGeometry& reference() const { return ref_; }
  const CrossSection& section() const { return section_; }
  const Material& material() const { return material_; }

  TFStrainState strains(const ElementCenterlineDofs& dofs, double xi) const;

  Vector12<double> internal_residual(const ElementCenterlineDofs& dofs) const;
  Matrix12 tangent_stiffness(const ElementCenterlineDofs& dofs) const;
  void evaluate_internal(const ElementCenterlineDofs& dofs, Vector12<double>* residual, Matrix12* stiffness) const;
  double strain_energy(const ElementCenterlineDofs& dofs) const;

  /// Constant consistent mass matrix rho A int H^T H J dxi.
  const Matrix12& mass_matrix() const { return mass_; }

  /// Consistent load of a distributed moment m (per unit length), perpendicular
  /// to the tangent, with its (non-symmetric) linearization. The load enters
  /// the residual with a negative sign. Throws TangentialMomentError if m has
  /// a component along the reference tangent.
  void distributed_moment_load(const ElementCenterlineDofs& dofs, const Eigen::Vector3d& m,
                               Vector12<double>* load, Matrix12* load_stiffness) const;

  template <typename Scalar>
  Vector12<Scalar> residual_kernel(const Vector12<Scalar>& x) const;

 private:
  ElementReferenceGeometry ref_;
  CrossSection section_;
  Material material_;
  QuadratureRule rule_;
  std::vector<double> jacobian_;
  std::vector<double> jacobian_xi_;
  Matrix12 mass_;
};

/// Work-conjugate tangent load of a concentrated moment m at a node with
/// tangent t: delta theta_perp . m = delta t . (m x t) / ||t||^2.
Eigen::Vector3d nodal_moment_load(const Eigen::Vector3d& t, const Eigen::Vector3d& m);
/// d(nodal_moment_load)/dt.
Eigen::Matrix3d nodal_moment_load_derivative(const Eigen::Vector3d& t, const Eigen::Vector3d& m);

/// Admissibility gate for moments on torsion-free elements: throws
/// TangentialMomentError if |t.m| > 1e-8 ||t|| ||m||.
void check_perpendicular_moment(const Eigen::Vector3d& t, const Eigen::Vector3d& m);

}  // namespace beamfe
