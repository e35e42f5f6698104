#pragma once

// Cubic Hermite centerline interpolation
//   r(xi) = N_d1 d1 + N_d2 d2 + l/2 (N_t1 t1 + N_t2 t2),  xi in [-1, 1].
// Arc-length derivatives use (.)' = (.)_xi / J(xi), J = ||r0_xi||.

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "beamfe/errors.hpp"

namespace beamfe {

template <typename Scalar>
using Vector12 = Eigen::Matrix<Scalar, 12, 1>;
template <typename Scalar>
using Matrix3x12 = Eigen::Matrix<Scalar, 3, 12>;

/// The twelve Hermite dofs of one element centerline, ordered (d1, t1, d2, t2).
struct ElementCenterlineDofs {
  Eigen::Vector3d d1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d t1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d d2 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d t2 = Eigen::Vector3d::UnitX();

  Vector12<double> to_vector() const {
    Vector12<double> v;
    v << d1, t1, d2, t2;
    return v;
  }
  static ElementCenterlineDofs from_vector(const Vector12<double>& v) {
    return {v.segment<3>(0), v.segment<3>(3), v.segment<3>(6), v.segment<3>(9)};
  }
};

inline void check_parameter_domain(double xi) {
  if (!(std::abs(xi) <= 1.0 + 1e-12)) {
    throw DomainError("parameter coordinate " + std::to_string(xi) + " outside [-1, 1]");
  }
}

/// Hermite shape functions (N_d1, N_t1, N_d2, N_t2) or their xi-derivatives.
/// The l/2 tangent scaling is not included.
template <typename Scalar>
std::array<Scalar, 4> hermite_shape_unchecked(const Scalar& xi, int derivative_order) {
  const Scalar q(0.25);
  switch (derivative_order) {
    case 0:
      return {q * (xi * xi * xi - Scalar(3) * xi + Scalar(2)),
              q * (xi * xi * xi - xi * xi - xi + Scalar(1)),
              q * (-xi * xi * xi + Scalar(3) * xi + Scalar(2)),
              q * (xi * xi * xi + xi * xi - xi - Scalar(1))};
    case 1:
      return {q * (Scalar(3) * xi * xi - Scalar(3)),
              q * (Scalar(3) * xi * xi - Scalar(2) * xi - Scalar(1)),
              q * (-Scalar(3) * xi * xi + Scalar(3)),
              q * (Scalar(3) * xi * xi + Scalar(2) * xi - Scalar(1))};
    case 2:
      return {Scalar(1.5) * xi, q * (Scalar(6) * xi - Scalar(2)), Scalar(-1.5) * xi,
              q * (Scalar(6) * xi + Scalar(2))};
    default:
      return {Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
  }
}

/// Checked variant: throws DomainError if xi leaves [-1, 1] by more than 1e-12.
inline std::array<double, 4> hermite_shape(double xi, int derivative_order) {
  check_parameter_domain(xi);
  if (derivative_order < 0 || derivative_order > 2) {
    throw DomainError("hermite_shape: derivative order must be 0, 1 or 2");
  }
  return hermite_shape_unchecked(xi, derivative_order);
}

/// 3x12 interpolation matrix of the xi-derivative of given order, so that
/// r_(xi..xi) = H * dofs.
template <typename Scalar>
Matrix3x12<Scalar> hermite_matrix(const Scalar& xi, double length, int derivative_order) {
  const auto n = hermite_shape_unchecked(xi, derivative_order);
  const Scalar half_l(0.5 * length);
  Matrix3x12<Scalar> h = Matrix3x12<Scalar>::Zero();
  for (int k = 0; k < 3; ++k) {
    h(k, k) = n[0];
    h(k, 3 + k) = half_l * n[1];
    h(k, 6 + k) = n[2];
    h(k, 9 + k) = half_l * n[3];
  }
  return h;
}

/// Evaluates the xi-derivative of the given order of the interpolated curve.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, 3, 1> hermite_eval(const Eigen::MatrixBase<Derived>& dofs, const Scalar& xi,
                                         double length, int derivative_order) {
  const auto n = hermite_shape_unchecked(xi, derivative_order);
  const Scalar half_l(0.5 * length);
  return n[0] * dofs.template segment<3>(0) + half_l * n[1] * dofs.template segment<3>(3) +
         n[2] * dofs.template segment<3>(6) + half_l * n[3] * dofs.template segment<3>(9);
}

/// Arc length of the Hermite curve defined by the dofs; the tangent scaling l
/// enters the curve itself, so this solves l = int ||r_xi(l)|| dxi by fixed
/// point iteration with 10-point Gauss quadrature.
double element_arc_length(const ElementCenterlineDofs& dofs);

/// Initial (stress-free) geometry of one element.
class ElementReferenceGeometry {
 public:
  ElementReferenceGeometry() = default;
  explicit ElementReferenceGeometry(const ElementCenterlineDofs& initial);
  ElementReferenceGeometry(const ElementCenterlineDofs& initial, double length);

  const ElementCenterlineDofs& initial() const { return initial_; }
  const Vector12<double>& initial_vector() const { return initial_vec_; }
  double length() const { return length_; }

  /// Jacobian J(xi) = ||r0_xi(xi)||.
  double jacobian(double xi) const;
  /// dJ/dxi.
  double jacobian_derivative(double xi) const;

 private:
  ElementCenterlineDofs initial_;
  Vector12<double> initial_vec_ = Vector12<double>::Zero();
  double length_ = 1.0;
};

/// Centerline position (order 0) or arc-length derivative (order 1, 2).
Eigen::Vector3d eval_centerline(const ElementCenterlineDofs& dofs, const ElementReferenceGeometry& ref,
                                double xi, int order);

/// Arc-length interpolation matrix: order 0 gives H (r = H d), order 1 gives H' (r' = H' d).
Matrix3x12<double> assemble_H(double xi, const ElementReferenceGeometry& ref, int order);

}  // namespace beamfe
