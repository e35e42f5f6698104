#pragma once

// SO(3) primitives: skew map, Rodrigues exponential, logarithm and the
// tangent operator of the exponential map. All functions are templated on the
// scalar so that they can be evaluated with automatic-differentiation types.

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace beamfe {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Skew-symmetric matrix S(a) with S(a) b = a x b.
template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> s;
  s << Scalar(0), -a(2), a(1),
       a(2), Scalar(0), -a(0),
       -a(1), a(0), Scalar(0);
  return s;
}

/// Axial vector of the skew part of m.
template <typename Derived>
Vector3<typename Derived::Scalar> axial(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return Vector3<Scalar>(Scalar(0.5) * (m(2, 1) - m(1, 2)),
                         Scalar(0.5) * (m(0, 2) - m(2, 0)),
                         Scalar(0.5) * (m(1, 0) - m(0, 1)));
}

namespace detail {

// Below this angle the trigonometric coefficients switch to truncated series.
inline constexpr double kSmallAngle = 1e-4;

// Coefficients of I + a S + b S^2 forms:
//   c1 = sin(t)/t, c2 = (1-cos t)/t^2, c3 = (t - sin t)/t^3.
template <typename Scalar>
void rodrigues_coefficients(const Scalar& theta2, Scalar& c1, Scalar& c2, Scalar& c3) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (theta2 < Scalar(kSmallAngle * kSmallAngle)) {
    c1 = Scalar(1) - theta2 / Scalar(6) + theta2 * theta2 / Scalar(120);
    c2 = Scalar(0.5) - theta2 / Scalar(24) + theta2 * theta2 / Scalar(720);
    c3 = Scalar(1.0 / 6.0) - theta2 / Scalar(120) + theta2 * theta2 / Scalar(5040);
    return;
  }
  const Scalar theta = sqrt(theta2);
  const Scalar s = sin(theta);
  const Scalar c = cos(theta);
  c1 = s / theta;
  c2 = (Scalar(1) - c) / theta2;
  c3 = (theta - s) / (theta2 * theta);
}

}  // namespace detail

/// Rotation matrix exp(S(psi)) via the Rodrigues formula.
template <typename Derived>
Matrix3<typename Derived::Scalar> exp_rodrigues(const Eigen::MatrixBase<Derived>& psi) {
  using Scalar = typename Derived::Scalar;
  Scalar c1, c2, c3;
  detail::rodrigues_coefficients<Scalar>(psi.squaredNorm(), c1, c2, c3);
  const Matrix3<Scalar> s = skew(psi);
  return Matrix3<Scalar>::Identity() + c1 * s + c2 * s * s;
}

/// Tangent operator T(psi) = I - (1-cos t)/t^2 S(psi) + (t - sin t)/t^3 S(psi)^2.
///
/// Maps additive rotation-vector increments to material spin increments:
///   exp(psi)^T d exp(psi) = S(T(psi) dpsi).
/// The spatial spin is T(psi)^T dpsi = T(-psi) dpsi.
template <typename Derived>
Matrix3<typename Derived::Scalar> tangent_operator(const Eigen::MatrixBase<Derived>& psi) {
  using Scalar = typename Derived::Scalar;
  Scalar c1, c2, c3;
  detail::rodrigues_coefficients<Scalar>(psi.squaredNorm(), c1, c2, c3);
  const Matrix3<Scalar> s = skew(psi);
  return Matrix3<Scalar>::Identity() - c2 * s + c3 * s * s;
}

/// Inverse of tangent_operator in closed form.
template <typename Derived>
Matrix3<typename Derived::Scalar> tangent_operator_inverse(const Eigen::MatrixBase<Derived>& psi) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  using std::tan;
  const Scalar theta2 = psi.squaredNorm();
  Scalar d;
  if (theta2 < Scalar(detail::kSmallAngle * detail::kSmallAngle)) {
    d = Scalar(1.0 / 12.0) + theta2 / Scalar(720) + theta2 * theta2 / Scalar(30240);
  } else {
    const Scalar theta = sqrt(theta2);
    d = (Scalar(1) - theta / (Scalar(2) * tan(theta / Scalar(2)))) / theta2;
  }
  const Matrix3<Scalar> s = skew(psi);
  return Matrix3<Scalar>::Identity() + Scalar(0.5) * s + d * s * s;
}

struct RotationLog {
  Eigen::Vector3d psi = Eigen::Vector3d::Zero();
  // True when the angle is within 1e-9 of pi and the axis sign was chosen by
  // convention (largest-magnitude axis component made positive).
  bool at_pi = false;
};

/// Logarithm of a proper orthogonal matrix with ||psi|| <= pi, reporting the
/// angle-at-pi ambiguity.
RotationLog log_rotation_checked(const Eigen::Matrix3d& lambda);

/// Logarithm of a proper orthogonal matrix; canonical representative with ||psi|| <= pi.
inline Eigen::Vector3d log_rotation(const Eigen::Matrix3d& lambda) {
  return log_rotation_checked(lambda).psi;
}

/// Unit quaternion (w, x, y, z) of a rotation matrix; used by log_rotation.
Eigen::Vector4d quaternion_from_matrix(const Eigen::Matrix3d& lambda);

/// Smallest rotation taking unit vector a onto unit vector b.
Eigen::Matrix3d smallest_rotation(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Frame whose first base vector is the unit tangent, obtained from the seed
/// frame by the smallest rotation of its first column onto the tangent.
Eigen::Matrix3d align_frame(const Eigen::Matrix3d& seed, const Eigen::Vector3d& tangent);

/// Residual max|R^T R - I| and |det R - 1|, whichever is larger.
double orthogonality_residual(const Eigen::Matrix3d& lambda);

}  // namespace beamfe
