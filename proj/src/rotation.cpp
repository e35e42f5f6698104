#include "beamfe/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beamfe {

Eigen::Vector4d quaternion_from_matrix(const Eigen::Matrix3d& r) {
  // Spurrier's algorithm: branch on the largest of trace and diagonal.
  Eigen::Vector4d q;
  const double trace = r.trace();
  const double m = std::max({trace, r(0, 0), r(1, 1), r(2, 2)});
  if (m == trace) {
    const double s = std::sqrt(1.0 + trace) * 2.0;
    q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s;
  } else if (m == r(0, 0)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s;
  } else if (m == r(1, 1)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s;
  }
  q.normalize();
  if (q(0) < 0.0) q = -q;
  return q;
}

RotationLog log_rotation_checked(const Eigen::Matrix3d& lambda) {
  const Eigen::Vector4d q = quaternion_from_matrix(lambda);
  const Eigen::Vector3d v = q.tail<3>();
  const double vn = v.norm();
  RotationLog out;
  if (vn < 1e-300) return out;
  const double angle = 2.0 * std::atan2(vn, q(0));
  out.psi = (angle / vn) * v;
  if (std::abs(angle - std::numbers::pi) < 1e-9) {
    out.at_pi = true;
    Eigen::Index imax = 0;
    out.psi.cwiseAbs().maxCoeff(&imax);
    if (out.psi(imax) < 0.0) out.psi = -out.psi;
  }
  return out;
}

Eigen::Matrix3d smallest_rotation(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ua = a.normalized();
  const Eigen::Vector3d ub = b.normalized();
  const Eigen::Vector3d axis = ua.cross(ub);
  const double s = axis.norm();
  const double c = ua.dot(ub);
  if (s < 1e-14) {
    if (c > 0.0) return Eigen::Matrix3d::Identity();
    // Antiparallel: rotate by pi about any axis perpendicular to a.
    Eigen::Vector3d perp = ua.unitOrthogonal();
    return exp_rodrigues(Eigen::Vector3d(std::numbers::pi * perp));
  }
  return exp_rodrigues(Eigen::Vector3d(std::atan2(s, c) / s * axis));
}

double orthogonality_residual(const Eigen::Matrix3d& lambda) {
  const double ortho = (lambda.transpose() * lambda - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(lambda.determinant() - 1.0));
}

Eigen::Matrix3d align_frame(const Eigen::Matrix3d& seed, const Eigen::Vector3d& tangent) {
  return smallest_rotation(seed.col(0).normalized(), tangent.normalized()) * seed;
}

}  // namespace beamfe
