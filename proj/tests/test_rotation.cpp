#include <random>

#include "beamfe/rotation.hpp"
#include "doctest.h"

using namespace beamfe;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

Vector3d random_vector(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return scale * Vector3d(u(rng), u(rng), u(rng));
}

// Rodrigues oracle through Eigen's angle-axis conversion.
Matrix3d angle_axis(const Vector3d& psi) {
  const double t = psi.norm();
  if (t == 0.0) return Matrix3d::Identity();
  return Eigen::AngleAxisd(t, psi / t).toRotationMatrix();
}

}  // namespace

TEST_CASE("skew and axial are inverse") {
  const Vector3d a(1.0, -2.0, 3.0);
  const Vector3d b(0.3, 0.7, -0.1);
  CHECK((skew(a) * b - a.cross(b)).norm() < 1e-15);
  CHECK((axial(skew(a)) - a).norm() < 1e-15);
}

TEST_CASE("exp of pi/2 about z") {
  const Matrix3d r = exp_rodrigues(Vector3d(0, 0, std::acos(-1.0) / 2));
  Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("exp matches angle-axis and log inverts it") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const double scale = (i % 4 == 0) ? 1e-6 : 3.0;
    Vector3d psi = random_vector(rng, scale);
    if (psi.norm() > 3.1) psi *= 3.1 / psi.norm();
    const Matrix3d r = exp_rodrigues(psi);
    CHECK((r - angle_axis(psi)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(orthogonality_residual(r) < 1e-14);
    CHECK((log_rotation(r) - psi).norm() < 1e-12 * std::max(1.0, psi.norm()));
  }
}

TEST_CASE("log at exactly pi uses the positive-largest-component convention") {
  const double pi = std::acos(-1.0);
  const Vector3d axis = Vector3d(-0.2, -0.9, 0.1).normalized();
  const RotationLog lg = log_rotation_checked(angle_axis(pi * axis));
  CHECK(lg.at_pi);
  CHECK(std::abs(lg.psi.norm() - pi) < 1e-12);
  CHECK((lg.psi / pi + axis).norm() < 1e-8);
  CHECK((exp_rodrigues(lg.psi) - angle_axis(pi * axis)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tangent operator maps increments to material spin") {
  std::mt19937 rng(11);
  for (int i = 0; i < 40; ++i) {
    const Vector3d psi = random_vector(rng, i % 5 == 0 ? 1e-5 : 2.0);
    const Vector3d dpsi = random_vector(rng, 1.0);
    const double h = 1e-6;
    const Matrix3d d = (exp_rodrigues(Vector3d(psi + h * dpsi)) - exp_rodrigues(Vector3d(psi - h * dpsi))) / (2 * h);
    const Vector3d spin = axial(Matrix3d(exp_rodrigues(psi).transpose() * d));
    CHECK((spin - tangent_operator(psi) * dpsi).norm() < 1e-8);
    const Vector3d spatial = axial(Matrix3d(d * exp_rodrigues(psi).transpose()));
    CHECK((spatial - tangent_operator(psi).transpose() * dpsi).norm() < 1e-8);
    CHECK((tangent_operator(psi) * tangent_operator_inverse(psi) - Matrix3d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("smallest rotation") {
  const Vector3d a = Vector3d(1, 2, 3).normalized();
  for (const Vector3d& b : {Vector3d(Vector3d(-1, 0.5, 2).normalized()), a, Vector3d(-a)}) {
    const Matrix3d r = smallest_rotation(a, b);
    CHECK((r * a - b).norm() < 1e-14);
    CHECK(orthogonality_residual(r) < 1e-14);
  }
}
