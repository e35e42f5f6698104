#include <random>

#include "beamfe/hermite.hpp"
#include "doctest.h"

using namespace beamfe;
using Eigen::Vector3d;

TEST_CASE("shape functions at the nodes and the midpoint") {
  const auto a = hermite_shape(-1.0, 0);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(0.0));
  CHECK(a[2] == doctest::Approx(0.0));
  CHECK(a[3] == doctest::Approx(0.0));
  const auto m = hermite_shape(0.0, 0);
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[2] == doctest::Approx(0.5));
  CHECK(m[1] == doctest::Approx(0.25));
  CHECK(m[3] == doctest::Approx(-0.25));
  for (double xi = -1.0; xi <= 1.0; xi += 0.125) {
    const auto n = hermite_shape(xi, 0);
    CHECK(n[0] + n[2] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(hermite_shape(1.0 + 1e-9, 0), DomainError);
  CHECK_NOTHROW(hermite_shape(1.0 + 1e-13, 0));
}

TEST_CASE("shape derivatives match finite differences") {
  for (double xi = -0.9; xi <= 0.9; xi += 0.3) {
    const double h = 1e-6;
    for (int order = 0; order < 2; ++order) {
      const auto p = hermite_shape(xi + h, order);
      const auto m = hermite_shape(xi - h, order);
      const auto d = hermite_shape(xi, order + 1);
      for (int i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx((p[i] - m[i]) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("straight element reproduces the line") {
  ElementCenterlineDofs d{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(1, 0, 0), Vector3d(1, 0, 0)};
  const ElementReferenceGeometry ref(d);
  CHECK(ref.length() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((eval_centerline(d, ref, 0.0, 0) - Vector3d(0.5, 0, 0)).norm() < 1e-15);
  CHECK((eval_centerline(d, ref, 0.0, 1) - Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK(eval_centerline(d, ref, 0.0, 2).norm() < 1e-14);
  CHECK((eval_centerline(d, ref, -1.0, 0) - d.d1).norm() < 1e-15);
  CHECK((eval_centerline(d, ref, -1.0, 1) - d.t1).norm() < 1e-15);
}

TEST_CASE("cubic curve is reproduced exactly") {
  // r(xi) = a0 + a1 xi + a2 xi^2 + a3 xi^3, sampled into Hermite dofs with tangent scaling l.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector3d a[4];
    for (auto& v : a) v = Vector3d(u(rng), u(rng), u(rng));
    a[1] += Vector3d(3, 0, 0);
    auto r = [&](double x) { return Vector3d(a[0] + a[1] * x + a[2] * x * x + a[3] * x * x * x); };
    auto rx = [&](double x) { return Vector3d(a[1] + 2 * a[2] * x + 3 * a[3] * x * x); };
    const double l = 2.7;
    ElementCenterlineDofs d{r(-1), rx(-1) * 2.0 / l, r(1), rx(1) * 2.0 / l};
    const ElementReferenceGeometry ref(d, l);
    for (double xi : {-0.7, 0.0, 0.31, 0.9}) {
      CHECK((eval_centerline(d, ref, xi, 0) - r(xi)).norm() < 1e-12);
      const Matrix3x12<double> h = assemble_H(xi, ref, 0);
      CHECK((h * d.to_vector() - eval_centerline(d, ref, xi, 0)).norm() < 1e-14);
      const Matrix3x12<double> h1 = assemble_H(xi, ref, 1);
      CHECK((h1 * d.to_vector() - eval_centerline(d, ref, xi, 1)).norm() < 1e-13);
    }
  }
}

TEST_CASE("H matrix identity blocks at the ends") {
  ElementCenterlineDofs d{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(2, 0, 0), Vector3d(1, 0, 0)};
  const ElementReferenceGeometry ref(d);
  const auto h0 = assemble_H(-1.0, ref, 0);
  const auto h1 = assemble_H(1.0, ref, 0);
  CHECK((h0.block<3, 3>(0, 0) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  CHECK((h1.block<3, 3>(0, 6) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
}

TEST_CASE("arc-length derivatives of a curved element") {
  // Quarter arc: compare r' to a finite difference in arc length.
  const double R = 2.0;
  const double pi = std::acos(-1.0);
  ElementCenterlineDofs d{Vector3d(R, 0, 0), Vector3d(0, 1, 0), Vector3d(0, R, 0), Vector3d(-1, 0, 0)};
  const ElementReferenceGeometry ref(d);
  // One cubic element approximates the quarter circle to within 1 %.
  CHECK(ref.length() == doctest::Approx(R * pi / 2).epsilon(1e-2));
  // Fixed point: l equals the arc length of the curve built with l (dense trapezoid oracle).
  double arc = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double a = -1.0 + 2.0 * i / n;
    const double b = -1.0 + 2.0 * (i + 1) / n;
    arc += 0.5 * (ref.jacobian(a) + ref.jacobian(b)) * (b - a);
  }
  CHECK(ref.length() == doctest::Approx(arc).epsilon(1e-8));
  for (double xi : {-0.5, 0.2}) {
    const double h = 1e-5;
    const double ds = ref.jacobian(xi) * h;
    const Vector3d fd1 = (eval_centerline(d, ref, xi + h, 0) - eval_centerline(d, ref, xi - h, 0)) / (2 * ds);
    CHECK((fd1 - eval_centerline(d, ref, xi, 1)).norm() < 1e-8);
    // r'' as the arc-length derivative of r' along the initial curve (same as current here).
    const double ds2 = 0.5 * (ref.jacobian(xi + h) + ref.jacobian(xi - h)) * h;
    const Vector3d fd2 = (eval_centerline(d, ref, xi + h, 1) - eval_centerline(d, ref, xi - h, 1)) / (2 * ds2);
    CHECK((fd2 - eval_centerline(d, ref, xi, 2)).norm() < 1e-6);
  }
  // Rigid translation leaves derivatives unchanged.
  ElementCenterlineDofs moved = d;
  moved.d1 += Vector3d(5, -3, 1);
  moved.d2 += Vector3d(5, -3, 1);
  CHECK((eval_centerline(moved, ref, 0.3, 1) - eval_centerline(d, ref, 0.3, 1)).norm() < 1e-15);
  CHECK((eval_centerline(moved, ref, 0.3, 2) - eval_centerline(d, ref, 0.3, 2)).norm() < 1e-14);
}
