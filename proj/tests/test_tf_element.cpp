#include <random>

#include <Eigen/Eigenvalues>

#include "beamfe/rotation.hpp"
#include "beamfe/tf_element.hpp"
#include "doctest.h"

using namespace beamfe;
using Eigen::Vector3d;

namespace {

std::mt19937 gen(99);
double uni() { return std::uniform_real_distribution<double>(-1.0, 1.0)(gen); }
Vector3d rvec(double s) { return s * Vector3d(uni(), uni(), uni()); }

const CrossSection kSection = CrossSection::circular(0.05, 3.0);
const Material kMaterial{200.0, 80.0};

ElementCenterlineDofs straight(double length) {
  const Vector3d dir = Vector3d(1.0, 0.4, -0.2).normalized();
  return {Vector3d(0.1, 0.2, 0.3), dir, Vector3d(0.1, 0.2, 0.3) + length * dir, dir};
}

ElementCenterlineDofs perturbed(const ElementCenterlineDofs& c, double s) {
  return {c.d1 + rvec(s), c.t1 + rvec(s), c.d2 + rvec(s), c.t2 + rvec(s)};
}

}  // namespace

TEST_CASE("TF strains") {
  const ElementCenterlineDofs c = straight(1.2);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  for (double xi : {-1.0, 0.0, 0.4}) {
    const auto s = e.strains(c, xi);
    CHECK(std::abs(s.eps) < 1e-14);
    CHECK(s.kappa < 1e-13);
  }
  ElementCenterlineDofs stretched = c;
  stretched.d2 = c.d1 + 1.1 * (c.d2 - c.d1);
  stretched.t1 *= 1.1;
  stretched.t2 *= 1.1;
  const auto s = e.strains(stretched, 0.3);
  CHECK(s.eps == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(s.kappa < 1e-13);

  // Bending into a circular arc of radius rho: kappa close to 1/rho.
  const double rho = 2.0;
  const double phi = 1.2 / rho;
  ElementCenterlineDofs arc{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(rho * std::sin(phi), rho * (1 - std::cos(phi)), 0),
                            Vector3d(std::cos(phi), std::sin(phi), 0)};
  ElementCenterlineDofs flat{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(1.2, 0, 0), Vector3d(1, 0, 0)};
  TorsionFreeElement ef(ElementReferenceGeometry(flat), kSection, kMaterial);
  for (double xi : {-0.5, 0.0, 0.5}) CHECK(ef.strains(arc, xi).kappa == doctest::Approx(1.0 / rho).epsilon(1e-2));
}

TEST_CASE("TF applicability gates") {
  ElementCenterlineDofs curved{Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(1, 1, 0), Vector3d(0, 1, 0)};
  CHECK_THROWS_AS(TorsionFreeElement(ElementReferenceGeometry(curved), kSection, kMaterial), DomainError);
  CrossSection aniso = kSection;
  aniso.I3 *= 2;
  CHECK_THROWS_AS(TorsionFreeElement(ElementReferenceGeometry(straight(1)), aniso, kMaterial), DomainError);
}

TEST_CASE("TF residual is the energy gradient and stiffness is its symmetric Jacobian") {
  const ElementCenterlineDofs c = straight(0.8);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  CHECK(e.internal_residual(c).norm() < 1e-12);
  for (int trial = 0; trial < 10; ++trial) {
    const ElementCenterlineDofs d = perturbed(c, 0.1);
    const Vector12<double> x = d.to_vector();
    const Vector12<double> r = e.internal_residual(d);
    const Matrix12 k = e.tangent_stiffness(d);
    const double h = 1e-6;
    Vector12<double> g;
    Matrix12 kfd;
    for (int i = 0; i < 12; ++i) {
      Vector12<double> xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const auto dp = ElementCenterlineDofs::from_vector(xp);
      const auto dm = ElementCenterlineDofs::from_vector(xm);
      g(i) = (e.strain_energy(dp) - e.strain_energy(dm)) / (2 * h);
      kfd.col(i) = (e.internal_residual(dp) - e.internal_residual(dm)) / (2 * h);
    }
    CHECK((g - r).norm() / r.norm() < 1e-6);
    CHECK((kfd - k).norm() / k.norm() < 1e-5);
    CHECK((k - k.transpose()).norm() / k.norm() < 1e-10);
  }
}

TEST_CASE("TF objectivity and covariance") {
  const ElementCenterlineDofs c = straight(0.8);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  const ElementCenterlineDofs d = perturbed(c, 0.1);
  const Eigen::Matrix3d R = exp_rodrigues(Vector3d(1.1, -0.4, 2.0));
  const ElementCenterlineDofs rd{R * d.d1, R * d.t1, R * d.d2, R * d.t2};
  CHECK(e.strain_energy(rd) == doctest::Approx(e.strain_energy(d)).epsilon(1e-10));
  const Vector12<double> r = e.internal_residual(d);
  const Vector12<double> rr = e.internal_residual(rd);
  for (int b = 0; b < 4; ++b) CHECK((rr.segment<3>(3 * b) - R * r.segment<3>(3 * b)).norm() < 1e-10 * r.norm());
}

TEST_CASE("TF zero-energy modes of the stress-free straight element") {
  // Oracle-fixed count: 3 translations + 2 rotations about axes normal to the
  // element; rotation about the axis moves no dof, so it is not a mode.
  const ElementCenterlineDofs c = straight(1.0);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  const Matrix12 k = e.tangent_stiffness(c);
  Eigen::SelfAdjointEigenSolver<Matrix12> es(k);
  const double kmax = es.eigenvalues().cwiseAbs().maxCoeff();
  int zero = 0;
  for (int i = 0; i < 12; ++i) {
    CHECK(es.eigenvalues()(i) > -1e-12 * kmax);
    if (std::abs(es.eigenvalues()(i)) < 1e-10 * kmax) ++zero;
  }
  CHECK(zero == 5);
}

TEST_CASE("TF mass matrix") {
  const ElementCenterlineDofs c = straight(1.7);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  const Matrix12 m = e.mass_matrix();
  CHECK((m - m.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix12> es(m);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  // Rigid translation along one direction: total mass rho A l.
  Vector12<double> u = Vector12<double>::Zero();
  u(0) = 1.0;
  u(6) = 1.0;
  CHECK(u.dot(m * u) == doctest::Approx(kSection.rho * kSection.A * 1.7).epsilon(1e-13));
  // Dense-quadrature oracle.
  Matrix12 dense = Matrix12::Zero();
  const auto rule = gauss_legendre(12);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto h = hermite_matrix<double>(rule.points[q], 1.7, 0);
    dense += rule.weights[q] * kSection.rho * kSection.A * e.reference().jacobian(rule.points[q]) * h.transpose() * h;
  }
  CHECK((dense - m).norm() / m.norm() < 1e-12);
}

TEST_CASE("TF moment loads") {
  const ElementCenterlineDofs c = straight(1.0);
  TorsionFreeElement e(ElementReferenceGeometry(c), kSection, kMaterial);
  Vector12<double> f;
  Matrix12 kf;
  e.distributed_moment_load(c, Vector3d::Zero(), &f, &kf);
  CHECK(f.norm() == 0.0);
  CHECK_THROWS_AS(e.distributed_moment_load(c, 2.0 * c.t1, &f, &kf), TangentialMomentError);

  const Vector3d m = c.t1.unitOrthogonal() * 3.0;
  const ElementCenterlineDofs d = perturbed(c, 0.05);
  e.distributed_moment_load(d, m, &f, &kf);
  // Virtual work oracle: the load paired with a dof variation equals m dotted with
  // the integrated small rotation of the tangent.
  const Vector12<double> dx = Vector12<double>::Random();
  const double h = 1e-7;
  const auto dp = ElementCenterlineDofs::from_vector(d.to_vector() + h * dx);
  double work = 0.0;
  const auto rule = gauss_legendre(4);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double xi = rule.points[q];
    const Vector3d a = eval_centerline(d, e.reference(), xi, 1);
    const Vector3d b = eval_centerline(dp, e.reference(), xi, 1);
    work += rule.weights[q] * e.reference().jacobian(xi) * m.dot(log_rotation(smallest_rotation(a, b))) / h;
  }
  CHECK(f.dot(dx) == doctest::Approx(work).epsilon(1e-6));
  // Stiffness of the load by finite differences.
  Matrix12 kfd;
  for (int i = 0; i < 12; ++i) {
    Vector12<double> xp = d.to_vector(), xm = d.to_vector();
    xp(i) += 1e-6;
    xm(i) -= 1e-6;
    Vector12<double> fp, fm;
    e.distributed_moment_load(ElementCenterlineDofs::from_vector(xp), m, &fp, nullptr);
    e.distributed_moment_load(ElementCenterlineDofs::from_vector(xm), m, &fm, nullptr);
    kfd.col(i) = (fp - fm) / 2e-6;
  }
  CHECK((kfd - kf).norm() / kf.norm() < 1e-5);

  // Nodal moment load and its derivative.
  const Vector3d t(0.3, 1.2, -0.4);
  const Vector3d mn = t.unitOrthogonal();
  Eigen::Matrix3d dfd;
  for (int i = 0; i < 3; ++i) {
    dfd.col(i) = (nodal_moment_load(t + 1e-6 * Vector3d::Unit(i), mn) - nodal_moment_load(t - 1e-6 * Vector3d::Unit(i), mn)) / 2e-6;
  }
  CHECK((dfd - nodal_moment_load_derivative(t, mn)).norm() < 1e-8);
}
