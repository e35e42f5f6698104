#include <random>

#include "beamfe/sr_element.hpp"
#include "doctest.h"

using namespace beamfe;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

std::mt19937& rng() {
  static std::mt19937 g(1234);
  return g;
}
double uni() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng()); }
Vector3d rvec(double s) { return s * Vector3d(uni(), uni(), uni()); }

CrossSection test_section() {
  CrossSection s = CrossSection::circular(0.3, 2.0, 0.85);
  s.I3 = 1.3 * s.I2;  // distinct bending stiffnesses exercise more terms
  return s;
}
const Material kMaterial{10.0, 4.0};

// Helical arc piece with triads aligned to the tangent.
struct Fixture {
  SimoReissnerElement element;
  SRElementDofs initial;
};

Fixture curved_fixture(ForceIntegration integration = ForceIntegration::ReducedLobatto) {
  auto r = [](double p) { return Vector3d(2 * std::cos(p), 2 * std::sin(p), 0.5 * p); };
  auto rp = [](double p) { return Vector3d(-2 * std::sin(p), 2 * std::cos(p), 0.5); };
  const double p0 = 0.1;
  const double p1 = 0.9;
  ElementCenterlineDofs c{r(p0), rp(p0).normalized(), r(p1), rp(p1).normalized()};
  const ElementReferenceGeometry ref(c);
  const Matrix3d seed = align_frame(Matrix3d::Identity(), c.t1);
  const Vector3d tm = eval_centerline(c, ref, 0.0, 1);
  std::array<Matrix3d, 3> triads{seed, align_frame(seed, c.t2), align_frame(seed, tm)};
  SRElementDofs dofs{c, triads};
  return {SimoReissnerElement(ref, triads, test_section(), kMaterial, integration), dofs};
}

SRElementDofs perturbed(const SRElementDofs& d, double pos, double rot) {
  SRElementDofs out = d;
  out.centerline.d1 += rvec(pos);
  out.centerline.t1 += rvec(pos);
  out.centerline.d2 += rvec(pos);
  out.centerline.t2 += rvec(pos);
  for (auto& t : out.triads) t = exp_rodrigues(rvec(rot)) * t;
  return out;
}

// Applies a perturbation h along local dof k (additive for centerline, spatial spin for triads).
SRElementDofs shifted(const SRElementDofs& d, int k, double h) {
  SRElementDofs out = d;
  for (int c = 0; c < 12; ++c) {
    if (sr_centerline_index(c) == k) {
      Vector12<double> v = out.centerline.to_vector();
      v(c) += h;
      out.centerline = ElementCenterlineDofs::from_vector(v);
      return out;
    }
  }
  for (int j = 0; j < 3; ++j) {
    const int base = sr_rotation_index(j);
    if (k >= base && k < base + 3) {
      out.triads[j] = exp_rodrigues(Vector3d(h * Vector3d::Unit(k - base))) * out.triads[j];
    }
  }
  return out;
}

template <typename F>
Matrix21 fd_jacobian(F&& residual, const SRElementDofs& d, double h) {
  Matrix21 k;
  for (int c = 0; c < 21; ++c) k.col(c) = (residual(shifted(d, c, h)) - residual(shifted(d, c, -h))) / (2 * h);
  return k;
}

}  // namespace

TEST_CASE("Lagrange polynomials") {
  const auto a = lagrange3(-1.0);
  const auto b = lagrange3(1.0);
  const auto c = lagrange3(0.0);
  CHECK(a[0] == 1.0);
  CHECK(b[1] == 1.0);
  CHECK(c[2] == 1.0);
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
  for (double xi : {-0.3, 0.7}) {
    const auto l = lagrange3(xi);
    CHECK(l[0] + l[1] + l[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("triad interpolation reproduces nodes, constants and is objective") {
  auto f = curved_fixture();
  const SRElementDofs d = perturbed(f.initial, 0.0, 0.5);
  CHECK((interpolate_triads(d, -1.0).lambda - d.triads[0]).norm() < 1e-13);
  CHECK((interpolate_triads(d, 1.0).lambda - d.triads[1]).norm() < 1e-13);
  CHECK((interpolate_triads(d, 0.0).lambda - d.triads[2]).norm() < 1e-13);

  const Matrix3d star = exp_rodrigues(Vector3d(0.3, -1.2, 0.4));
  SRElementDofs constant = d;
  constant.triads = {star, star, star};
  CHECK((interpolate_triads(constant, 0.37).lambda - star).norm() < 1e-14);

  const Matrix3d R = exp_rodrigues(Vector3d(2.0, 0.1, -0.7));
  SRElementDofs rotated = d;
  for (auto& t : rotated.triads) t = R * t;
  for (double xi : {-0.6, 0.2, 0.8}) {
    const auto a = interpolate_triads(d, xi);
    const auto b = interpolate_triads(rotated, xi);
    CHECK((a.phi - b.phi).norm() < 1e-12);
    CHECK((R * a.lambda - b.lambda).norm() < 1e-12);
  }
}

TEST_CASE("strains: stress free initial state, pure stretch, curvature by finite differences") {
  auto f = curved_fixture();
  for (double xi : {-1.0, -0.4, 0.0, 0.5, 1.0}) {
    const SRStrainState s = f.element.strains(f.initial, xi);
    CHECK(s.Omega.norm() < 1e-13);
    CHECK(s.Gamma.norm() < 1e-13);
  }
  CHECK(f.element.internal_residual(f.initial).norm() < 1e-12);

  // Straight element stretched by 1 %.
  ElementCenterlineDofs c{Vector3d::Zero(), Vector3d::UnitX(), Vector3d(2, 0, 0), Vector3d::UnitX()};
  const ElementReferenceGeometry ref(c);
  const std::array<Matrix3d, 3> I{Matrix3d::Identity(), Matrix3d::Identity(), Matrix3d::Identity()};
  SimoReissnerElement e(ref, I, test_section(), kMaterial);
  SRElementDofs stretched{c, I};
  stretched.centerline.d2 = Vector3d(2.02, 0, 0);
  stretched.centerline.t1 *= 1.01;
  stretched.centerline.t2 *= 1.01;
  const SRStrainState s = e.strains(stretched, 0.3);
  CHECK((s.Gamma - Vector3d(0.01, 0, 0)).norm() < 1e-14);
  CHECK(s.Omega.norm() < 1e-15);
  const auto [force, moment] = stress_resultants(s, test_section(), kMaterial, Matrix3d::Identity());
  CHECK(force.x() == doctest::Approx(kMaterial.E * test_section().A * 0.01));
  CHECK(moment.norm() == 0.0);

  // Curvature against a finite difference of the triad field in arc length.
  const SRElementDofs d = perturbed(f.initial, 0.05, 0.4);
  for (double xi : {-0.7, 0.1, 0.6}) {
    const double h = 1e-6;
    const Matrix3d dl = (interpolate_triads(d, xi + h).lambda - interpolate_triads(d, xi - h).lambda) / (2 * h);
    const Matrix3d lam = interpolate_triads(d, xi).lambda;
    const Vector3d omega_fd = axial(Matrix3d(lam.transpose() * dl)) / f.element.reference().jacobian(xi);
    const SRStrainState s0 = f.element.strains(f.initial, xi);
    const double j = f.element.reference().jacobian(xi);
    const Vector3d omega0 =
        axial(Matrix3d(interpolate_triads(f.initial, xi).lambda.transpose() *
                       (interpolate_triads(f.initial, xi + h).lambda - interpolate_triads(f.initial, xi - h).lambda) /
                       (2 * h))) /
        j;
    CHECK((f.element.strains(d, xi).Omega - (omega_fd - omega0)).norm() < 1e-6);
    CHECK(s0.Omega.norm() < 1e-13);
  }
}

TEST_CASE("stress resultant norm is invariant under rotation of the triad") {
  SRStrainState s{rvec(1.0), rvec(1.0)};
  const Matrix3d R = exp_rodrigues(rvec(2.0));
  const auto a = stress_resultants(s, test_section(), kMaterial, Matrix3d::Identity());
  const auto b = stress_resultants(s, test_section(), kMaterial, R);
  CHECK(a.first.norm() == doctest::Approx(b.first.norm()).epsilon(1e-14));
  CHECK(a.second.norm() == doctest::Approx(b.second.norm()).epsilon(1e-14));
}

TEST_CASE("residual is the energy gradient") {
  auto f = curved_fixture();
  // Translational rows at a general state.
  const SRElementDofs d = perturbed(f.initial, 0.1, 0.3);
  const Vector21 r = f.element.internal_residual(d);
  const double h = 1e-6;
  for (int c = 0; c < 12; ++c) {
    const int k = sr_centerline_index(c);
    const double fd =
        (f.element.strain_energy(shifted(d, k, h)) - f.element.strain_energy(shifted(d, k, -h))) / (2 * h);
    CHECK(fd == doctest::Approx(r(k)).epsilon(1e-6).scale(r.norm()));
  }
  // Rotational rows when all relative nodal rotations vanish (the test
  // functions then coincide with the interpolation of the spin field).
  SRElementDofs equal = perturbed(f.initial, 0.1, 0.0);
  equal.triads = {equal.triads[1], equal.triads[1], equal.triads[1]};
  const Vector21 re = f.element.internal_residual(equal);
  for (int k = 0; k < 21; ++k) {
    const double fd =
        (f.element.strain_energy(shifted(equal, k, h)) - f.element.strain_energy(shifted(equal, k, -h))) / (2 * h);
    CHECK(fd == doctest::Approx(re(k)).epsilon(1e-6).scale(re.norm()));
  }
}

TEST_CASE("residual invariances and momentum balance") {
  auto f = curved_fixture();
  const SRElementDofs d = perturbed(f.initial, 0.1, 0.3);
  const Vector21 r = f.element.internal_residual(d);
  SRElementDofs moved = d;
  moved.centerline.d1 += Vector3d(3, -1, 2);
  moved.centerline.d2 += Vector3d(3, -1, 2);
  CHECK((f.element.internal_residual(moved) - r).norm() < 1e-12 * r.norm());

  // Sum of forces and of moments about the origin vanish.
  Vector3d force = r.segment<3>(0) + r.segment<3>(9);
  Vector3d moment = d.centerline.d1.cross(r.segment<3>(0)) + d.centerline.d2.cross(r.segment<3>(9)) +
                    d.centerline.t1.cross(r.segment<3>(3)) + d.centerline.t2.cross(r.segment<3>(12)) +
                    r.segment<3>(6) + r.segment<3>(15) + r.segment<3>(18);
  CHECK(force.norm() < 1e-10 * r.norm());
  CHECK(moment.norm() < 1e-10 * r.norm());

  // Objectivity of the stored energy.
  const Matrix3d R = exp_rodrigues(Vector3d(0.4, -2.1, 1.0));
  SRElementDofs rot = d;
  rot.centerline = {R * d.centerline.d1, R * d.centerline.t1, R * d.centerline.d2, R * d.centerline.t2};
  for (auto& t : rot.triads) t = R * t;
  CHECK(f.element.strain_energy(rot) == doctest::Approx(f.element.strain_energy(d)).epsilon(1e-10));
}

TEST_CASE("consistent stiffness matches finite differences of the residual") {
  for (auto integration : {ForceIntegration::ReducedLobatto, ForceIntegration::FullGauss}) {
    auto f = curved_fixture(integration);
    for (int trial = 0; trial < 10; ++trial) {
      const SRElementDofs d = perturbed(f.initial, 0.2, 0.6);
      const Matrix21 k = f.element.tangent_stiffness(d);
      const Matrix21 kfd = fd_jacobian([&](const SRElementDofs& x) { return f.element.internal_residual(x); }, d, 1e-6);
      CHECK((k - kfd).norm() / kfd.norm() < 1e-5);
    }
  }
}

TEST_CASE("straight element stiffness is positive definite once rigid modes are removed") {
  ElementCenterlineDofs c{Vector3d::Zero(), Vector3d::UnitX(), Vector3d(1.5, 0, 0), Vector3d::UnitX()};
  const std::array<Matrix3d, 3> I{Matrix3d::Identity(), Matrix3d::Identity(), Matrix3d::Identity()};
  SimoReissnerElement e(ElementReferenceGeometry(c), I, test_section(), kMaterial);
  const Matrix21 k = e.tangent_stiffness(SRElementDofs{c, I});
  CHECK((k - k.transpose()).norm() < 1e-12 * k.norm());
  // Clamp node 1 (position, tangent, triad).
  const Eigen::MatrixXd kr = k.bottomRightCorner(12, 12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kr);
  // One zero-energy mode remains: the tangent length at node 2 with no axial work is not a mode,
  // so all eigenvalues must be positive.
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("rotational inertia: zero state, torque-free axial spin, consistent linearization") {
  auto f = curved_fixture();
  InertiaCoefficients c;
  c.dt = 0.05;
  const double rho_inf = 0.7;
  c.alpha_m = (2 * rho_inf - 1) / (rho_inf + 1);
  c.alpha_f = rho_inf / (rho_inf + 1);
  c.gamma = 0.5 - c.alpha_m + c.alpha_f;
  c.beta = 0.25 * std::pow(1 - c.alpha_m + c.alpha_f, 2);

  // At rest with no motion the inertia residual vanishes.
  const auto hist0 = f.element.initial_rotational_history(f.initial);
  Vector21 r;
  Matrix21 k;
  f.element.evaluate_rotational_inertia(f.initial, hist0, c, &r, &k);
  CHECK(r.norm() < 1e-14);

  // Circular section spinning about g1 with A = 0: m_rho = -Lambda(W x C W) = 0.
  ElementCenterlineDofs cl{Vector3d::Zero(), Vector3d::UnitX(), Vector3d(1, 0, 0), Vector3d::UnitX()};
  const std::array<Matrix3d, 3> I{Matrix3d::Identity(), Matrix3d::Identity(), Matrix3d::Identity()};
  SimoReissnerElement round(ElementReferenceGeometry(cl), I, CrossSection::circular(0.2, 1.0), kMaterial);
  for (const auto& gp : round.initial_rotational_history(SRElementDofs{cl, I}, Vector3d(3.0, 0, 0))) {
    const Matrix3d C = rotational_inertia(round.section()).asDiagonal();
    CHECK((gp.W.cross(C * gp.W) + C * gp.A).norm() < 1e-14);
  }

  // Linearization against finite differences of the time-discrete residual.
  auto hist = f.element.initial_rotational_history(f.initial, Vector3d(0.4, -0.3, 0.8));
  for (auto& gp : hist) {
    gp.A = rvec(1.0);
    gp.Amod = rvec(1.0);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const SRElementDofs d = perturbed(f.initial, 0.0, 0.05);
    f.element.evaluate_rotational_inertia(d, hist, c, &r, &k);
    auto res = [&](const SRElementDofs& x) {
      Vector21 out;
      f.element.evaluate_rotational_inertia(x, hist, c, &out, nullptr);
      return out;
    };
    const Matrix21 kfd = fd_jacobian(res, d, 1e-6);
    CHECK((k - kfd).norm() / kfd.norm() < 1e-5);
  }
}
