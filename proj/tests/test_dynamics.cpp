#include <cmath>

#include "beamfe/contact.hpp"
#include "beamfe/simulation.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace beamfe;
using Eigen::Vector3d;
using testing_support::straight_fiber;
using testing_support::uniform_velocity;

namespace {

DynamicsConfig dyn(double rho, double dt) { return {true, rho, dt}; }

// Tip positions at every multiple of `sample` up to t_end.
std::vector<Vector3d> tip_history(const Model& m, const Eigen::VectorXd* v0, double rho, double dt, double t_end,
                                  double sample = 0.05) {
  SolverConfig cfg;
  cfg.tol_res = 1e-8;
  cfg.tol_disp = 1e-12;
  Simulation sim(m, ContactModel{}, cfg, dyn(rho, dt));
  if (v0) sim.set_velocity(*v0);
  const int tip = m.nodes()[m.fibers()[0].nodes.back()].centerline;
  std::vector<Vector3d> out;
  sim.run(t_end, [&](const Simulation& s, int) {
    const double k = s.time() / sample;
    if (std::abs(k - std::round(k)) < 1e-9) out.push_back(s.state().q.segment<3>(tip));
  });
  return out;
}

double max_error(const std::vector<Vector3d>& a, const std::vector<Vector3d>& b) {
  REQUIRE(a.size() == b.size());
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).norm());
  return e;
}

}  // namespace

TEST_CASE("generalized-alpha parameters from the spectral radius") {
  const GenAlphaParams p1 = params_from_rho(1.0, 0.1);
  CHECK(p1.alpha_m == doctest::Approx(0.5));
  CHECK(p1.alpha_f == doctest::Approx(0.5));
  CHECK(p1.gamma == doctest::Approx(0.5));
  CHECK(p1.beta == doctest::Approx(0.25));
  const GenAlphaParams p95 = params_from_rho(0.95, 0.1);
  CHECK(p95.alpha_f == doctest::Approx(0.95 / 1.95));
  CHECK(p95.alpha_m == doctest::Approx(0.9 / 1.95));
  CHECK(p95.alpha_f == doctest::Approx(0.4872).epsilon(1e-4));
  CHECK(p95.alpha_m == doctest::Approx(0.4615).epsilon(1e-4));
  const GenAlphaParams p0 = params_from_rho(0.0, 0.1);
  CHECK(p0.alpha_m == doctest::Approx(-1.0));
  CHECK(p0.alpha_f == doctest::Approx(0.0));
  CHECK_THROWS_AS(params_from_rho(1.5, 0.1), DomainError);
}

TEST_CASE("torsion-free dynamics: rigid translation and energy") {
  Model m(ElementType::TorsionFree);
  const CrossSection s = CrossSection::circular(0.05, 2.0);
  m.add_fiber(straight_fiber(2, 1.0, Vector3d::Zero(), Vector3d::UnitX()), s, {1e4, 5e3});
  const Vector3d v(0.3, -0.4, 1.2);
  const Eigen::VectorXd v0 = uniform_velocity(m, v);
  Simulation sim(m, ContactModel{}, SolverConfig{}, dyn(0.8, 0.1));
  sim.set_velocity(v0);
  sim.run(1.0);
  const ModelState ref = m.reference_state();
  for (const auto& n : m.nodes()) {
    CHECK((sim.state().q.segment<3>(n.centerline) - ref.q.segment<3>(n.centerline) - v).norm() < 1e-12);
  }
  const double expected = 0.5 * s.rho * s.A * 1.0 * v.squaredNorm();
  CHECK(sim.energies().kinetic == doctest::Approx(expected).epsilon(1e-12));
  CHECK(sim.energies().total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("energies of trivial states") {
  Model m(ElementType::SimoReissner);
  const CrossSection s = CrossSection::circular(0.05, 3.0);
  m.add_fiber(straight_fiber(3, 2.0, Vector3d(1, 2, 3), Vector3d(1, 1, 0)), s, {1e4, 5e3});
  Simulation rest(m, ContactModel{}, SolverConfig{}, dyn(1.0, 0.1));
  rest.initialize_dynamics();
  const Energies e = rest.energies();
  CHECK(e.kinetic == 0.0);
  CHECK(e.internal == doctest::Approx(0.0).scale(1e-20));
  CHECK(e.contact == 0.0);
  CHECK(e.total == doctest::Approx(0.0).scale(1e-20));

  Simulation moving(m, ContactModel{}, SolverConfig{}, dyn(1.0, 0.1));
  const Vector3d v(0.5, 0.0, -2.0);
  moving.set_velocity(uniform_velocity(m, v));
  moving.initialize_dynamics();
  CHECK(moving.energies().kinetic == doctest::Approx(0.5 * s.rho * s.A * 2.0 * v.squaredNorm()).epsilon(1e-12));

  // Stationary without velocity and loads.
  rest.run(0.5);
  CHECK((rest.state().q - m.reference_state().q).norm() == 0.0);
}

TEST_CASE("penalty energy of a penetrating pair matches a dense quadrature") {
  Model m(ElementType::TorsionFree);
  const double R = 0.05;
  const CrossSection s = CrossSection::circular(R, 1.0);
  m.add_fiber(straight_fiber(1, 1.0, Vector3d::Zero(), Vector3d::UnitX()), s, {1e4, 5e3});
  // Master slightly tilted in the x-y plane; the gap is negative along the whole slave.
  const Vector3d a(-0.5, 2 * R - 0.02, 0);
  const Vector3d b(1.5, 2 * R - 0.01, 0);
  m.add_fiber(straight_fiber(1, (b - a).norm(), a, b - a), s, {1e4, 5e3});
  ContactModel c;
  c.enabled = true;
  c.settings.formulation = ContactFormulation::Line;
  c.settings.line_law = {PenaltyVariant::Linear, 300.0, 0.0};
  c.settings.n_segments = 2;
  c.settings.n_gauss_per_segment = 3;
  Simulation sim(m, c, SolverConfig{});
  const double energy = sim.last_output().contact_energy;
  const HermiteCurve master{m.centerline(1, m.reference_state()).to_vector(), m.reference(1).length()};
  const int n = 20000;
  double oracle = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const ClosestPointResult cp = closest_point_unilateral(Vector3d(x, 0, 0), master);
    const double g = std::min(cp.distance - 2 * R, 0.0);
    oracle += (i == 0 || i == n ? 0.5 : 1.0) * 0.5 * 300.0 * g * g / n;
  }
  CHECK(energy == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("torsion-free axial oscillator converges with second order") {
  Model m(ElementType::TorsionFree);
  m.add_fiber(straight_fiber(1, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.1, 1.0),
              {1.0, 0.5});
  m.fix_centerline(0, {true, true, true, true, true, true});
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(m.n_raw());
  v0(m.nodes()[1].centerline) = 0.01;
  const double t_end = 2.0;
  const auto ref = tip_history(m, &v0, 1.0, 0.05 / 512, t_end);
  const double e1 = max_error(tip_history(m, &v0, 1.0, 0.05 / 4, t_end), ref);
  const double e2 = max_error(tip_history(m, &v0, 1.0, 0.05 / 8, t_end), ref);
  const double e3 = max_error(tip_history(m, &v0, 1.0, 0.05 / 16, t_end), ref);
  MESSAGE("axial oscillator errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e2 / e3 < 4.5);
}

TEST_CASE("torsion-free swinging beam conserves energy with rho_inf = 1") {
  Model m(ElementType::TorsionFree);
  m.add_fiber(straight_fiber(2, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.05, 1.0),
              {1e4, 5e3});
  m.fix_centerline(0, {true, true, true, false, false, false});
  // Rigid rotation about the pinned end with angular velocity 1 about z.
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(m.n_raw());
  const ModelState ref = m.reference_state();
  for (const auto& n : m.nodes()) {
    v0.segment<3>(n.centerline) = Vector3d::UnitZ().cross(Vector3d(ref.q.segment<3>(n.centerline)));
    v0.segment<3>(n.centerline + 3) = Vector3d::UnitZ().cross(Vector3d(ref.q.segment<3>(n.centerline + 3)));
  }
  SolverConfig cfg;
  cfg.tol_res = 1e-9;
  Simulation sim(m, ContactModel{}, cfg, dyn(1.0, 1e-3));
  sim.set_velocity(v0);
  sim.initialize_dynamics();
  const double e0 = sim.energies().total;
  double drift = 0.0;
  sim.run(1.0, [&](const Simulation& s, int) { drift = std::max(drift, std::abs(s.energies().total - e0) / e0); });
  MESSAGE("energy drift " << drift);
  CHECK(drift < 1e-3);
  // The beam has swung by about one radian.
  const Vector3d tip = sim.state().q.segment<3>(m.nodes()[2].centerline);
  CHECK(std::atan2(tip.y(), tip.x()) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("Simo-Reissner torque-free axial spin") {
  Model m(ElementType::SimoReissner);
  m.add_fiber(straight_fiber(1, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.1, 1.0),
              {1e3, 5e2});
  SolverConfig cfg;
  cfg.tol_res = 1e-10;
  cfg.tol_disp = 1e-12;
  Simulation sim(m, ContactModel{}, cfg, dyn(0.9, 0.01));
  const double w = 1.0;
  sim.set_angular_velocity(0, Vector3d(w, 0, 0));
  sim.run(1.0);
  for (const RotationalGaussPointState& gp : sim.dynamic_state().rotational[0]) {
    CHECK((gp.W - Vector3d(w, 0, 0)).norm() < 1e-8);
  }
  const Eigen::Matrix3d expected = exp_rodrigues(Vector3d(w * 1.0, 0, 0)) * m.reference_state().triads[0];
  CHECK((sim.state().triads[0] - expected).norm() < 1e-8);
  CHECK((sim.state().q - m.reference_state().q).norm() < 1e-10);
}

TEST_CASE("start-up accelerations are consistent") {
  for (ElementType type : {ElementType::TorsionFree, ElementType::SimoReissner}) {
    Model m(type);
    // Soft material: the highest excited frequency times dt stays far below one.
    m.add_fiber(straight_fiber(3, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.05, 1.0),
                {1e-2, 5e-3});
    m.fix_centerline(0, {true, true, true, false, true, true});
    m.fix_rotation(0, {true, true, true});
    const Vector3d f(0.0, 2e-7, 1e-7);
    const Vector3d mo = type == ElementType::SimoReissner ? Vector3d(3e-8, 0.0, 2e-8) : Vector3d(0.0, 0.0, 2e-8);
    m.add_load({3, f, mo, Schedule::constant(1.0)});
    SolverConfig cfg;
    // The inertia term amplifies round-off in the tiny increment; the residual
    // tolerance sits just above that floor.
    cfg.tol_res = 1e-9;
    cfg.tol_disp = 1e-14;
    cfg.max_iter = 20;
    const double dt = 1e-4;
    Simulation sim(m, ContactModel{}, cfg, dyn(1.0, dt));
    sim.initialize_dynamics();
    const Eigen::VectorXd a0 = sim.dynamic_state().a;
    std::vector<Vector3d> A0;
    if (type == ElementType::SimoReissner) {
      for (const auto& gp : sim.dynamic_state().rotational[1]) A0.push_back(gp.A);
    }
    const ModelState start = sim.state();
    const std::vector<Eigen::Matrix3d> gp_start = [&] {
      std::vector<Eigen::Matrix3d> out;
      if (type == ElementType::SimoReissner)
        for (const auto& gp : sim.dynamic_state().rotational[1]) out.push_back(gp.lambda);
      return out;
    }();
    sim.step(dt);
    // Starting from rest, x(dt) - x(0) = a0 dt^2 / 2 + O(dt^3).
    const Eigen::VectorXd a_fd = 2.0 * (sim.state().q - start.q) / (dt * dt);
    CHECK((a_fd - a0).norm() < 1e-3 * a0.norm());
    for (std::size_t q = 0; q < A0.size(); ++q) {
      const Vector3d theta = log_rotation(gp_start[q].transpose() * sim.dynamic_state().rotational[1][q].lambda);
      CHECK((2.0 * theta / (dt * dt) - A0[q]).norm() < 1e-3 * A0[q].norm());
    }
  }
}

TEST_CASE("Simo-Reissner transient bending converges with second order") {
  Model m(ElementType::SimoReissner);
  m.add_fiber(straight_fiber(4, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.05, 1.0),
              {1e3, 5e2});
  m.fix_centerline(0, {true, true, true, true, true, true});
  m.fix_rotation(0, {true, true, true});
  m.add_load({4, Vector3d(0, 0.002, 0.001), Vector3d::Zero(), Schedule::ramp(0.0, 0.5)});
  const double t_end = 1.0;
  const auto ref = tip_history(m, nullptr, 0.8, 0.05 / 512, t_end);
  const double e1 = max_error(tip_history(m, nullptr, 0.8, 0.05 / 8, t_end), ref);
  const double e2 = max_error(tip_history(m, nullptr, 0.8, 0.05 / 16, t_end), ref);
  const double e3 = max_error(tip_history(m, nullptr, 0.8, 0.05 / 32, t_end), ref);
  MESSAGE("bending errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  CHECK(e2 / e3 > 3.5);
  CHECK(e2 / e3 < 4.5);
}
