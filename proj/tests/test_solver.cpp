#include <random>

#include "beamfe/assembly.hpp"
#include "beamfe/errors.hpp"
#include "beamfe/simulation.hpp"
#include "beamfe/solver.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace beamfe;
using Eigen::Vector3d;
using testing_support::straight_fiber;

namespace {

std::mt19937 rng(77);
double uni() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }

void perturb(const Model& m, ModelState& s, double amplitude) {
  for (int i = 0; i < m.n_raw(); ++i) {
    if (!m.is_rotational(i)) s.q(i) += amplitude * uni();
  }
  for (int n = 0; n < m.n_nodes(); ++n) {
    if (m.nodes()[n].rotation >= 0) s.triads[n] = exp_rodrigues(Vector3d(uni(), uni(), uni()) * amplitude) * s.triads[n];
  }
}

ModelState shifted(const Model& m, const ModelState& s, int raw, double h) {
  ModelState out = s;
  if (m.is_rotational(raw)) {
    const int node = m.rotation_node(raw);
    Vector3d e = Vector3d::Zero();
    e(raw - m.nodes()[node].rotation) = h;
    out.triads[node] = exp_rodrigues(e) * out.triads[node];
  } else {
    out.q(raw) += h;
  }
  return out;
}

double fd_error(const Model& m, const ModelState& s, const ContactModel& c, double h) {
  const AssemblyOutput a = assemble(m, s, 1.0, c);
  const Eigen::MatrixXd k = Eigen::MatrixXd(a.stiffness);
  Eigen::MatrixXd kfd(m.n_raw(), m.n_raw());
  for (int j = 0; j < m.n_raw(); ++j) {
    const auto rp = assemble(m, shifted(m, s, j, h), 1.0, c, {false}).residual;
    const auto rm = assemble(m, shifted(m, s, j, -h), 1.0, c, {false}).residual;
    kfd.col(j) = (rp - rm) / (2 * h);
  }
  return (kfd - k).norm() / k.norm();
}

// Two crossing fibers of three elements each; the crossing lies inside the middle elements.
Model crossing_model(ElementType type, double R, double overlap, double E = 1e6) {
  Model m(type);
  const CrossSection s = CrossSection::circular(R, 1.0);
  const Material mat{E, E / 2};
  m.add_fiber(straight_fiber(3, 2.0, Vector3d(-1, 0, 0), Vector3d::UnitX()), s, mat);
  m.add_fiber(straight_fiber(3, 2.0, Vector3d(0, -1, 2 * R - overlap), Vector3d::UnitY()), s, mat);
  for (int fi = 0; fi < 2; ++fi) {
    const Fiber& f = m.fibers()[fi];
    m.fix_centerline(f.nodes.front(), {true, true, true, false, false, false});
    m.fix_centerline(f.nodes.back(), {true, true, true, false, false, false});
    // Simply supported: only the spin about the fiber axis is blocked, at one end.
    m.fix_rotation(f.nodes.front(), {fi == 0, fi == 1, false});
  }
  return m;
}

ContactModel point_contact(double eps) {
  ContactModel c;
  c.enabled = true;
  c.settings.formulation = ContactFormulation::Point;
  c.settings.point_law = {PenaltyVariant::Linear, eps, 0.0};
  c.settings.search_margin = 0.05;
  return c;
}

class LinearProblem : public StepProblem {
 public:
  LinearProblem(SparseMatrix k, Eigen::VectorXd f) : k_(std::move(k)), f_(std::move(f)), x_(Eigen::VectorXd::Zero(f_.size())) {}
  void evaluate(Eigen::VectorXd& r, SparseMatrix* k) override {
    r = k_ * x_ - f_;
    if (k) *k = k_;
  }
  void apply_increment(const Eigen::VectorXd& dx) override { x_ += dx; }
  const Eigen::VectorXd& x() const { return x_; }

 private:
  SparseMatrix k_;
  Eigen::VectorXd f_;
  Eigen::VectorXd x_;
};

}  // namespace

TEST_CASE("assembly reproduces element blocks") {
  for (ElementType type : {ElementType::TorsionFree, ElementType::SimoReissner}) {
    Model m(type);
    m.add_fiber(straight_fiber(1, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.1, 1.0),
                {1e3, 5e2});
    ModelState s = m.reference_state();
    perturb(m, s, 0.05);
    const AssemblyOutput a = assemble(m, s, 0.0, ContactModel{});
    const Eigen::MatrixXd k = Eigen::MatrixXd(a.stiffness);
    const auto d = m.element_raw_dofs(0);
    Eigen::MatrixXd ke;
    Eigen::VectorXd re;
    if (type == ElementType::TorsionFree) {
      ke = m.tf(0).tangent_stiffness(m.centerline(0, s));
      re = m.tf(0).internal_residual(m.centerline(0, s));
    } else {
      ke = m.sr(0).tangent_stiffness(m.sr_dofs(0, s));
      re = m.sr(0).internal_residual(m.sr_dofs(0, s));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(a.residual(d[i]) == doctest::Approx(re(i)).epsilon(1e-12));
      for (std::size_t j = 0; j < d.size(); ++j) CHECK(k(d[i], d[j]) == doctest::Approx(ke(i, j)).epsilon(1e-12));
    }

    // Two disjoint fibers: no coupling blocks.
    Model m2(type);
    m2.add_fiber(straight_fiber(1, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.1, 1.0),
                 {1e3, 5e2});
    m2.add_fiber(straight_fiber(1, 1.0, Vector3d(0, 5, 0), Vector3d::UnitX()), CrossSection::circular(0.1, 1.0),
                 {1e3, 5e2});
    ModelState s2 = m2.reference_state();
    perturb(m2, s2, 0.05);
    const Eigen::MatrixXd k2 = Eigen::MatrixXd(assemble(m2, s2, 0.0, ContactModel{}).stiffness);
    for (int i : m2.element_raw_dofs(0))
      for (int j : m2.element_raw_dofs(1)) {
        CHECK(k2(i, j) == 0.0);
        CHECK(k2(j, i) == 0.0);
      }
  }
}

TEST_CASE("assembled tangent matches finite differences on a contacting mesh") {
  for (ElementType type : {ElementType::TorsionFree, ElementType::SimoReissner}) {
    const Model m = crossing_model(type, 0.05, 0.02, 1e3);
    const ContactModel c = point_contact(1e3);
    for (int trial = 0; trial < 3; ++trial) {
      ModelState s = m.reference_state();
      perturb(m, s, 0.003);
      const AssemblyOutput a = assemble(m, s, 1.0, c);
      REQUIRE(a.contact.active_points == 1);
      CHECK(fd_error(m, s, c, 1e-7) < 1e-5);
    }
  }
}

TEST_CASE("Newton on a linear problem") {
  const int n = 5;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.5);
  }
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  LinearProblem p(k, f);
  const DofMap dofs(n, {});
  const NewtonResult r = newton_solve(p, dofs, SolverConfig{});
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK((k * p.x() - f).norm() < 1e-12);

  // Dirichlet elimination: constrained entries are never changed.
  LinearProblem q(k, f);
  const DofMap d2(n, {0, 3});
  CHECK(d2.n_free() == 3);
  const NewtonResult r2 = newton_solve(q, d2, SolverConfig{});
  CHECK(r2.converged);
  CHECK(q.x()(0) == 0.0);
  CHECK(q.x()(3) == 0.0);

  // Iteration limit.
  SolverConfig tight;
  tight.max_iter = 1;
  LinearProblem q3(k, f);
  CHECK_FALSE(newton_solve(q3, dofs, tight).converged);
}

TEST_CASE("displacement cap limits Newton increments") {
  SolverConfig cfg;
  cfg.max_iter = 100;
  const Model m = crossing_model(ElementType::TorsionFree, 0.05, 0.03);
  Simulation free_sim(m, point_contact(1e4), cfg);
  const NewtonResult uncapped = free_sim.step(1.0);
  REQUIRE(uncapped.converged);
  cfg.max_displacement = 0.002;
  Simulation capped(m, point_contact(1e4), cfg);
  const NewtonResult r = capped.step(1.0);
  CHECK(r.converged);
  CHECK(r.iterations > uncapped.iterations);
  CHECK((capped.state().q - free_sim.state().q).norm() < 1e-8);
}

TEST_CASE("reactions balance applied loads") {
  for (ElementType type : {ElementType::TorsionFree, ElementType::SimoReissner}) {
    Model m(type);
    m.add_fiber(straight_fiber(4, 1.0, Vector3d::Zero(), Vector3d::UnitX()), CrossSection::circular(0.05, 1.0),
                {1e5, 5e4});
    const int clamp = m.fibers()[0].nodes.front();
    const int tip = m.fibers()[0].nodes.back();
    m.fix_centerline(clamp, {true, true, true, false, true, true});
    m.fix_rotation(clamp, {true, true, true});
    const Vector3d f(0.3, -0.2, 0.5);
    m.add_load({tip, f, Vector3d::Zero(), Schedule::ramp(0.0, 1.0)});
    SolverConfig cfg;
    cfg.n0 = 4;
    Simulation sim(m, ContactModel{}, cfg);
    sim.run(1.0);
    CHECK((sim.reaction_force({clamp}) + f).norm() < 1e-9 * f.norm());
    // Total force sum over all nodes equals minus the applied load.
    std::vector<int> all;
    for (int n : m.fibers()[0].nodes) all.push_back(n);
    CHECK((sim.reaction_force(all) + f).norm() < 1e-9 * f.norm());
  }
}

TEST_CASE("adaptive stepping protocol") {
  SolverConfig cfg;
  cfg.n0 = 1;
  int calls = 0;
  auto always = [&](double, double) {
    ++calls;
    return StepAttempt{true, 3};
  };
  const AdaptiveTrace t1 = adaptive_stepping(0.0, 1.0, cfg, always);
  CHECK(t1.times.size() == 1);
  CHECK(calls == 1);
  CHECK(t1.accumulated_iterations == 3);

  cfg.n0 = 8;
  calls = 0;
  auto fail_third = [&](double, double) {
    ++calls;
    return StepAttempt{calls != 3, calls == 3 ? 50 : 2};
  };
  const AdaptiveTrace t2 = adaptive_stepping(0.0, 1.0, cfg, fail_third);
  const std::vector<std::string> expected{"accept", "accept", "halve",  "accept", "accept", "accept", "accept",
                                          "double", "accept", "accept", "accept", "accept"};
  CHECK(t2.events == expected);
  CHECK(t2.times.back() == 1.0);
  CHECK(t2.steps[2] == doctest::Approx(0.0625));
  CHECK(t2.steps[6] == doctest::Approx(0.125));
  // Failed attempts count towards the accumulated iterations.
  CHECK(t2.accumulated_iterations == 50 + 2 * 10);
  for (std::size_t i = 1; i < t2.times.size(); ++i) CHECK(t2.times[i] > t2.times[i - 1]);

  auto never = [](double, double) { return StepAttempt{false, 1}; };
  CHECK_THROWS_AS(adaptive_stepping(0.0, 1.0, cfg, never), StepFloor);
}

TEST_CASE("runs are deterministic") {
  SolverConfig cfg;
  cfg.n0 = 2;
  auto run = [&](int threads) {
    Simulation sim(crossing_model(ElementType::SimoReissner, 0.05, 0.02), point_contact(1e4), cfg, {}, threads);
    std::vector<double> norms;
    NewtonResult r = sim.step(0.5);
    norms.insert(norms.end(), r.residual_norms.begin(), r.residual_norms.end());
    r = sim.step(0.5);
    norms.insert(norms.end(), r.residual_norms.begin(), r.residual_norms.end());
    return std::make_pair(norms, sim.state().q);
  };
  const auto a = run(1);
  const auto b = run(1);
  const auto c = run(4);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first == c.first);
  CHECK(a.second == c.second);
}
