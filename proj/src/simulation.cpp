#include "beamfe/simulation.hpp"

#include <cmath>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "beamfe/errors.hpp"

namespace beamfe {

GenAlphaParams params_from_rho(double rho, double dt) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("spectral radius must lie in [0, 1]");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  GenAlphaParams p;
  p.rho_inf = rho;
  p.alpha_m = (2.0 * rho - 1.0) / (rho + 1.0);
  p.alpha_f = rho / (rho + 1.0);
  p.gamma = 0.5 - p.alpha_m + p.alpha_f;
  p.beta = 0.25 * (1.0 - p.alpha_m + p.alpha_f) * (1.0 - p.alpha_m + p.alpha_f);
  p.dt = dt;
  return p;
}

namespace {

std::vector<int> constrained_dofs(const Model& m) {
  std::vector<int> out;
  for (const Dirichlet& d : m.dirichlet()) out.push_back(d.raw);
  return out;
}

class SimulationStep : public StepProblem {
 public:
  SimulationStep(const Simulation& sim, ModelState& trial, double t_new, double dt)
      : sim_(sim), trial_(trial), t_new_(t_new), dt_(dt) {}

  void evaluate(Eigen::VectorXd& r, SparseMatrix* k) override { sim_.step_residual(trial_, t_new_, dt_, r, k); }
  void apply_increment(const Eigen::VectorXd& dx) override { sim_.model().apply_increment(trial_, dx); }

 private:
  const Simulation& sim_;
  ModelState& trial_;
  double t_new_;
  double dt_;
};

}  // namespace

Simulation::Simulation(Model model, ContactModel contact, SolverConfig solver, DynamicsConfig dynamics, int threads)
    : model_(std::move(model)),
      contact_(std::move(contact)),
      solver_(solver),
      dynamics_(dynamics),
      threads_(std::max(threads, 1)),
      dofs_(model_.n_raw(), constrained_dofs(model_), model_.position_offsets()),
      state_(model_.reference_state()) {
  apply_prescribed(state_, time_);
  if (dynamics_.enabled) mass_ = assemble_mass(model_);
  refresh_outputs();
}

void Simulation::apply_prescribed(ModelState& s, double t) const {
  for (const Dirichlet& d : model_.dirichlet()) {
    if (d.value && !model_.is_rotational(d.raw)) s.q(d.raw) = d.value(t);
  }
}

AssemblyOutput Simulation::evaluate(const ModelState& s, double t, bool stiffness, bool energy) const {
  AssemblyOptions opt;
  opt.stiffness = stiffness;
  opt.energy = energy;
  opt.threads = threads_;
  return assemble(model_, s, t, contact_, opt);
}

void Simulation::set_velocity(const Eigen::VectorXd& v) {
  dyn_.v = v;
  dyn_.initialized = false;
}

void Simulation::set_angular_velocity(int element, const Eigen::Vector3d& material_omega) {
  if (model_.type() != ElementType::SimoReissner) return;
  dyn_.rotational.resize(model_.n_elements());
  dyn_.rotational[element] = model_.sr(element).initial_rotational_history(model_.sr_dofs(element, state_),
                                                                          material_omega);
  dyn_.initialized = false;
}

void Simulation::initialize_dynamics() {
  const int n = model_.n_raw();
  const bool sr = model_.type() == ElementType::SimoReissner;
  if (dyn_.v.size() != n) dyn_.v = Eigen::VectorXd::Zero(n);
  if (sr) {
    dyn_.rotational.resize(model_.n_elements());
    for (int e = 0; e < model_.n_elements(); ++e) {
      if (dyn_.rotational[e].empty()) {
        dyn_.rotational[e] = model_.sr(e).initial_rotational_history(model_.sr_dofs(e, state_));
      }
    }
  }
  if (mass_.rows() != n) mass_ = assemble_mass(model_);

  const AssemblyOutput out = evaluate(state_, time_, false);
  Eigen::VectorXd rhs = -out.residual;
  SparseMatrix m = mass_;
  if (sr) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e < model_.n_elements(); ++e) {
      Vector21 gyro;
      Matrix21 mr;
      model_.sr(e).rotational_inertia_operator(model_.sr_dofs(e, state_), dyn_.rotational[e], &gyro, &mr);
      const std::vector<int> d = model_.element_raw_dofs(e);
      for (int i = 0; i < 21; ++i) {
        rhs(d[i]) -= gyro(i);
        for (int j = 0; j < 21; ++j) {
          if (mr(i, j) != 0.0) trip.emplace_back(d[i], d[j], mr(i, j));
        }
      }
    }
    SparseMatrix mr(n, n);
    mr.setFromTriplets(trip.begin(), trip.end());
    m += mr;
  }
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(dofs_.restrict_matrix(m));
  if (lu.info() != Eigen::Success) throw NonConvergence("singular inertia operator at start-up", 0);
  Eigen::VectorXd acc = dofs_.expand(lu.solve(dofs_.restrict_vector(rhs)));

  if (sr) {
    for (int e = 0; e < model_.n_elements(); ++e) {
      const ElementTopology& t = model_.topology(e);
      const int nodes[3] = {t.node1, t.node2, t.mid};
      std::array<Eigen::Vector3d, 3> nodal;
      for (int j = 0; j < 3; ++j) nodal[j] = acc.segment<3>(model_.nodes()[nodes[j]].rotation);
      const auto gp = model_.sr(e).gauss_point_angular_acceleration(model_.sr_dofs(e, state_), nodal);
      for (std::size_t q = 0; q < gp.size(); ++q) {
        dyn_.rotational[e][q].A = gp[q];
        dyn_.rotational[e][q].Amod = gp[q];
      }
    }
    for (int i = 0; i < n; ++i) {
      if (model_.is_rotational(i)) acc(i) = 0.0;
    }
  }
  dyn_.a = acc;
  dyn_.amod = acc;
  dyn_.r_prev = out.residual;
  dyn_.initialized = true;
  refresh_outputs();
}

void Simulation::step_residual(const ModelState& trial, double t_new, double dt, Eigen::VectorXd& r,
                               SparseMatrix* k) const {
  AssemblyOutput out = evaluate(trial, t_new, k != nullptr);
  if (!dynamics_.enabled) {
    r = std::move(out.residual);
    if (k) *k = std::move(out.stiffness);
    return;
  }
  const GenAlphaParams p = params_from_rho(dynamics_.rho_inf, dt);
  const double b = p.beta, am = p.alpha_m, af = p.alpha_f;
  const Eigen::VectorXd dx = trial.q - state_.q;
  if (model_.type() == ElementType::TorsionFree) {
    const Eigen::VectorXd a_new = (dx - dt * dyn_.v - dt * dt * (0.5 - b) * dyn_.a) / (b * dt * dt);
    r = (1.0 - af) * out.residual + af * dyn_.r_prev + mass_ * ((1.0 - am) * a_new + am * dyn_.a);
    if (k) *k = (1.0 - af) * out.stiffness + ((1.0 - am) / (b * dt * dt)) * mass_;
    return;
  }
  const Eigen::VectorXd amod_new = (dx - dt * dyn_.v - dt * dt * (0.5 - b) * dyn_.amod) / (b * dt * dt);
  const Eigen::VectorXd a_new = ((1.0 - am) * amod_new + am * dyn_.amod - af * dyn_.a) / (1.0 - af);
  const InertiaCoefficients c = p.coefficients();
  r = out.residual + mass_ * a_new;
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < model_.n_elements(); ++e) {
    Vector21 re;
    Matrix21 ke;
    model_.sr(e).evaluate_rotational_inertia(model_.sr_dofs(e, trial), dyn_.rotational[e], c, &re,
                                             k ? &ke : nullptr);
    const std::vector<int> d = model_.element_raw_dofs(e);
    for (int i = 0; i < 21; ++i) {
      r(d[i]) += re(i);
      if (!k) continue;
      for (int j = 0; j < 21; ++j) {
        if (ke(i, j) != 0.0) trip.emplace_back(d[i], d[j], ke(i, j));
      }
    }
  }
  if (k) {
    SparseMatrix kr(model_.n_raw(), model_.n_raw());
    kr.setFromTriplets(trip.begin(), trip.end());
    *k = out.stiffness + c.k1() * mass_ + kr;
  }
}

void Simulation::commit(const ModelState& trial, double t_new, double dt) {
  if (dynamics_.enabled) {
    const GenAlphaParams p = params_from_rho(dynamics_.rho_inf, dt);
    const double b = p.beta, g = p.gamma, am = p.alpha_m, af = p.alpha_f;
    const Eigen::VectorXd dx = trial.q - state_.q;
    if (model_.type() == ElementType::TorsionFree) {
      const Eigen::VectorXd a_new = (dx - dt * dyn_.v - dt * dt * (0.5 - b) * dyn_.a) / (b * dt * dt);
      dyn_.v += dt * ((1.0 - g) * dyn_.a + g * a_new);
      dyn_.a = a_new;
      dyn_.amod = a_new;
      dyn_.r_prev = evaluate(trial, t_new, false).residual;
    } else {
      const Eigen::VectorXd amod_new = (dx - dt * dyn_.v - dt * dt * (0.5 - b) * dyn_.amod) / (b * dt * dt);
      const Eigen::VectorXd a_new = ((1.0 - am) * amod_new + am * dyn_.amod - af * dyn_.a) / (1.0 - af);
      dyn_.v += dt * ((1.0 - g) * dyn_.amod + g * amod_new);
      dyn_.a = a_new;
      dyn_.amod = amod_new;
      const InertiaCoefficients c = p.coefficients();
      for (int e = 0; e < model_.n_elements(); ++e) {
        dyn_.rotational[e] = model_.sr(e).updated_rotational_history(model_.sr_dofs(e, trial), dyn_.rotational[e], c);
      }
    }
  }
  state_ = trial;
  time_ = t_new;
  refresh_outputs();
}

void Simulation::refresh_outputs() {
  last_ = evaluate(state_, time_, false, true);
  reactions_ = last_.residual;
  if (dynamics_.enabled && dyn_.a.size() == model_.n_raw()) reactions_ += mass_ * dyn_.a;
}

NewtonResult Simulation::step(double dt) {
  if (dynamics_.enabled && !dyn_.initialized) initialize_dynamics();
  ModelState trial = state_;
  const double t_new = time_ + dt;
  apply_prescribed(trial, t_new);
  SimulationStep problem(*this, trial, t_new, dt);
  NewtonResult res;
  try {
    res = newton_solve(problem, dofs_, solver_);
  } catch (const DegenerateTangent& e) {
    res.converged = false;
    res.iterations = std::max(res.iterations, 1);
    res.failure = e.what();
  } catch (const DomainError& e) {
    res.converged = false;
    res.iterations = std::max(res.iterations, 1);
    res.failure = e.what();
  }
  accumulated_ += res.iterations;
  if (res.converged) commit(trial, t_new, dt);
  return res;
}

AdaptiveTrace Simulation::run(double t_end, const std::function<void(const Simulation&, int)>& on_step) {
  if (dynamics_.enabled && !dyn_.initialized) initialize_dynamics();
  SolverConfig cfg = solver_;
  if (dynamics_.enabled) cfg.n0 = std::max(1, static_cast<int>(std::lround((t_end - time_) / dynamics_.dt)));
  int last_iterations = 0;
  return adaptive_stepping(
      time_, t_end, cfg,
      [&](double, double h) {
        const NewtonResult r = step(h);
        last_iterations = r.iterations;
        return StepAttempt{r.converged, r.iterations};
      },
      [&](double) {
        if (on_step) on_step(*this, last_iterations);
      });
}

Energies Simulation::energies() const {
  Energies e;
  e.internal = last_.internal_energy;
  e.contact = last_.contact_energy;
  if (dynamics_.enabled && dyn_.v.size() == model_.n_raw()) {
    e.kinetic = 0.5 * dyn_.v.dot(mass_ * dyn_.v);
    if (model_.type() == ElementType::SimoReissner) {
      for (int el = 0; el < model_.n_elements() && el < static_cast<int>(dyn_.rotational.size()); ++el) {
        e.kinetic += model_.sr(el).rotational_kinetic_energy(dyn_.rotational[el]);
      }
    }
  }
  e.total = e.kinetic + e.internal + e.contact;
  return e;
}

Eigen::Vector3d Simulation::reaction_force(const std::vector<int>& nodes) const {
  Eigen::Vector3d f = Eigen::Vector3d::Zero();
  for (int n : nodes) f += reactions_.segment<3>(model_.nodes()[n].centerline);
  return f;
}

Eigen::Vector3d Simulation::reaction_moment(const std::vector<int>& nodes, const Eigen::Vector3d& p) const {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  for (int n : nodes) {
    const NodeDofs& nd = model_.nodes()[n];
    m += (state_.q.segment<3>(nd.centerline) - p).cross(reactions_.segment<3>(nd.centerline));
    if (nd.rotation >= 0) m += reactions_.segment<3>(nd.rotation);
  }
  return m;
}

}  // namespace beamfe
