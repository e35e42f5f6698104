#pragma once

// Drives a model through load steps (static, pseudo-time) or time steps.
//
// Static steps solve R_int + R_con - R_ext(t) = 0. Torsion-free dynamics use
// generalized-alpha with forces interpolated between t_n and t_n+1;
// Simo-Reissner dynamics enforce equilibrium at t_n+1 with algorithmic
// accelerations and multiplicative rotation updates at the Gauss points.

#include <functional>

#include "beamfe/assembly.hpp"
#include "beamfe/dynamics.hpp"
#include "beamfe/model.hpp"
#include "beamfe/solver.hpp"

namespace beamfe {

class Simulation {
 public:
  Simulation(Model model, ContactModel contact, SolverConfig solver, DynamicsConfig dynamics = {}, int threads = 1);

  const Model& model() const { return model_; }
  const ContactModel& contact() const { return contact_; }
  const SolverConfig& solver() const { return solver_; }
  const DynamicsConfig& dynamics() const { return dynamics_; }
  const DofMap& dofs() const { return dofs_; }
  const ModelState& state() const { return state_; }
  ModelState& state() { return state_; }
  double time() const { return time_; }
  const DynamicState& dynamic_state() const { return dyn_; }

  /// Initial translational velocities on raw dofs.
  void set_velocity(const Eigen::VectorXd& v);
  /// Initial material angular velocity at all Gauss points of an element.
  void set_angular_velocity(int element, const Eigen::Vector3d& material_omega);
  /// Consistent start-up accelerations; called by run() if needed.
  void initialize_dynamics();

  /// Advances to t_end: static runs use solver().n0 initial steps, dynamic
  /// runs the configured time step. `on_step` sees every accepted step.
  AdaptiveTrace run(double t_end, const std::function<void(const Simulation&, int iterations)>& on_step = {});

  /// Attempts one step of size dt; commits on convergence.
  NewtonResult step(double dt);

  /// Step residual and stiffness at a trial end state on raw dofs.
  void step_residual(const ModelState& trial, double t_new, double dt, Eigen::VectorXd& r,
                     SparseMatrix* k) const;

  AssemblyOutput evaluate(const ModelState& s, double t, bool stiffness, bool energy = false) const;
  Energies energies() const;
  const AssemblyOutput& last_output() const { return last_; }

  /// Raw residual (including inertia) of the last accepted state; rows of
  /// constrained dofs hold the support reactions.
  const Eigen::VectorXd& reactions() const { return reactions_; }
  Eigen::Vector3d reaction_force(const std::vector<int>& nodes) const;
  /// Sum of (x - p) x F over the given nodes plus reaction moments at spin dofs.
  Eigen::Vector3d reaction_moment(const std::vector<int>& nodes, const Eigen::Vector3d& p) const;

  int accumulated_iterations() const { return accumulated_; }

 private:
  void commit(const ModelState& trial, double t_new, double dt);
  void apply_prescribed(ModelState& s, double t) const;
  void refresh_outputs();

  Model model_;
  ContactModel contact_;
  SolverConfig solver_;
  DynamicsConfig dynamics_;
  int threads_;
  DofMap dofs_;
  ModelState state_;
  double time_ = 0.0;
  DynamicState dyn_;
  SparseMatrix mass_;
  AssemblyOutput last_;
  Eigen::VectorXd reactions_;
  int accumulated_ = 0;
};

}  // namespace beamfe
