#pragma once

// Dirichlet elimination, Newton-Raphson with a per-iteration displacement
// cap, and the halving/doubling load step driver.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace beamfe {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Maps raw dofs to the free (solved) dofs; constrained dofs get -1.
class DofMap {
 public:
  DofMap() = default;
  DofMap(int n_raw, const std::vector<int>& constrained, std::vector<int> position_offsets = {});

  int n_raw() const { return static_cast<int>(free_index_.size()); }
  int n_free() const { return static_cast<int>(free_to_raw_.size()); }
  int free_index(int raw) const { return free_index_[raw]; }
  const std::vector<int>& constrained() const { return constrained_; }
  const std::vector<int>& position_offsets() const { return positions_; }

  Eigen::VectorXd restrict_vector(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  SparseMatrix restrict_matrix(const SparseMatrix& raw) const;

 private:
  std::vector<int> free_index_;
  std::vector<int> free_to_raw_;
  std::vector<int> constrained_;
  std::vector<int> positions_;
};

struct SolverConfig {
  double tol_res = 1e-7;
  double tol_disp = 1e-10;
  int max_iter = 50;
  /// Number of initial load (or time) steps.
  int n0 = 1;
  /// Largest nodal position change per Newton iteration.
  double max_displacement = std::numeric_limits<double>::infinity();
  int doubling_window = 4;
  int max_halvings = 10;

  bool operator==(const SolverConfig&) const = default;
};

/// Nonlinear problem of one step. Residual and stiffness are on raw dofs.
class StepProblem {
 public:
  virtual ~StepProblem() = default;
  virtual void evaluate(Eigen::VectorXd& residual, SparseMatrix* stiffness) = 0;
  /// Applies a raw increment (zero on constrained dofs).
  virtual void apply_increment(const Eigen::VectorXd& dx) = 0;
};

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;
  std::vector<double> increment_norms;
  std::string failure;
};

/// Converged when ||R_free|| < tol_res and ||dX|| < tol_disp after the same
/// iteration. Each increment is scaled so that no node moves more than
/// `max_displacement`.
NewtonResult newton_solve(StepProblem& problem, const DofMap& dofs, const SolverConfig& config);

struct StepAttempt {
  bool converged = false;
  int iterations = 0;
};

struct AdaptiveTrace {
  std::vector<double> times;  // end times of accepted steps
  std::vector<double> steps;  // their step sizes
  std::vector<int> iterations;
  int accumulated_iterations = 0;
  int failed_attempts = 0;
  /// Protocol events: "accept", "halve", "double".
  std::vector<std::string> events;
};

/// Marches from t0 to t_end starting with dt0 = (t_end - t0) / n0. `attempt`
/// must either commit a converged step or leave the state untouched. On
/// failure the step is halved and repeated; after `doubling_window`
/// consecutive successes at a reduced size it is doubled again, never beyond
/// dt0. Throws StepFloor below dt0 / 2^max_halvings.
AdaptiveTrace adaptive_stepping(double t0, double t_end, const SolverConfig& config,
                                const std::function<StepAttempt(double t, double dt)>& attempt,
                                const std::function<void(double t)>& on_accept = {});

}  // namespace beamfe
