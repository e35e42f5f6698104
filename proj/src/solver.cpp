#include "beamfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "beamfe/errors.hpp"

namespace beamfe {

DofMap::DofMap(int n_raw, const std::vector<int>& constrained, std::vector<int> position_offsets)
    : free_index_(n_raw, 0), positions_(std::move(position_offsets)) {
  for (int c : constrained) free_index_.at(c) = -1;
  for (int i = 0; i < n_raw; ++i) {
    if (free_index_[i] < 0) {
      constrained_.push_back(i);
    } else {
      free_index_[i] = static_cast<int>(free_to_raw_.size());
      free_to_raw_.push_back(i);
    }
  }
}

Eigen::VectorXd DofMap::restrict_vector(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd out(n_free());
  for (int i = 0; i < n_free(); ++i) out(i) = raw(free_to_raw_[i]);
  return out;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_raw());
  for (int i = 0; i < n_free(); ++i) out(free_to_raw_[i]) = free(i);
  return out;
}

SparseMatrix DofMap::restrict_matrix(const SparseMatrix& raw) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(raw.nonZeros());
  for (int k = 0; k < raw.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(raw, k); it; ++it) {
      const int i = free_index_[it.row()];
      const int j = free_index_[it.col()];
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }
  }
  SparseMatrix out(n_free(), n_free());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

NewtonResult newton_solve(StepProblem& problem, const DofMap& dofs, const SolverConfig& config) {
  NewtonResult result;
  Eigen::VectorXd r_raw;
  SparseMatrix k_raw;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 1; it <= config.max_iter; ++it) {
    problem.evaluate(r_raw, &k_raw);
    const Eigen::VectorXd r = dofs.restrict_vector(r_raw);
    const double rnorm = r.norm();
    result.residual_norms.push_back(rnorm);
    if (!std::isfinite(rnorm)) {
      result.failure = "non-finite residual";
      return result;
    }
    const SparseMatrix k = dofs.restrict_matrix(k_raw);
    lu.compute(k);
    if (lu.info() != Eigen::Success) {
      result.failure = "singular tangent: " + lu.lastErrorMessage();
      return result;
    }
    Eigen::VectorXd dx = lu.solve(-r);
    const double dnorm = dx.norm();
    result.increment_norms.push_back(dnorm);
    result.iterations = it;
    if (!std::isfinite(dnorm)) {
      result.failure = "non-finite increment";
      return result;
    }
    Eigen::VectorXd dx_raw = dofs.expand(dx);
    double max_move = 0.0;
    for (int p : dofs.position_offsets()) max_move = std::max(max_move, dx_raw.segment<3>(p).norm());
    if (max_move > config.max_displacement) dx_raw *= config.max_displacement / max_move;
    problem.apply_increment(dx_raw);
    if (rnorm < config.tol_res && dnorm < config.tol_disp) {
      result.converged = true;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "no convergence after " << config.max_iter << " iterations (|R| = " << result.residual_norms.back()
      << ", |dX| = " << result.increment_norms.back() << ")";
  result.failure = msg.str();
  return result;
}

AdaptiveTrace adaptive_stepping(double t0, double t_end, const SolverConfig& config,
                                const std::function<StepAttempt(double t, double dt)>& attempt,
                                const std::function<void(double t)>& on_accept) {
  AdaptiveTrace trace;
  const double dt0 = (t_end - t0) / std::max(config.n0, 1);
  const double floor = dt0 / std::ldexp(1.0, config.max_halvings);
  const double eps = 1e-12 * std::max(std::abs(t_end), dt0);
  double t = t0;
  double dt = dt0;
  int streak = 0;
  while (t < t_end - eps) {
    const double h = std::min(dt, t_end - t);
    const StepAttempt a = attempt(t, h);
    trace.accumulated_iterations += a.iterations;
    if (!a.converged) {
      ++trace.failed_attempts;
      dt *= 0.5;
      streak = 0;
      trace.events.push_back("halve");
      if (dt < floor * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "step size " << dt << " fell below the floor " << floor << " at t = " << t;
        throw StepFloor(msg.str());
      }
      continue;
    }
    t = (t_end - t - h <= eps) ? t_end : t + h;
    trace.times.push_back(t);
    trace.steps.push_back(h);
    trace.iterations.push_back(a.iterations);
    trace.events.push_back("accept");
    if (on_accept) on_accept(t);
    if (dt < dt0) {
      if (++streak >= config.doubling_window) {
        dt = std::min(2.0 * dt, dt0);
        streak = 0;
        trace.events.push_back("double");
      }
    }
  }
  return trace;
}

}  // namespace beamfe
