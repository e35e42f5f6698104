#pragma once

// Consistency checks of assembled tangents against central finite differences
// of the assembled residual. Rotational dofs are perturbed multiplicatively,
// exp(S(h e_i)) Lambda, matching the spin increments of the Newton update.

#include <functional>
#include <random>

#include "beamfe/assembly.hpp"

namespace beamfe {

/// Copy of `s` with raw dof `raw` moved by h.
ModelState shifted_state(const Model& model, const ModelState& s, int raw, double h);

/// Random additive perturbation of the centerline dofs and random spins of the triads.
void perturb_state(const Model& model, ModelState& s, double amplitude, std::mt19937_64& rng);

/// Relative Frobenius error ||K_fd - K|| / ||K|| of a residual/tangent pair.
double fd_tangent_error(const Model& model, const ModelState& s,
                        const std::function<void(const ModelState&, Eigen::VectorXd&, SparseMatrix*)>& residual,
                        double h);

/// fd_tangent_error of the assembled static residual at time t.
double assembly_fd_error(const Model& model, const ModelState& s, const ContactModel& contact, double t, double h,
                         int threads = 1);

}  // namespace beamfe
