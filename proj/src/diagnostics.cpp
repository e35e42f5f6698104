#include "beamfe/diagnostics.hpp"

#include "beamfe/rotation.hpp"

namespace beamfe {

ModelState shifted_state(const Model& model, const ModelState& s, int raw, double h) {
  ModelState out = s;
  if (model.is_rotational(raw)) {
    const int node = model.rotation_node(raw);
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(raw - model.nodes()[node].rotation) = h;
    out.triads[node] = exp_rodrigues(e) * out.triads[node];
  } else {
    out.q(raw) += h;
  }
  return out;
}

void perturb_state(const Model& model, ModelState& s, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < model.n_raw(); ++i) {
    if (!model.is_rotational(i)) s.q(i) += amplitude * u(rng);
  }
  for (int n = 0; n < model.n_nodes(); ++n) {
    if (model.nodes()[n].rotation < 0) continue;
    const Eigen::Vector3d w(u(rng), u(rng), u(rng));
    s.triads[n] = exp_rodrigues(Eigen::Vector3d(amplitude * w)) * s.triads[n];
  }
}

double fd_tangent_error(const Model& model, const ModelState& s,
                        const std::function<void(const ModelState&, Eigen::VectorXd&, SparseMatrix*)>& residual,
                        double h) {
  Eigen::VectorXd r;
  SparseMatrix k;
  residual(s, r, &k);
  const Eigen::MatrixXd kd = Eigen::MatrixXd(k);
  Eigen::MatrixXd kfd(model.n_raw(), model.n_raw());
  Eigen::VectorXd rp, rm;
  for (int j = 0; j < model.n_raw(); ++j) {
    residual(shifted_state(model, s, j, h), rp, nullptr);
    residual(shifted_state(model, s, j, -h), rm, nullptr);
    kfd.col(j) = (rp - rm) / (2.0 * h);
  }
  return (kfd - kd).norm() / kd.norm();
}

double assembly_fd_error(const Model& model, const ModelState& s, const ContactModel& contact, double t, double h,
                         int threads) {
  return fd_tangent_error(
      model, s,
      [&](const ModelState& x, Eigen::VectorXd& r, SparseMatrix* k) {
        AssemblyOptions opt;
        opt.stiffness = k != nullptr;
        opt.threads = threads;
        AssemblyOutput out = assemble(model, x, t, contact, opt);
        r = std::move(out.residual);
        if (k) *k = std::move(out.stiffness);
      },
      h);
}

}  // namespace beamfe
