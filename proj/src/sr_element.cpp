#include "beamfe/sr_element.hpp"

#include <unsupported/Eigen/AutoDiff>

namespace beamfe {

namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Block3x12 = Eigen::Matrix<double, 3, 12>;

// Interpolation operators of the spin increment field: dtheta(xi) = sum_j Itilde_j dtheta_j.
struct SpinInterpolation {
  std::array<Matrix3d, 3> I;
  std::array<Matrix3d, 3> I_xi;
};

Matrix3d spatial_jacobian(const Vector3d& phi) { return tangent_operator(phi).transpose(); }

SpinInterpolation spin_interpolation(const NodalRelativeRotations& nodal, const TriadInterpolation& tri, double xi,
                                     bool with_derivative) {
  using Dual = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;
  const auto L = lagrange3(xi);
  const auto dL = lagrange3_derivative(xi);

  Matrix3d jl = spatial_jacobian(tri.phi);
  Matrix3d jl_xi = Matrix3d::Zero();
  if (with_derivative) {
    Vector3<Dual> phi_d;
    for (int k = 0; k < 3; ++k) {
      phi_d(k) = Dual(tri.phi(k), Eigen::Matrix<double, 1, 1>(tri.phi_xi(k)));
    }
    const Matrix3<Dual> t = tangent_operator(phi_d);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) jl_xi(a, b) = t(b, a).derivatives()(0);
  }

  SpinInterpolation out;
  const Matrix3d& lr = nodal.reference;
  out.I[1].setIdentity();
  out.I_xi[1].setZero();
  for (int j : {0, 2}) {
    const Matrix3d inv = tangent_operator_inverse(nodal.phi[j]).transpose();
    out.I[j] = lr * (L[j] * jl) * inv * lr.transpose();
    out.I_xi[j] = lr * (dL[j] * jl + L[j] * jl_xi) * inv * lr.transpose();
    out.I[1] -= out.I[j];
    out.I_xi[1] -= out.I_xi[j];
  }
  return out;
}

// Inserts a 3x12 centerline block into a 3x21 operator.
Eigen::Matrix<double, 3, 21> expand_centerline(const Block3x12& h) {
  Eigen::Matrix<double, 3, 21> out = Eigen::Matrix<double, 3, 21>::Zero();
  for (int c = 0; c < 12; ++c) out.col(sr_centerline_index(c)) = h.col(c);
  return out;
}

Eigen::Matrix<double, 3, 21> expand_spin(const std::array<Matrix3d, 3>& blocks) {
  Eigen::Matrix<double, 3, 21> out = Eigen::Matrix<double, 3, 21>::Zero();
  for (int j = 0; j < 3; ++j) out.block<3, 3>(0, sr_rotation_index(j)) = blocks[j];
  return out;
}

// Rows of the rotational test functions: L_j I at the spin dofs of node j.
Eigen::Matrix<double, 3, 21> expand_test(const std::array<double, 3>& L) {
  Eigen::Matrix<double, 3, 21> out = Eigen::Matrix<double, 3, 21>::Zero();
  for (int j = 0; j < 3; ++j) out.block<3, 3>(0, sr_rotation_index(j)) = L[j] * Matrix3d::Identity();
  return out;
}

}  // namespace

std::array<double, 3> lagrange3(double xi) {
  return {0.5 * xi * (xi - 1.0), 0.5 * xi * (xi + 1.0), 1.0 - xi * xi};
}

std::array<double, 3> lagrange3_derivative(double xi) { return {xi - 0.5, xi + 0.5, -2.0 * xi}; }

NodalRelativeRotations::NodalRelativeRotations(const SRElementDofs& dofs) : reference(dofs.triads[1]) {
  for (int j = 0; j < 3; ++j) {
    if (j == 1) {
      phi[j].setZero();
      continue;
    }
    const RotationLog lg = log_rotation_checked(reference.transpose() * dofs.triads[j]);
    phi[j] = lg.psi;
    at_pi[j] = lg.at_pi;
  }
}

TriadInterpolation interpolate_triads(const NodalRelativeRotations& nodal, double xi) {
  check_parameter_domain(xi);
  const auto L = lagrange3(xi);
  const auto dL = lagrange3_derivative(xi);
  TriadInterpolation out;
  out.reference = nodal.reference;
  out.phi = L[0] * nodal.phi[0] + L[2] * nodal.phi[2];
  out.phi_xi = dL[0] * nodal.phi[0] + dL[2] * nodal.phi[2];
  out.lambda = nodal.reference * exp_rodrigues(out.phi);
  return out;
}

TriadInterpolation interpolate_triads(const SRElementDofs& dofs, double xi) {
  return interpolate_triads(NodalRelativeRotations(dofs), xi);
}

std::pair<Vector3d, Vector3d> stress_resultants(const SRStrainState& strains, const CrossSection& section,
                                                const Material& material, const Matrix3d& lambda) {
  const Vector3d cf = force_stiffness(section, material);
  const Vector3d cm = moment_stiffness(section, material);
  return {lambda * cf.cwiseProduct(strains.Gamma), lambda * cm.cwiseProduct(strains.Omega)};
}

RotationalUpdate rotational_update(const RotationalGaussPointState& old, const Matrix3d& lambda_new,
                                   const InertiaCoefficients& c) {
  const double h = c.dt;
  const double b = c.beta;
  const double g = c.gamma;
  const double am = c.alpha_m;
  const double af = c.alpha_f;
  RotationalUpdate u;
  u.increment = log_rotation(old.lambda.transpose() * lambda_new);
  u.A = c.k1() * u.increment - (1.0 - am) / (b * h * (1.0 - af)) * old.W - af / (1.0 - af) * old.A +
        (am / (1.0 - af) - (0.5 - b) * (1.0 - am) / (b * (1.0 - af))) * old.Amod;
  u.W = c.k2() * u.increment + (1.0 - g / b) * old.W + h * (1.0 - g / (2.0 * b)) * old.Amod;
  u.Amod = ((1.0 - af) * u.A + af * old.A - am * old.Amod) / (1.0 - am);
  return u;
}

SimoReissnerElement::SimoReissnerElement(const ElementReferenceGeometry& ref,
                                         const std::array<Matrix3d, 3>& initial_triads, const CrossSection& section,
                                         const Material& material, ForceIntegration integration)
    : ref_(ref),
      initial_triads_(initial_triads),
      section_(section),
      material_(material),
      integration_(integration),
      moment_rule_(gauss_legendre(4)),
      force_rule_(integration == ForceIntegration::ReducedLobatto ? gauss_lobatto3() : gauss_legendre(4)) {
  for (double xi : moment_rule_.points) moment_jacobian_.push_back(ref_.jacobian(xi));
  for (double xi : force_rule_.points) force_jacobian_.push_back(ref_.jacobian(xi));

  // Strains of the initial configuration; subtracting them makes it stress free.
  const SRElementDofs initial{ref_.initial(), initial_triads};
  for (double xi : moment_rule_.points) omega0_.push_back(raw_strains(initial, xi).Omega);
  for (double xi : force_rule_.points) gamma0_.push_back(raw_strains(initial, xi).Gamma);
}

SRStrainState SimoReissnerElement::raw_strains(const SRElementDofs& dofs, double xi) const {
  const NodalRelativeRotations nodal(dofs);
  const TriadInterpolation tri = interpolate_triads(nodal, xi);
  const double j = ref_.jacobian(xi);
  SRStrainState s;
  s.Omega = tangent_operator(tri.phi) * tri.phi_xi / j;
  const Vector3d r1 = eval_centerline(dofs.centerline, ref_, xi, 1);
  s.Gamma = tri.lambda.transpose() * r1 - Vector3d::UnitX();
  return s;
}

SRStrainState SimoReissnerElement::strains(const SRElementDofs& dofs, double xi) const {
  SRStrainState s = raw_strains(dofs, xi);
  const SRStrainState s0 = raw_strains(SRElementDofs{ref_.initial(), initial_triads_}, xi);
  s.Omega -= s0.Omega;
  s.Gamma -= s0.Gamma;
  return s;
}

void SimoReissnerElement::evaluate_internal(const SRElementDofs& dofs, Vector21* residual,
                                            Matrix21* stiffness) const {
  if (residual) residual->setZero();
  if (stiffness) stiffness->setZero();
  const NodalRelativeRotations nodal(dofs);
  const Vector3d cf = force_stiffness(section_, material_);
  const Vector3d cm = moment_stiffness(section_, material_);
  const Vector12<double> x = dofs.centerline.to_vector();

  // Force terms.
  for (std::size_t q = 0; q < force_rule_.size(); ++q) {
    const double xi = force_rule_.points[q];
    const double w = force_rule_.weights[q];
    const double j = force_jacobian_[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const Block3x12 h_xi = hermite_matrix<double>(xi, ref_.length(), 1);
    const Vector3d r1 = h_xi * x / j;
    const Vector3d gamma = tri.lambda.transpose() * r1 - Vector3d::UnitX() - gamma0_[q];
    const Vector3d f = tri.lambda * cf.cwiseProduct(gamma);
    const auto Hx = expand_centerline(h_xi);
    const auto L = lagrange3(xi);
    const auto Lt = expand_test(L);
    const Matrix3d Sr = skew(r1);
    if (residual) {
      *residual += w * Hx.transpose() * f;
      *residual -= w * j * Lt.transpose() * (Sr * f);
    }
    if (stiffness) {
      const Matrix3d c_f = tri.lambda * cf.asDiagonal() * tri.lambda.transpose();
      const Matrix3d Sf = skew(f);
      const Matrix3d A = c_f * Sr - Sf;
      const SpinInterpolation si = spin_interpolation(nodal, tri, xi, false);
      const auto It = expand_spin(si.I);
      *stiffness += (w / j) * Hx.transpose() * c_f * Hx;
      *stiffness += w * Hx.transpose() * A * It;
      *stiffness += w * Lt.transpose() * (Sf - Sr * c_f) * Hx;
      *stiffness -= w * j * Lt.transpose() * Sr * A * It;
    }
  }

  // Moment terms.
  for (std::size_t q = 0; q < moment_rule_.size(); ++q) {
    const double xi = moment_rule_.points[q];
    const double w = moment_rule_.weights[q];
    const double j = moment_jacobian_[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const Vector3d omega = tangent_operator(tri.phi) * tri.phi_xi / j - omega0_[q];
    const Vector3d m = tri.lambda * cm.cwiseProduct(omega);
    const auto dLt = expand_test(lagrange3_derivative(xi));
    if (residual) *residual += w * dLt.transpose() * m;
    if (stiffness) {
      const Matrix3d c_m = tri.lambda * cm.asDiagonal() * tri.lambda.transpose();
      const SpinInterpolation si = spin_interpolation(nodal, tri, xi, true);
      const auto It = expand_spin(si.I);
      const auto It_xi = expand_spin(si.I_xi);
      *stiffness += w * dLt.transpose() * (-skew(m) * It + (c_m / j) * It_xi);
    }
  }
}

Vector21 SimoReissnerElement::internal_residual(const SRElementDofs& dofs) const {
  Vector21 r;
  evaluate_internal(dofs, &r, nullptr);
  return r;
}

Matrix21 SimoReissnerElement::tangent_stiffness(const SRElementDofs& dofs) const {
  Matrix21 k;
  evaluate_internal(dofs, nullptr, &k);
  return k;
}

double SimoReissnerElement::strain_energy(const SRElementDofs& dofs) const {
  const NodalRelativeRotations nodal(dofs);
  const Vector3d cf = force_stiffness(section_, material_);
  const Vector3d cm = moment_stiffness(section_, material_);
  double energy = 0.0;
  for (std::size_t q = 0; q < force_rule_.size(); ++q) {
    const double xi = force_rule_.points[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const Vector3d r1 = eval_centerline(dofs.centerline, ref_, xi, 1);
    const Vector3d gamma = tri.lambda.transpose() * r1 - Vector3d::UnitX() - gamma0_[q];
    energy += 0.5 * force_rule_.weights[q] * force_jacobian_[q] * gamma.dot(cf.cwiseProduct(gamma));
  }
  for (std::size_t q = 0; q < moment_rule_.size(); ++q) {
    const double xi = moment_rule_.points[q];
    const double j = moment_jacobian_[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const Vector3d omega = tangent_operator(tri.phi) * tri.phi_xi / j - omega0_[q];
    energy += 0.5 * moment_rule_.weights[q] * j * omega.dot(cm.cwiseProduct(omega));
  }
  return energy;
}

Eigen::Matrix<double, 12, 12> SimoReissnerElement::translational_mass() const {
  Eigen::Matrix<double, 12, 12> m = Eigen::Matrix<double, 12, 12>::Zero();
  const double rho_a = section_.rho * section_.A;
  // The integrand is a degree-6 polynomial times J; 6 points keep curved elements accurate.
  const QuadratureRule rule = gauss_legendre(6);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Block3x12 h = hermite_matrix<double>(rule.points[q], ref_.length(), 0);
    m += rule.weights[q] * rho_a * ref_.jacobian(rule.points[q]) * h.transpose() * h;
  }
  return m;
}

std::vector<RotationalGaussPointState> SimoReissnerElement::initial_rotational_history(
    const SRElementDofs& dofs, const Vector3d& material_omega) const {
  const NodalRelativeRotations nodal(dofs);
  std::vector<RotationalGaussPointState> out(moment_rule_.size());
  for (std::size_t q = 0; q < moment_rule_.size(); ++q) {
    out[q].lambda = interpolate_triads(nodal, moment_rule_.points[q]).lambda;
    out[q].W = material_omega;
  }
  return out;
}

void SimoReissnerElement::evaluate_rotational_inertia(const SRElementDofs& dofs,
                                                      const std::vector<RotationalGaussPointState>& history,
                                                      const InertiaCoefficients& coeffs, Vector21* residual,
                                                      Matrix21* stiffness) const {
  if (residual) residual->setZero();
  if (stiffness) stiffness->setZero();
  const NodalRelativeRotations nodal(dofs);
  const Vector3d crho = rotational_inertia(section_);
  const Matrix3d C = crho.asDiagonal();
  for (std::size_t q = 0; q < moment_rule_.size(); ++q) {
    const double xi = moment_rule_.points[q];
    const double wj = moment_rule_.weights[q] * moment_jacobian_[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const RotationalUpdate u = rotational_update(history[q], tri.lambda, coeffs);
    // Inertia moment m_rho = -Lambda (W x C W + C A).
    const Vector3d m_rho = -tri.lambda * (u.W.cross(C * u.W) + C * u.A);
    const auto Lt = expand_test(lagrange3(xi));
    if (residual) *residual -= wj * Lt.transpose() * m_rho;
    if (stiffness) {
      const SpinInterpolation si = spin_interpolation(nodal, tri, xi, false);
      const auto It = expand_spin(si.I);
      const Matrix3d dyn = coeffs.k2() * (skew(u.W) * C - skew(C * u.W)) + coeffs.k1() * C;
      const Matrix3d tangent = skew(m_rho) + tri.lambda * dyn * tangent_operator_inverse(u.increment) *
                                                  tri.lambda.transpose();
      *stiffness += wj * Lt.transpose() * tangent * It;
    }
  }
}

void SimoReissnerElement::rotational_inertia_operator(const SRElementDofs& dofs,
                                                      const std::vector<RotationalGaussPointState>& history,
                                                      Vector21* gyroscopic, Matrix21* mass) const {
  if (gyroscopic) gyroscopic->setZero();
  if (mass) mass->setZero();
  const NodalRelativeRotations nodal(dofs);
  const Matrix3d C = rotational_inertia(section_).asDiagonal();
  for (std::size_t q = 0; q < moment_rule_.size(); ++q) {
    const double xi = moment_rule_.points[q];
    const double wj = moment_rule_.weights[q] * moment_jacobian_[q];
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const auto Lt = expand_test(lagrange3(xi));
    const Vector3d& W = history[q].W;
    if (gyroscopic) *gyroscopic += wj * Lt.transpose() * (tri.lambda * W.cross(C * W));
    if (mass) {
      const auto It = expand_spin(spin_interpolation(nodal, tri, xi, false).I);
      *mass += wj * Lt.transpose() * (tri.lambda * C * tri.lambda.transpose()) * It;
    }
  }
}

std::vector<Vector3d> SimoReissnerElement::gauss_point_angular_acceleration(
    const SRElementDofs& dofs, const std::array<Vector3d, 3>& nodal_acc) const {
  const NodalRelativeRotations nodal(dofs);
  std::vector<Vector3d> out;
  for (double xi : moment_rule_.points) {
    const TriadInterpolation tri = interpolate_triads(nodal, xi);
    const SpinInterpolation si = spin_interpolation(nodal, tri, xi, false);
    Vector3d a = Vector3d::Zero();
    for (int j = 0; j < 3; ++j) a += si.I[j] * nodal_acc[j];
    out.push_back(tri.lambda.transpose() * a);
  }
  return out;
}

std::vector<RotationalGaussPointState> SimoReissnerElement::updated_rotational_history(
    const SRElementDofs& dofs, const std::vector<RotationalGaussPointState>& history,
    const InertiaCoefficients& coeffs) const {
  const NodalRelativeRotations nodal(dofs);
  std::vector<RotationalGaussPointState> out(history.size());
  for (std::size_t q = 0; q < history.size(); ++q) {
    const Matrix3d lambda = interpolate_triads(nodal, moment_rule_.points[q]).lambda;
    const RotationalUpdate u = rotational_update(history[q], lambda, coeffs);
    out[q] = {lambda, u.W, u.A, u.Amod};
  }
  return out;
}

double SimoReissnerElement::rotational_kinetic_energy(const std::vector<RotationalGaussPointState>& history) const {
  const Vector3d crho = rotational_inertia(section_);
  double e = 0.0;
  for (std::size_t q = 0; q < history.size(); ++q) {
    e += 0.5 * moment_rule_.weights[q] * moment_jacobian_[q] * history[q].W.dot(crho.cwiseProduct(history[q].W));
  }
  return e;
}

}  // namespace beamfe
