#include "beamfe/tf_element.hpp"

#include <cmath>

#include <unsupported/Eigen/AutoDiff>

#include "beamfe/rotation.hpp"

namespace beamfe {

namespace {

using AD12 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 12, 1>>;

Vector12<AD12> seed_variables(const Vector12<double>& x) {
  Vector12<AD12> out;
  for (int i = 0; i < 12; ++i) out(i) = AD12(x(i), 12, i);
  return out;
}

Matrix12 jacobian_of(const Vector12<AD12>& r) {
  Matrix12 k;
  for (int i = 0; i < 12; ++i) k.row(i) = r(i).derivatives().transpose();
  return k;
}

double value_of(double v) { return v; }
double value_of(const AD12& v) { return v.value(); }

}  // namespace

TorsionFreeElement::TorsionFreeElement(const ElementReferenceGeometry& ref, const CrossSection& section,
                                       const Material& material, int gauss_points)
    : ref_(ref), section_(section), material_(material), rule_(gauss_legendre(gauss_points)) {
  if (std::abs(section.I2 - section.I3) > 1e-12 * section.I2) {
    throw DomainError("torsion-free element requires an isotropic section (I2 = I3)");
  }
  const ElementCenterlineDofs& c = ref.initial();
  const Eigen::Vector3d chord = (c.d2 - c.d1).normalized();
  const double tol = 1e-10;
  if ((c.t1.normalized() - chord).norm() > tol || (c.t2.normalized() - chord).norm() > tol) {
    throw DomainError("torsion-free element requires an initially straight geometry");
  }
  for (double xi : rule_.points) {
    jacobian_.push_back(ref_.jacobian(xi));
    jacobian_xi_.push_back(ref_.jacobian_derivative(xi));
  }
  mass_.setZero();
  const double rho_a = section_.rho * section_.A;
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const auto h = hermite_matrix<double>(rule_.points[q], ref_.length(), 0);
    mass_ += rule_.weights[q] * rho_a * jacobian_[q] * h.transpose() * h;
  }
}

TFStrainState TorsionFreeElement::strains(const ElementCenterlineDofs& dofs, double xi) const {
  const Eigen::Vector3d r1 = eval_centerline(dofs, ref_, xi, 1);
  const Eigen::Vector3d r2 = eval_centerline(dofs, ref_, xi, 2);
  const double n = r1.norm();
  if (n < 1e-12) throw DegenerateTangent("torsion-free element: vanishing centerline tangent");
  TFStrainState s;
  s.eps = n - 1.0;
  s.kappa_vec = r1.cross(r2) / (n * n);
  s.kappa = s.kappa_vec.norm();
  return s;
}

template <typename Scalar>
Vector12<Scalar> TorsionFreeElement::residual_kernel(const Vector12<Scalar>& x) const {
  using V3 = Eigen::Matrix<Scalar, 3, 1>;
  const double ea = material_.E * section_.A;
  const double ei = material_.E * section_.I2;
  Vector12<Scalar> res = Vector12<Scalar>::Zero();
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const double xi = rule_.points[q];
    const double j = jacobian_[q];
    const double jx = jacobian_xi_[q];
    const Matrix3x12<double> h1 = hermite_matrix<double>(xi, ref_.length(), 1);
    const Matrix3x12<double> h2 = hermite_matrix<double>(xi, ref_.length(), 2);
    const Matrix3x12<double> hp = h1 / j;
    const Matrix3x12<double> hpp = h2 / (j * j) - h1 * (jx / (j * j * j));
    const V3 r1 = hp.cast<Scalar>() * x;
    const V3 r2 = hpp.cast<Scalar>() * x;
    const Scalar q2 = r1.dot(r1);
    using std::sqrt;
    const Scalar n = sqrt(q2);
    if (value_of(n) < 1e-12) throw DegenerateTangent("torsion-free element: vanishing centerline tangent");
    const V3 kappa = r1.cross(r2) / q2;
    const V3 f1 = (ea * (n - Scalar(1)) / n) * r1 + (ei / q2) * (r2.cross(kappa) - Scalar(2) * kappa.dot(kappa) * r1);
    const V3 f2 = (ei / q2) * kappa.cross(r1);
    res += Scalar(rule_.weights[q] * j) * (hp.transpose().cast<Scalar>() * f1 + hpp.transpose().cast<Scalar>() * f2);
  }
  return res;
}

template Vector12<double> TorsionFreeElement::residual_kernel<double>(const Vector12<double>&) const;

void TorsionFreeElement::evaluate_internal(const ElementCenterlineDofs& dofs, Vector12<double>* residual,
                                           Matrix12* stiffness) const {
  const Vector12<double> x = dofs.to_vector();
  if (!stiffness) {
    if (residual) *residual = residual_kernel<double>(x);
    return;
  }
  const Vector12<AD12> r = residual_kernel<AD12>(seed_variables(x));
  *stiffness = jacobian_of(r);
  if (residual) {
    for (int i = 0; i < 12; ++i) (*residual)(i) = r(i).value();
  }
}

Vector12<double> TorsionFreeElement::internal_residual(const ElementCenterlineDofs& dofs) const {
  Vector12<double> r;
  evaluate_internal(dofs, &r, nullptr);
  return r;
}

Matrix12 TorsionFreeElement::tangent_stiffness(const ElementCenterlineDofs& dofs) const {
  Matrix12 k;
  evaluate_internal(dofs, nullptr, &k);
  return k;
}

double TorsionFreeElement::strain_energy(const ElementCenterlineDofs& dofs) const {
  const double ea = material_.E * section_.A;
  const double ei = material_.E * section_.I2;
  double e = 0.0;
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const TFStrainState s = strains(dofs, rule_.points[q]);
    e += 0.5 * rule_.weights[q] * jacobian_[q] * (ea * s.eps * s.eps + ei * s.kappa * s.kappa);
  }
  return e;
}

void TorsionFreeElement::distributed_moment_load(const ElementCenterlineDofs& dofs, const Eigen::Vector3d& m,
                                                 Vector12<double>* load, Matrix12* load_stiffness) const {
  // Admissibility is a property of the load definition, checked on the reference geometry.
  for (double xi : rule_.points) check_perpendicular_moment(eval_centerline(ref_.initial(), ref_, xi, 1), m);
  const Vector12<AD12> x = seed_variables(dofs.to_vector());
  Vector12<AD12> f = Vector12<AD12>::Zero();
  const Eigen::Matrix<AD12, 3, 1> mm = m.cast<AD12>();
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const double j = jacobian_[q];
    const Matrix3x12<double> hp = hermite_matrix<double>(rule_.points[q], ref_.length(), 1) / j;
    const Eigen::Matrix<AD12, 3, 1> r1 = hp.cast<AD12>() * x;
    f += AD12(rule_.weights[q] * j) * (hp.transpose().cast<AD12>() * (mm.cross(r1) / r1.dot(r1)));
  }
  if (load) {
    for (int i = 0; i < 12; ++i) (*load)(i) = f(i).value();
  }
  if (load_stiffness) *load_stiffness = jacobian_of(f);
}

Eigen::Vector3d nodal_moment_load(const Eigen::Vector3d& t, const Eigen::Vector3d& m) {
  return m.cross(t) / t.squaredNorm();
}

Eigen::Matrix3d nodal_moment_load_derivative(const Eigen::Vector3d& t, const Eigen::Vector3d& m) {
  const double q = t.squaredNorm();
  return skew(m) / q - 2.0 * m.cross(t) * t.transpose() / (q * q);
}

void check_perpendicular_moment(const Eigen::Vector3d& t, const Eigen::Vector3d& m) {
  if (std::abs(t.dot(m)) > 1e-8 * t.norm() * m.norm()) {
    throw TangentialMomentError("moment with a tangential component applied to a torsion-free element");
  }
}

}  // namespace beamfe
