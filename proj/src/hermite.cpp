#include "beamfe/hermite.hpp"

#include "beamfe/quadrature.hpp"

namespace beamfe {

double element_arc_length(const ElementCenterlineDofs& dofs) {
  static const QuadratureRule rule = gauss_legendre(10);
  const Vector12<double> v = dofs.to_vector();
  double length = (dofs.d2 - dofs.d1).norm();
  if (length <= 0.0) throw DegenerateTangent("element_arc_length: coincident end nodes");
  for (int it = 0; it < 200; ++it) {
    double next = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      next += rule.weights[q] * hermite_eval<double>(v, rule.points[q], length, 1).norm();
    }
    const double change = std::abs(next - length);
    length = next;
    if (change <= 1e-15 * length) break;
  }
  return length;
}

ElementReferenceGeometry::ElementReferenceGeometry(const ElementCenterlineDofs& initial)
    : ElementReferenceGeometry(initial, element_arc_length(initial)) {}

ElementReferenceGeometry::ElementReferenceGeometry(const ElementCenterlineDofs& initial, double length)
    : initial_(initial), initial_vec_(initial.to_vector()), length_(length) {}

double ElementReferenceGeometry::jacobian(double xi) const {
  return hermite_eval<double>(initial_vec_, xi, length_, 1).norm();
}

double ElementReferenceGeometry::jacobian_derivative(double xi) const {
  const Eigen::Vector3d r1 = hermite_eval<double>(initial_vec_, xi, length_, 1);
  const Eigen::Vector3d r2 = hermite_eval<double>(initial_vec_, xi, length_, 2);
  return r1.dot(r2) / r1.norm();
}

Eigen::Vector3d eval_centerline(const ElementCenterlineDofs& dofs, const ElementReferenceGeometry& ref,
                                double xi, int order) {
  check_parameter_domain(xi);
  const Vector12<double> v = dofs.to_vector();
  const double l = ref.length();
  switch (order) {
    case 0:
      return hermite_eval<double>(v, xi, l, 0);
    case 1:
      return hermite_eval<double>(v, xi, l, 1) / ref.jacobian(xi);
    case 2: {
      const double j = ref.jacobian(xi);
      const double dj = ref.jacobian_derivative(xi);
      return hermite_eval<double>(v, xi, l, 2) / (j * j) - hermite_eval<double>(v, xi, l, 1) * dj / (j * j * j);
    }
    default:
      throw DomainError("eval_centerline: order must be 0, 1 or 2");
  }
}

Matrix3x12<double> assemble_H(double xi, const ElementReferenceGeometry& ref, int order) {
  check_parameter_domain(xi);
  if (order == 0) return hermite_matrix<double>(xi, ref.length(), 0);
  if (order == 1) return hermite_matrix<double>(xi, ref.length(), 1) / ref.jacobian(xi);
  throw DomainError("assemble_H: order must be 0 or 1");
}

}  // namespace beamfe
