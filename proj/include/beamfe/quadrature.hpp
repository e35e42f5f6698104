#pragma once

#include <span>
#include <vector>

namespace beamfe {

/// 1D quadrature rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
QuadratureRule gauss_legendre(int n);

/// 3-point Gauss-Lobatto rule: nodes {-1, 0, 1}, weights {1/3, 4/3, 1/3}.
QuadratureRule gauss_lobatto3();

}  // namespace beamfe
