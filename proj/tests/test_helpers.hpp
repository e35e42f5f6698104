#pragma once

#include <Eigen/Core>

#include "beamfe/model.hpp"
#include "beamfe/rotation.hpp"

namespace testing_support {

// Straight fiber from `start` along `dir` with n equal elements.
inline beamfe::FiberGeometry straight_fiber(int n, double length, const Eigen::Vector3d& start,
                                            const Eigen::Vector3d& dir) {
  beamfe::FiberGeometry g;
  const Eigen::Vector3d t = dir.normalized();
  const Eigen::Matrix3d triad = beamfe::align_frame(Eigen::Matrix3d::Identity(), t);
  for (int i = 0; i <= n; ++i) {
    g.positions.push_back(start + length * i / n * t);
    g.tangents.push_back(t);
    g.node_triads.push_back(triad);
  }
  g.mid_triads.assign(n, triad);
  return g;
}

// Fills a raw-dof vector with the centerline velocity v of every node.
inline Eigen::VectorXd uniform_velocity(const beamfe::Model& m, const Eigen::Vector3d& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.n_raw());
  for (const auto& n : m.nodes()) {
    if (n.centerline >= 0) out.segment<3>(n.centerline) = v;
  }
  return out;
}

}  // namespace testing_support
