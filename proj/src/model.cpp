#include "beamfe/model.hpp"

#include <algorithm>
#include <limits>

namespace beamfe {

double Schedule::operator()(double t) const {
  if (points.empty()) return 0.0;
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& [t1, v1] = points[i];
    if (t <= t1) {
      const auto& [t0, v0] = points[i - 1];
      return t1 > t0 ? v0 + (v1 - v0) * (t - t0) / (t1 - t0) : v1;
    }
  }
  return points.back().second;
}

Model::Model(ElementType type, ForceIntegration integration) : type_(type), integration_(integration) {}

int Model::add_node(bool centerline, bool rotation, int fiber) {
  NodeDofs n;
  n.fiber = fiber;
  const int node = static_cast<int>(nodes_.size());
  if (centerline) {
    n.centerline = n_raw_;
    n_raw_ += 6;
    rotational_.insert(rotational_.end(), 6, false);
    rotation_node_.insert(rotation_node_.end(), 6, -1);
  }
  if (rotation) {
    n.rotation = n_raw_;
    n_raw_ += 3;
    rotational_.insert(rotational_.end(), 3, true);
    rotation_node_.insert(rotation_node_.end(), 3, node);
  }
  nodes_.push_back(n);
  return node;
}

int Model::add_fiber(const FiberGeometry& g, const CrossSection& section, const Material& material) {
  const int n_el = static_cast<int>(g.positions.size()) - 1;
  if (n_el < 1 || g.tangents.size() != g.positions.size()) {
    throw DomainError("fiber geometry needs matching positions and tangents for at least one element");
  }
  const bool sr = type_ == ElementType::SimoReissner;
  if (sr && (g.node_triads.size() != g.positions.size() || static_cast<int>(g.mid_triads.size()) != n_el)) {
    throw DomainError("Simo-Reissner fiber geometry needs node and mid triads");
  }
  const int fid = static_cast<int>(fibers_.size());
  Fiber fiber;
  fiber.section = section;
  fiber.material = material;
  for (int i = 0; i <= n_el; ++i) fiber.nodes.push_back(add_node(true, sr, fid));
  if (sr) {
    for (int i = 0; i < n_el; ++i) fiber.mid_nodes.push_back(add_node(false, true, fid));
  }

  const int n_nodes_total = static_cast<int>(nodes_.size());
  reference_q_.conservativeResize(n_raw_);
  reference_triads_.resize(n_nodes_total, Eigen::Matrix3d::Identity());
  for (int i = 0; i <= n_el; ++i) {
    const NodeDofs& nd = nodes_[fiber.nodes[i]];
    reference_q_.segment<3>(nd.centerline) = g.positions[i];
    reference_q_.segment<3>(nd.centerline + 3) = g.tangents[i];
    if (sr) {
      reference_q_.segment<3>(nd.rotation).setZero();
      reference_triads_[fiber.nodes[i]] = g.node_triads[i];
    }
  }
  if (sr) {
    for (int i = 0; i < n_el; ++i) {
      reference_q_.segment<3>(nodes_[fiber.mid_nodes[i]].rotation).setZero();
      reference_triads_[fiber.mid_nodes[i]] = g.mid_triads[i];
    }
  }

  for (int i = 0; i < n_el; ++i) {
    ElementTopology t{fid, i, fiber.nodes[i], fiber.nodes[i + 1], sr ? fiber.mid_nodes[i] : -1};
    const ElementCenterlineDofs c{g.positions[i], g.tangents[i], g.positions[i + 1], g.tangents[i + 1]};
    const ElementReferenceGeometry ref(c);
    if (sr) {
      sr_.emplace_back(ref, std::array<Eigen::Matrix3d, 3>{g.node_triads[i], g.node_triads[i + 1], g.mid_triads[i]},
                       section, material, integration_);
    } else {
      tf_.emplace_back(ref, section, material);
    }
    fiber.elements.push_back(static_cast<int>(topology_.size()));
    topology_.push_back(t);
  }
  fibers_.push_back(std::move(fiber));
  return fid;
}

void Model::fix_centerline(int node, const std::array<bool, 6>& mask) {
  const int off = nodes_.at(node).centerline;
  for (int k = 0; k < 6; ++k) {
    if (!mask[k]) continue;
    const double v = reference_q_(off + k);
    add_dirichlet({off + k, [v](double) { return v; }});
  }
}

void Model::fix_rotation(int node, const std::array<bool, 3>& mask) {
  const int off = nodes_.at(node).rotation;
  if (off < 0) return;
  for (int k = 0; k < 3; ++k) {
    if (mask[k]) add_dirichlet({off + k, nullptr});
  }
}

const ElementReferenceGeometry& Model::reference(int e) const {
  return type_ == ElementType::SimoReissner ? sr_[e].reference() : tf_[e].reference();
}

double Model::min_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const Fiber& f : fibers_) r = std::min(r, f.section.radius);
  return r;
}

std::array<int, 12> Model::centerline_raw_dofs(int e) const {
  const ElementTopology& t = topology_[e];
  std::array<int, 12> out{};
  for (int k = 0; k < 6; ++k) {
    out[k] = nodes_[t.node1].centerline + k;
    out[6 + k] = nodes_[t.node2].centerline + k;
  }
  return out;
}

std::vector<int> Model::element_raw_dofs(int e) const {
  const std::array<int, 12> c = centerline_raw_dofs(e);
  if (type_ == ElementType::TorsionFree) return {c.begin(), c.end()};
  const ElementTopology& t = topology_[e];
  std::vector<int> out(21);
  for (int k = 0; k < 12; ++k) out[sr_centerline_index(k)] = c[k];
  const int rot[3] = {nodes_[t.node1].rotation, nodes_[t.node2].rotation, nodes_[t.mid].rotation};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) out[sr_rotation_index(j) + k] = rot[j] + k;
  return out;
}

std::vector<int> Model::position_offsets() const {
  std::vector<int> out;
  for (const NodeDofs& n : nodes_) {
    if (n.centerline >= 0) out.push_back(n.centerline);
  }
  return out;
}

ModelState Model::reference_state() const { return {reference_q_, reference_triads_}; }

ElementCenterlineDofs Model::centerline(int e, const ModelState& s) const {
  const ElementTopology& t = topology_[e];
  const int a = nodes_[t.node1].centerline;
  const int b = nodes_[t.node2].centerline;
  return {s.q.segment<3>(a), s.q.segment<3>(a + 3), s.q.segment<3>(b), s.q.segment<3>(b + 3)};
}

SRElementDofs Model::sr_dofs(int e, const ModelState& s) const {
  const ElementTopology& t = topology_[e];
  return {centerline(e, s), {s.triads[t.node1], s.triads[t.node2], s.triads[t.mid]}};
}

void Model::apply_increment(ModelState& s, const Eigen::VectorXd& dx) const {
  for (int n = 0; n < n_nodes(); ++n) {
    const NodeDofs& nd = nodes_[n];
    if (nd.centerline >= 0) s.q.segment<6>(nd.centerline) += dx.segment<6>(nd.centerline);
    if (nd.rotation >= 0) {
      const Eigen::Vector3d dth = dx.segment<3>(nd.rotation);
      if (dth.squaredNorm() > 0.0) s.triads[n] = exp_rodrigues(dth) * s.triads[n];
    }
  }
}

}  // namespace beamfe
