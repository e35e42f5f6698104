#pragma once

// Global beam model. Fibers are chains of elements that share boundary nodes
// (position and tangent, plus a triad for Simo-Reissner elements); each
// Simo-Reissner element also owns a mid node carrying a triad only.
//
// Raw dof layout per node: centerline block (d, t) of six additive dofs and
// a rotation block of three spin dofs. The state stores additive values in
// `q` and triads separately; rotation slots of `q` stay zero.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "beamfe/section.hpp"
#include "beamfe/sr_element.hpp"
#include "beamfe/tf_element.hpp"

namespace beamfe {

enum class ElementType { SimoReissner, TorsionFree };

/// Piecewise linear function of (pseudo-)time, constant beyond its end points.
struct Schedule {
  std::vector<std::pair<double, double>> points{{0.0, 1.0}};

  static Schedule constant(double value) { return {{{0.0, value}}}; }
  /// 0 at t0 rising linearly to 1 at t1.
  static Schedule ramp(double t0, double t1) { return {{{t0, 0.0}, {t1, 1.0}}}; }
  double operator()(double t) const;
  bool operator==(const Schedule&) const = default;
};

struct FiberGeometry {
  std::vector<Eigen::Vector3d> positions;    // boundary nodes, n + 1
  std::vector<Eigen::Vector3d> tangents;     // n + 1
  std::vector<Eigen::Matrix3d> node_triads;  // n + 1, Simo-Reissner only
  std::vector<Eigen::Matrix3d> mid_triads;   // n, Simo-Reissner only
};

struct Fiber {
  std::vector<int> nodes;
  std::vector<int> mid_nodes;
  std::vector<int> elements;
  CrossSection section;
  Material material;
};

struct NodeDofs {
  int centerline = -1;  // first raw index of (d, t)
  int rotation = -1;    // first raw index of the spin block
  int fiber = -1;
};

struct ElementTopology {
  int fiber = 0;
  int index_in_fiber = 0;
  int node1 = 0;
  int node2 = 0;
  int mid = -1;
};

/// Dead force and moment at a node, scaled by a schedule. Moments act on the
/// spin dofs (Simo-Reissner) or through the tangent (torsion-free).
struct NodalLoad {
  int node = 0;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
  Schedule scale;
};

/// Dirichlet condition on one raw dof. Additive dofs take `value(t)`;
/// rotational dofs are blocked (their spin increments vanish) and ignore it.
struct Dirichlet {
  int raw = 0;
  std::function<double(double)> value;
};

struct ModelState {
  Eigen::VectorXd q;
  std::vector<Eigen::Matrix3d> triads;
};

class Model {
 public:
  explicit Model(ElementType type, ForceIntegration integration = ForceIntegration::ReducedLobatto);

  /// Appends a fiber; returns its index. Throws DomainError for torsion-free
  /// elements on curved geometry or anisotropic sections.
  int add_fiber(const FiberGeometry& geometry, const CrossSection& section, const Material& material);

  void add_load(const NodalLoad& load) { loads_.push_back(load); }
  void add_dirichlet(Dirichlet d) { dirichlet_.push_back(std::move(d)); }
  /// Holds selected centerline dofs (d then t) of a node at their reference values.
  void fix_centerline(int node, const std::array<bool, 6>& mask);
  /// Blocks selected spatial spin components of a node.
  void fix_rotation(int node, const std::array<bool, 3>& mask);

  ElementType type() const { return type_; }
  ForceIntegration integration() const { return integration_; }
  int n_raw() const { return n_raw_; }
  int n_elements() const { return static_cast<int>(topology_.size()); }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  const std::vector<NodeDofs>& nodes() const { return nodes_; }
  const ElementTopology& topology(int e) const { return topology_[e]; }
  const std::vector<NodalLoad>& loads() const { return loads_; }
  const std::vector<Dirichlet>& dirichlet() const { return dirichlet_; }
  const SimoReissnerElement& sr(int e) const { return sr_[e]; }
  const TorsionFreeElement& tf(int e) const { return tf_[e]; }
  const ElementReferenceGeometry& reference(int e) const;
  double radius(int e) const { return fibers_[topology_[e].fiber].section.radius; }
  double min_radius() const;

  /// Raw indices of the element dofs in element-local order (12 or 21).
  std::vector<int> element_raw_dofs(int e) const;
  /// Raw indices of the twelve centerline dofs (d1, t1, d2, t2).
  std::array<int, 12> centerline_raw_dofs(int e) const;
  bool is_rotational(int raw) const { return rotational_[raw]; }
  /// First raw index of every node position block.
  std::vector<int> position_offsets() const;

  ModelState reference_state() const;
  ElementCenterlineDofs centerline(int e, const ModelState& s) const;
  SRElementDofs sr_dofs(int e, const ModelState& s) const;
  /// Node of a raw spin dof or -1.
  int rotation_node(int raw) const { return rotation_node_[raw]; }

  /// Additive update of centerline dofs and multiplicative spin update of triads.
  void apply_increment(ModelState& s, const Eigen::VectorXd& dx) const;

 private:
  int add_node(bool centerline, bool rotation, int fiber);

  ElementType type_;
  ForceIntegration integration_;
  int n_raw_ = 0;
  std::vector<Fiber> fibers_;
  std::vector<NodeDofs> nodes_;
  std::vector<ElementTopology> topology_;
  std::vector<SimoReissnerElement> sr_;
  std::vector<TorsionFreeElement> tf_;
  std::vector<NodalLoad> loads_;
  std::vector<Dirichlet> dirichlet_;
  std::vector<bool> rotational_;
  std::vector<int> rotation_node_;
  Eigen::VectorXd reference_q_;
  std::vector<Eigen::Matrix3d> reference_triads_;
};

}  // namespace beamfe
