#pragma once

// Beam-to-beam contact by the penalty method: closest point projections,
// point contact (large angles), line contact (small angles) and the all-angle
// blend of both, plus broadphase search and contact with rigid primitives.
//
// Sign convention: for a pair (1, 2) the normal is n = (r1 - r2)/||r1 - r2||
// and the contact force +f n acts on beam 1. Residual contributions follow
// R_int + R_con = R_ext, so a pushing force appears with a negative sign.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "beamfe/hermite.hpp"

namespace beamfe {

using Vector24 = Eigen::Matrix<double, 24, 1>;
using Matrix24 = Eigen::Matrix<double, 24, 24>;

/// Current centerline of one element: Hermite dofs and the tangent scaling length.
struct HermiteCurve {
  Vector12<double> x = Vector12<double>::Zero();
  double length = 1.0;

  Eigen::Vector3d eval(double xi, int order = 0) const { return hermite_eval<double>(x, xi, length, order); }
};

enum class ProjectionKind { Bilateral, Unilateral };

enum class ProjectionStatus {
  Ok,
  /// The unconstrained solution lies outside the element; coordinates are clamped.
  OutsideElement,
  /// Near-parallel tangents or singular Newton system: no unique closest point.
  NonUnique,
  NotConverged,
};

struct ClosestPointResult {
  double xi = 0.0;
  double eta = 0.0;
  double distance = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  bool converged = false;
  ProjectionKind kind = ProjectionKind::Bilateral;
  ProjectionStatus status = ProjectionStatus::NotConverged;

  bool ok() const { return status == ProjectionStatus::Ok; }
};

/// Minimum distance between two curves: r1,xi.(r1 - r2) = 0, r2,eta.(r1 - r2) = 0.
ClosestPointResult closest_point_bilateral(const HermiteCurve& c1, const HermiteCurve& c2);

/// Projection of a point onto a curve: r2,eta.(p - r2) = 0.
ClosestPointResult closest_point_unilateral(const Eigen::Vector3d& point, const HermiteCurve& master);

struct ContactAngle {
  double alpha = 0.0;  // radians in [0, pi/2]
  double z = 1.0;      // cos(alpha)
};
ContactAngle contact_angle(const Eigen::Vector3d& t1, const Eigen::Vector3d& t2);

enum class PenaltyVariant { Linear, QuadraticRegularized };

struct PenaltyLaw {
  PenaltyVariant variant = PenaltyVariant::Linear;
  double epsilon = 1.0;
  double g_bar = 0.0;

  bool valid() const { return epsilon > 0.0 && g_bar >= 0.0 && (variant == PenaltyVariant::Linear || g_bar > 0.0); }
  /// Gap below which a point counts as active.
  double activation_gap() const { return variant == PenaltyVariant::Linear ? 0.0 : g_bar; }
  bool operator==(const PenaltyLaw&) const = default;
};

struct PenaltyValue {
  double f = 0.0;          // compressive force magnitude, f >= 0
  double df_dg = 0.0;
  double potential = 0.0;  // Psi with dPsi/dg = -f
};
PenaltyValue penalty_force(double g, const PenaltyLaw& law);

enum class AbcVariant { ForceBased, PotentialBased };

struct ABCParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  AbcVariant variant = AbcVariant::ForceBased;

  double z1() const;
  double z2() const;
  bool valid() const;
  bool operator==(const ABCParams&) const = default;
};

struct TransitionFactor {
  double k = 0.0;
  double dk_dz = 0.0;
};
TransitionFactor abc_transition_factor(double z, const ABCParams& params);

enum class ContactFormulation { Point, Line, AllAngle };

struct ContactSettings {
  ContactFormulation formulation = ContactFormulation::Point;
  PenaltyLaw point_law;
  PenaltyLaw line_law;
  ABCParams abc;
  int n_segments = 1;
  int n_gauss_per_segment = 3;
  double search_margin = 0.0;
  bool operator==(const ContactSettings&) const = default;
};

/// One element as seen by the contact algorithms.
struct ContactElement {
  int id = 0;
  int fiber = 0;
  int index_in_fiber = 0;
  HermiteCurve curve;
  const ElementReferenceGeometry* reference = nullptr;
  double radius = 1.0;
};

/// Residual and stiffness of one element pair on the 24 centerline dofs (slave first).
struct PairContribution {
  int slave = 0;
  int master = 0;
  Vector24 residual = Vector24::Zero();
  Matrix24 stiffness = Matrix24::Zero();
  double energy = 0.0;
  int active_points = 0;
  int active_line_points = 0;
};

/// Point contact of a pair at a converged bilateral projection.
PairContribution point_contact_contribution(const ContactElement& e1, const ContactElement& e2,
                                            const ClosestPointResult& cp, const PenaltyLaw& law,
                                            bool with_stiffness = true);

/// Line contact Gauss point of a slave element assigned to one master.
struct LineGaussRecord {
  int master = -1;
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;  // quadrature weight times slave Jacobian
  double gap = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
};

/// Slave Gauss layout: n_segments uniform sub-intervals with n_gauss points each.
std::vector<std::pair<double, double>> slave_gauss_layout(int n_segments, int n_gauss);

/// Projects the slave Gauss points onto the candidate masters and keeps the
/// smallest admissible gap per point. Points with no admissible projection or
/// with a gap above the activation threshold are dropped.
std::vector<LineGaussRecord> line_contact_records(const ContactElement& slave,
                                                  const std::vector<const ContactElement*>& masters,
                                                  const ContactSettings& settings, double activation_gap);

/// Line contact of the Gauss points of `records` that belong to `master`.
PairContribution line_contact_contribution(const ContactElement& slave, const ContactElement& master,
                                           const std::vector<LineGaussRecord>& records, const PenaltyLaw& law,
                                           bool with_stiffness = true);

/// All-angle contact: point part scaled by the blend of the bilateral contact
/// angle, line part by the blend of the local angle.
PairContribution abc_point_contribution(const ContactElement& e1, const ContactElement& e2,
                                        const ClosestPointResult& cp, const ContactSettings& settings,
                                        bool with_stiffness = true);
PairContribution abc_line_contribution(const ContactElement& slave, const ContactElement& master,
                                       const std::vector<LineGaussRecord>& records, const ContactSettings& settings,
                                       bool with_stiffness = true);

/// Candidate pairs (i < j by id) whose Bezier hulls, inflated by the radii and
/// half the margin, overlap. Adjacent elements of one fiber are excluded.
std::vector<std::pair<int, int>> broadphase_search(const std::vector<ContactElement>& elements, double margin);

/// Bezier control points of a Hermite element.
std::array<Eigen::Vector3d, 4> bezier_control_points(const HermiteCurve& c);

struct RigidSphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};
struct RigidCylinder {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double radius = 1.0;
};

struct RigidContribution {
  Vector12<double> residual = Vector12<double>::Zero();
  Eigen::Matrix<double, 12, 12> stiffness = Eigen::Matrix<double, 12, 12>::Zero();
  double energy = 0.0;
  int active_points = 0;
};

/// Gap of a centerline point to a primitive: distance to the surface minus the beam radius.
double rigid_gap(const RigidSphere& s, const Eigen::Vector3d& p, double beam_radius);
double rigid_gap(const RigidCylinder& c, const Eigen::Vector3d& p, double beam_radius);

/// Line-type penalty contact of a beam element with a rigid primitive.
RigidContribution rigid_primitive_contact(const ContactElement& element, const RigidSphere& sphere,
                                          const ContactSettings& settings, bool with_stiffness = true);
RigidContribution rigid_primitive_contact(const ContactElement& element, const RigidCylinder& cylinder,
                                          const ContactSettings& settings, bool with_stiffness = true);

}  // namespace beamfe
