#pragma once

// Result records, CSV and geometry-dump serialization, and the relative L2
// error of a centerline against a reference solution.

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "beamfe/hermite.hpp"
#include "beamfe/model.hpp"

namespace beamfe {

struct ResultRecord {
  int step = 0;
  double time = 0.0;
  int n_dofs = 0;
  /// NaN when no reference is available.
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double kinetic_energy = 0.0;
  double internal_energy = 0.0;
  double contact_energy = 0.0;
  double total_energy = 0.0;
  Eigen::Vector3d reaction_force = Eigen::Vector3d::Zero();
  Eigen::Vector3d reaction_moment = Eigen::Vector3d::Zero();
  int newton_iterations = 0;
  int accumulated_iterations = 0;
  int active_contact_points = 0;
  int active_line_points = 0;
  int rigid_contact_points = 0;
  int candidate_pairs = 0;
};

/// The fixed CSV header line (without line end).
const std::string& csv_header();
std::string csv_row(const ResultRecord& r);
void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
void write_csv(const std::string& path, const std::vector<ResultRecord>& records);
/// Inverse of write_csv; throws IoError on a malformed table.
std::vector<ResultRecord> parse_csv(std::istream& in);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

struct FiberPolyline {
  int id = 0;
  double radius = 0.0;
  std::vector<Eigen::Vector3d> points;

  bool operator==(const FiberPolyline&) const = default;
};

struct GeometryFrame {
  double time = 0.0;
  std::vector<FiberPolyline> fibers;

  bool operator==(const GeometryFrame&) const = default;
};

inline constexpr int kSamplesPerElement = 10;

/// Samples every fiber centerline at kSamplesPerElement points per element
/// (xi = -1 ... 1, end points included).
GeometryFrame sample_geometry(const Model& model, const ModelState& state, double time);
void write_geometry_frame(std::ostream& out, const GeometryFrame& frame);
std::vector<GeometryFrame> parse_geometry(std::istream& in);

/// Reference and current centerline of one fiber.
struct CenterlineCurve {
  std::vector<ElementReferenceGeometry> reference;
  std::vector<ElementCenterlineDofs> current;

  double length() const;
};

CenterlineCurve fiber_curve(const Model& model, const ModelState& state, int fiber = 0);

/// e = sqrt((1/l) int ||r_h - r_ref||^2 ds) / max_s ||u_ref(s)||, with 10-point
/// Gauss quadrature per element of `solution` and the reference evaluated at the
/// same arc length of the undeformed curve.
double l2_error(const CenterlineCurve& solution, const CenterlineCurve& reference);

/// Position of a curve at reference arc length s (clamped to [0, l]).
Eigen::Vector3d position_at_arc_length(const CenterlineCurve& curve, double s, bool current = true);

}  // namespace beamfe
