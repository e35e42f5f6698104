#pragma once

// Scenario configuration: a nested JSON document with an explicit schema
// version. Parsing is strict (unknown keys and wrong types are rejected);
// missing keys take the defaults below, and serialization writes every key,
// so parse(serialize(c)) == c.

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "beamfe/assembly.hpp"
#include "beamfe/dynamics.hpp"
#include "beamfe/model.hpp"
#include "beamfe/solver.hpp"

namespace beamfe {

inline constexpr int kSchemaVersion = 1;

/// 45-degree cantilever arc in the x-y plane with a square section and a tip force.
struct ArcGeometry {
  int n_elements = 8;
  double radius = 100.0;
  double angle_deg = 45.0;
  double side = 1.0;
  double E = 1e7;
  double G = 5e6;
  double rho = 1.0;
  Eigen::Vector3d tip_force{0.0, 0.0, 600.0};

  bool operator==(const ArcGeometry&) const = default;
};

/// Helix with linearly increasing slope; the radius R0 is fixed by `total_length`
/// spanning `total_coils`, and the first `coils` are modelled.
struct HelixGeometry {
  int n_elements = 16;
  double total_length = 1000.0;
  double total_coils = 4.5;
  double coils = 2.0;
  double radius = 4.0;
  double E = 1.0;
  double G = 0.5;
  double rho = 1e-8;
  double shear_correction = 1.0;
  double tip_force_z = 0.02;
  /// Adds the tip moment that cancels the lever arm of the force about the helix
  /// axis (m_x = -R0 f_z for a whole number of coils).
  bool balance_moment = true;
  /// Load factor rises on [0, ramp_peak] and falls back to zero on [ramp_peak, ramp_release].
  double ramp_peak = 4.0;
  double ramp_release = 5.0;
  bool guide_cylinder = false;
  double guide_radius = 28.0;

  bool operator==(const HelixGeometry&) const = default;
};

/// Hexagonal bundle of straight fibers twisted by moving the front end points
/// on circles about the bundle axis (z); the back end points slide axially
/// under a constant tension.
struct RopeGeometry {
  int fibers = 7;
  int n_elements = 10;
  double length = 5.0;
  double radius = 0.01;
  double E = 1e9;
  double G = 5e8;
  double rho = 1.0;
  double axial_force = 1000.0;
  double rotations = 4.0;
  /// Surface gap between neighbouring fibers of the hexagonal packing.
  double initial_gap = 0.002;

  bool operator==(const RopeGeometry&) const = default;
};

/// Two simply supported fibers crossing at `angle_deg`; the upper fiber is
/// pushed onto the lower one by a force at its midpoint.
struct CrossingGeometry {
  int n_elements = 5;
  double angle_deg = 90.0;
  double length = 1.0;
  double radius = 0.02;
  double E = 1e7;
  double G = 5e6;
  double rho = 1.0;
  /// Initial surface gap between the fibers; the default equals the regularization gap of the
  /// default laws, so the fibers start without contact force.
  double initial_gap = 0.002;
  double push_force = 1.0;

  bool operator==(const CrossingGeometry&) const = default;
};

using GeometryConfig = std::variant<ArcGeometry, HelixGeometry, RopeGeometry, CrossingGeometry>;

struct OutputConfig {
  bool csv = true;
  bool geometry = true;
  /// Geometry frames are written every n accepted steps (and at the end).
  int geometry_every = 1;
  /// Mesh size of the self-converged reference used by `convergence`.
  int reference_elements = 512;
  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name = "scenario";
  ElementType element = ElementType::SimoReissner;
  ForceIntegration integration = ForceIntegration::ReducedLobatto;
  GeometryConfig geometry = ArcGeometry{};
  SolverConfig solver;
  /// End of the (pseudo-)time interval; static loads ramp linearly over it.
  double t_end = 1.0;
  DynamicsConfig dynamics;
  bool contact_enabled = false;
  ContactSettings contact;
  OutputConfig output;

  bool operator==(const ScenarioConfig&) const = default;
};

std::string geometry_kind(const GeometryConfig& g);

/// Parses and validates a configuration; throws ConfigError with a path to the offending key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

/// Semantic checks beyond the schema (ranges, consistency). Throws ConfigError.
void validate_config(const ScenarioConfig& config);

/// Copy of `config` with the element count of its geometry replaced.
ScenarioConfig with_elements(const ScenarioConfig& config, int n_elements);
int element_count(const ScenarioConfig& config);

/// Named defaults of each scenario family.
ScenarioConfig default_config(const std::string& kind);

}  // namespace beamfe
