#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "beamfe/errors.hpp"
#include "beamfe/scenario.hpp"
#include "json.hpp"

namespace beamfe {

using json = nlohmann::ordered_json;

namespace {

// Reads the members of one JSON object, remembering which keys were consumed,
// so that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void read(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out = std::numeric_limits<double>::infinity();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "expected a number");
      }
    }
  }

  void read(const std::string& key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, Eigen::Vector3d& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 3) fail(key, "expected an array of three numbers");
      for (int i = 0; i < 3; ++i) {
        if (!(*v)[i].is_number()) fail(key, "expected an array of three numbers");
        out(i) = (*v)[i].get<double>();
      }
    }
  }

  template <typename Enum>
  void read_enum(const std::string& key, Enum& out, const std::vector<std::pair<std::string, Enum>>& names) {
    std::string s;
    if (!has(key)) return;
    read(key, s);
    for (const auto& [name, value] : names) {
      if (name == s) {
        out = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& n : names) allowed += (allowed.empty() ? "" : ", ") + n.first;
    fail(key, "unknown value '" + s + "' (allowed: " + allowed + ")");
  }

  const json* object(const std::string& key) { return take(key); }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(it.key(), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : child(key);
    throw ConfigError(where + ": " + what);
  }

 private:
  const json* take(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const std::vector<std::pair<std::string, ElementType>> kElementNames = {
    {"simo_reissner", ElementType::SimoReissner}, {"torsion_free", ElementType::TorsionFree}};
const std::vector<std::pair<std::string, ForceIntegration>> kIntegrationNames = {
    {"reduced_lobatto", ForceIntegration::ReducedLobatto}, {"full_gauss", ForceIntegration::FullGauss}};
const std::vector<std::pair<std::string, ContactFormulation>> kFormulationNames = {
    {"point", ContactFormulation::Point}, {"line", ContactFormulation::Line}, {"all_angle", ContactFormulation::AllAngle}};
const std::vector<std::pair<std::string, PenaltyVariant>> kPenaltyNames = {
    {"linear", PenaltyVariant::Linear}, {"quadratic_regularized", PenaltyVariant::QuadraticRegularized}};
const std::vector<std::pair<std::string, AbcVariant>> kAbcNames = {{"force_based", AbcVariant::ForceBased},
                                                                   {"potential_based", AbcVariant::PotentialBased}};

template <typename Enum>
std::string name_of(Enum value, const std::vector<std::pair<std::string, Enum>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// Geometry blocks.

void read_geometry(ObjectReader& r, ArcGeometry& g) {
  r.read("n_elements", g.n_elements);
  r.read("radius", g.radius);
  r.read("angle_deg", g.angle_deg);
  r.read("side", g.side);
  r.read("E", g.E);
  r.read("G", g.G);
  r.read("rho", g.rho);
  r.read("tip_force", g.tip_force);
}
json write_geometry(const ArcGeometry& g) {
  return {{"kind", "arc"},         {"n_elements", g.n_elements}, {"radius", g.radius}, {"angle_deg", g.angle_deg},
          {"side", g.side},        {"E", g.E},                   {"G", g.G},           {"rho", g.rho},
          {"tip_force", vec3(g.tip_force)}};
}

void read_geometry(ObjectReader& r, HelixGeometry& g) {
  r.read("n_elements", g.n_elements);
  r.read("total_length", g.total_length);
  r.read("total_coils", g.total_coils);
  r.read("coils", g.coils);
  r.read("radius", g.radius);
  r.read("E", g.E);
  r.read("G", g.G);
  r.read("rho", g.rho);
  r.read("shear_correction", g.shear_correction);
  r.read("tip_force_z", g.tip_force_z);
  r.read("balance_moment", g.balance_moment);
  r.read("ramp_peak", g.ramp_peak);
  r.read("ramp_release", g.ramp_release);
  r.read("guide_cylinder", g.guide_cylinder);
  r.read("guide_radius", g.guide_radius);
}
json write_geometry(const HelixGeometry& g) {
  return {{"kind", "helix"},
          {"n_elements", g.n_elements},
          {"total_length", g.total_length},
          {"total_coils", g.total_coils},
          {"coils", g.coils},
          {"radius", g.radius},
          {"E", g.E},
          {"G", g.G},
          {"rho", g.rho},
          {"shear_correction", g.shear_correction},
          {"tip_force_z", g.tip_force_z},
          {"balance_moment", g.balance_moment},
          {"ramp_peak", g.ramp_peak},
          {"ramp_release", g.ramp_release},
          {"guide_cylinder", g.guide_cylinder},
          {"guide_radius", g.guide_radius}};
}

void read_geometry(ObjectReader& r, RopeGeometry& g) {
  r.read("fibers", g.fibers);
  r.read("n_elements", g.n_elements);
  r.read("length", g.length);
  r.read("radius", g.radius);
  r.read("E", g.E);
  r.read("G", g.G);
  r.read("rho", g.rho);
  r.read("axial_force", g.axial_force);
  r.read("rotations", g.rotations);
  r.read("initial_gap", g.initial_gap);
}
json write_geometry(const RopeGeometry& g) {
  return {{"kind", "rope"},     {"fibers", g.fibers}, {"n_elements", g.n_elements},   {"length", g.length},
          {"radius", g.radius}, {"E", g.E},           {"G", g.G},                     {"rho", g.rho},
          {"axial_force", g.axial_force},             {"rotations", g.rotations},
          {"initial_gap", g.initial_gap}};
}

void read_geometry(ObjectReader& r, CrossingGeometry& g) {
  r.read("n_elements", g.n_elements);
  r.read("angle_deg", g.angle_deg);
  r.read("length", g.length);
  r.read("radius", g.radius);
  r.read("E", g.E);
  r.read("G", g.G);
  r.read("rho", g.rho);
  r.read("initial_gap", g.initial_gap);
  r.read("push_force", g.push_force);
}
json write_geometry(const CrossingGeometry& g) {
  return {{"kind", "crossing"}, {"n_elements", g.n_elements}, {"angle_deg", g.angle_deg},
          {"length", g.length}, {"radius", g.radius},         {"E", g.E},
          {"G", g.G},           {"rho", g.rho},               {"initial_gap", g.initial_gap},
          {"push_force", g.push_force}};
}

template <typename G>
G read_geometry_block(ObjectReader& r) {
  G g;
  read_geometry(r, g);
  return g;
}

GeometryConfig parse_geometry(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  if (!r.has("kind")) r.fail("kind", "missing geometry kind");
  std::string kind;
  r.read("kind", kind);
  GeometryConfig g;
  if (kind == "arc") {
    g = read_geometry_block<ArcGeometry>(r);
  } else if (kind == "helix") {
    g = read_geometry_block<HelixGeometry>(r);
  } else if (kind == "rope") {
    g = read_geometry_block<RopeGeometry>(r);
  } else if (kind == "crossing") {
    g = read_geometry_block<CrossingGeometry>(r);
  } else {
    r.fail("kind", "unknown geometry kind '" + kind + "' (allowed: arc, helix, rope, crossing)");
  }
  r.finish();
  return g;
}

PenaltyLaw parse_law(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PenaltyLaw law;
  r.read_enum("variant", law.variant, kPenaltyNames);
  r.read("epsilon", law.epsilon);
  r.read("g_bar", law.g_bar);
  r.finish();
  return law;
}
json write_law(const PenaltyLaw& law) {
  return {{"variant", name_of(law.variant, kPenaltyNames)}, {"epsilon", law.epsilon}, {"g_bar", law.g_bar}};
}

}  // namespace

std::string geometry_kind(const GeometryConfig& g) {
  static const char* names[] = {"arc", "helix", "rope", "crossing"};
  return names[g.index()];
}

ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  ObjectReader r(root, "");
  ScenarioConfig c;
  if (!r.has("schema_version")) r.fail("schema_version", "missing schema version");
  r.read("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion) {
    r.fail("schema_version", "unsupported schema version " + std::to_string(c.schema_version) + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
  }
  r.read("name", c.name);
  r.read_enum("element", c.element, kElementNames);
  r.read_enum("integration", c.integration, kIntegrationNames);
  if (!r.has("geometry")) r.fail("geometry", "missing geometry block");
  c.geometry = parse_geometry(*r.object("geometry"), "geometry");
  r.read("t_end", c.t_end);

  if (const json* s = r.object("solver")) {
    ObjectReader sr(*s, "solver");
    sr.read("tol_res", c.solver.tol_res);
    sr.read("tol_disp", c.solver.tol_disp);
    sr.read("max_iter", c.solver.max_iter);
    sr.read("n_steps", c.solver.n0);
    sr.read("max_displacement", c.solver.max_displacement);
    sr.read("doubling_window", c.solver.doubling_window);
    sr.read("max_halvings", c.solver.max_halvings);
    sr.finish();
  }
  if (const json* d = r.object("dynamics")) {
    ObjectReader dr(*d, "dynamics");
    dr.read("enabled", c.dynamics.enabled);
    dr.read("rho_inf", c.dynamics.rho_inf);
    dr.read("dt", c.dynamics.dt);
    dr.finish();
  }
  if (const json* k = r.object("contact")) {
    ObjectReader cr(*k, "contact");
    cr.read("enabled", c.contact_enabled);
    cr.read_enum("formulation", c.contact.formulation, kFormulationNames);
    if (const json* p = cr.object("point_law")) c.contact.point_law = parse_law(*p, "contact.point_law");
    if (const json* p = cr.object("line_law")) c.contact.line_law = parse_law(*p, "contact.line_law");
    if (const json* a = cr.object("abc")) {
      ObjectReader ar(*a, "contact.abc");
      ar.read("alpha1_rad", c.contact.abc.alpha1);
      ar.read("alpha2_rad", c.contact.abc.alpha2);
      ar.read_enum("variant", c.contact.abc.variant, kAbcNames);
      ar.finish();
    }
    cr.read("n_segments", c.contact.n_segments);
    cr.read("n_gauss_per_segment", c.contact.n_gauss_per_segment);
    cr.read("search_margin", c.contact.search_margin);
    cr.finish();
  }
  if (const json* o = r.object("output")) {
    ObjectReader orr(*o, "output");
    orr.read("csv", c.output.csv);
    orr.read("geometry", c.output.geometry);
    orr.read("geometry_every", c.output.geometry_every);
    orr.read("reference_elements", c.output.reference_elements);
    orr.finish();
  }
  r.finish();
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  json root;
  root["schema_version"] = c.schema_version;
  root["name"] = c.name;
  root["element"] = name_of(c.element, kElementNames);
  root["integration"] = name_of(c.integration, kIntegrationNames);
  root["geometry"] = std::visit([](const auto& g) { return write_geometry(g); }, c.geometry);
  root["t_end"] = c.t_end;
  root["solver"] = {{"tol_res", c.solver.tol_res},
                    {"tol_disp", c.solver.tol_disp},
                    {"max_iter", c.solver.max_iter},
                    {"n_steps", c.solver.n0},
                    {"max_displacement", number(c.solver.max_displacement)},
                    {"doubling_window", c.solver.doubling_window},
                    {"max_halvings", c.solver.max_halvings}};
  root["dynamics"] = {{"enabled", c.dynamics.enabled}, {"rho_inf", c.dynamics.rho_inf}, {"dt", c.dynamics.dt}};
  root["contact"] = {{"enabled", c.contact_enabled},
                     {"formulation", name_of(c.contact.formulation, kFormulationNames)},
                     {"point_law", write_law(c.contact.point_law)},
                     {"line_law", write_law(c.contact.line_law)},
                     {"abc",
                      {{"alpha1_rad", c.contact.abc.alpha1},
                       {"alpha2_rad", c.contact.abc.alpha2},
                       {"variant", name_of(c.contact.abc.variant, kAbcNames)}}},
                     {"n_segments", c.contact.n_segments},
                     {"n_gauss_per_segment", c.contact.n_gauss_per_segment},
                     {"search_margin", c.contact.search_margin}};
  root["output"] = {{"csv", c.output.csv},
                    {"geometry", c.output.geometry},
                    {"geometry_every", c.output.geometry_every},
                    {"reference_elements", c.output.reference_elements}};
  return root.dump(2) + "\n";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

struct GeometryValidator {
  ElementType element;

  void operator()(const ArcGeometry& g) const {
    const int n = g.n_elements;
    require(n >= 1 && n <= 512 && (n & (n - 1)) == 0, "geometry.n_elements: must be a power of two in [1, 512]");
    require(positive(g.radius) && positive(g.side) && positive(g.E) && positive(g.G) && positive(g.rho),
            "geometry: radius, side, E, G and rho must be positive");
    require(g.angle_deg > 0.0 && g.angle_deg < 360.0, "geometry.angle_deg: must lie in (0, 360)");
    require(element == ElementType::SimoReissner, "element: the arc is initially curved and needs simo_reissner");
  }
  void operator()(const HelixGeometry& g) const {
    require(g.n_elements >= 1, "geometry.n_elements: must be at least 1");
    require(positive(g.total_length) && positive(g.total_coils) && positive(g.coils) && positive(g.radius) &&
                positive(g.E) && positive(g.G) && positive(g.rho) && positive(g.shear_correction),
            "geometry: lengths, coil counts and material constants must be positive");
    require(g.coils <= g.total_coils, "geometry.coils: cannot exceed total_coils");
    require(g.ramp_peak >= 0.0 && g.ramp_release >= g.ramp_peak, "geometry: need 0 <= ramp_peak <= ramp_release");
    require(element == ElementType::SimoReissner, "element: the helix is initially curved and needs simo_reissner");
    require(!g.guide_cylinder || positive(g.guide_radius), "geometry.guide_radius: must be positive");
  }
  void operator()(const RopeGeometry& g) const {
    require(g.fibers == 1 || g.fibers == 7, "geometry.fibers: supported bundles have 1 or 7 fibers");
    require(g.n_elements >= 1, "geometry.n_elements: must be at least 1");
    require(positive(g.length) && positive(g.radius) && positive(g.E) && positive(g.G) && positive(g.rho),
            "geometry: length, radius and material constants must be positive");
    require(std::isfinite(g.axial_force) && std::isfinite(g.rotations), "geometry: loads must be finite");
    require(g.initial_gap >= 0.0 && std::isfinite(g.initial_gap), "geometry.initial_gap: must be non-negative");
  }
  void operator()(const CrossingGeometry& g) const {
    require(g.n_elements >= 1, "geometry.n_elements: must be at least 1");
    require(g.angle_deg > 0.0 && g.angle_deg <= 90.0, "geometry.angle_deg: must lie in (0, 90]");
    require(positive(g.length) && positive(g.radius) && positive(g.E) && positive(g.G) && positive(g.rho),
            "geometry: length, radius and material constants must be positive");
    require(std::isfinite(g.initial_gap) && std::isfinite(g.push_force), "geometry: gap and force must be finite");
    require(element == ElementType::TorsionFree,
            "element: crossing fibers use torsion_free elements (their supports cannot block an oblique axial spin)");
  }
};

}  // namespace

void validate_config(const ScenarioConfig& c) {
  require(c.schema_version == kSchemaVersion, "schema_version: unsupported");
  require(!c.name.empty(), "name: must not be empty");
  std::visit(GeometryValidator{c.element}, c.geometry);
  require(positive(c.t_end), "t_end: must be positive");
  require(positive(c.solver.tol_res) && positive(c.solver.tol_disp), "solver: tolerances must be positive");
  require(c.solver.max_iter >= 1, "solver.max_iter: must be at least 1");
  require(c.solver.n0 >= 1, "solver.n_steps: must be at least 1");
  require(c.solver.max_displacement > 0.0, "solver.max_displacement: must be positive (null for no limit)");
  require(c.solver.doubling_window >= 1, "solver.doubling_window: must be at least 1");
  require(c.solver.max_halvings >= 0, "solver.max_halvings: must be non-negative");
  if (c.dynamics.enabled) {
    require(c.dynamics.rho_inf >= 0.0 && c.dynamics.rho_inf <= 1.0, "dynamics.rho_inf: must lie in [0, 1]");
    require(positive(c.dynamics.dt), "dynamics.dt: must be positive");
  }
  if (c.contact_enabled) {
    const ContactSettings& s = c.contact;
    if (s.formulation != ContactFormulation::Line) require(s.point_law.valid(), "contact.point_law: invalid");
    if (s.formulation != ContactFormulation::Point) require(s.line_law.valid(), "contact.line_law: invalid");
    if (s.formulation == ContactFormulation::AllAngle) require(s.abc.valid(), "contact.abc: need 0 <= alpha1 < alpha2 <= pi/2");
    require(s.n_segments >= 1 && s.n_gauss_per_segment >= 1, "contact: segment and Gauss counts must be positive");
    require(s.search_margin >= 0.0, "contact.search_margin: must be non-negative");
  }
  require(c.output.geometry_every >= 1, "output.geometry_every: must be at least 1");
  require(c.output.reference_elements >= 1, "output.reference_elements: must be at least 1");
}

int element_count(const ScenarioConfig& c) {
  return std::visit([](const auto& g) { return g.n_elements; }, c.geometry);
}

ScenarioConfig with_elements(const ScenarioConfig& c, int n) {
  ScenarioConfig out = c;
  std::visit([n](auto& g) { g.n_elements = n; }, out.geometry);
  return out;
}

ScenarioConfig default_config(const std::string& kind) {
  constexpr double deg = std::numbers::pi / 180.0;
  ScenarioConfig c;
  c.name = kind;
  if (kind == "arc") {
    c.geometry = ArcGeometry{};
    c.solver.n0 = 4;
    c.solver.tol_res = 1e-4;
    c.solver.tol_disp = 1e-9;
  } else if (kind == "helix") {
    c.geometry = HelixGeometry{};
    c.t_end = 10.0;
    c.dynamics = {true, 1.0, 1e-3};
    c.contact_enabled = true;
    c.contact.formulation = ContactFormulation::Line;
    c.contact.line_law = {PenaltyVariant::QuadraticRegularized, 1e-2, 1.0};
    c.contact.n_segments = 4;
    c.contact.n_gauss_per_segment = 5;
    c.output.geometry_every = 100;
  } else if (kind == "rope") {
    c.element = ElementType::TorsionFree;
    c.geometry = RopeGeometry{};
    c.solver.n0 = 80;
    c.solver.max_displacement = 0.002;
    c.contact_enabled = true;
    c.contact.formulation = ContactFormulation::Line;
    c.contact.line_law = {PenaltyVariant::QuadraticRegularized, 1e6, 0.002};
    c.contact.n_segments = 4;
    c.contact.n_gauss_per_segment = 5;
    c.output.geometry_every = 20;
  } else if (kind == "crossing") {
    const CrossingGeometry g;
    c.element = ElementType::TorsionFree;
    c.geometry = g;
    c.solver.n0 = 4;
    c.contact_enabled = true;
    c.contact.formulation = ContactFormulation::AllAngle;
    c.contact.point_law = {PenaltyVariant::QuadraticRegularized, 2.4e5, 0.1 * g.radius};
    c.contact.line_law = {PenaltyVariant::QuadraticRegularized, 2.0e4, 0.1 * g.radius};
    c.contact.abc = {40.0 * deg, 45.0 * deg, AbcVariant::ForceBased};
    c.contact.n_segments = 4;
    c.contact.n_gauss_per_segment = 5;
  } else {
    throw ConfigError("unknown scenario kind '" + kind + "' (allowed: arc, helix, rope, crossing)");
  }
  return c;
}

}  // namespace beamfe
