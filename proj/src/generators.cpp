#include "beamfe/generators.hpp"

#include <cmath>
#include <numbers>

#include "beamfe/errors.hpp"
#include "beamfe/rotation.hpp"

namespace beamfe {

using Eigen::Vector3d;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d frame_from(const Vector3d& tangent, const Vector3d& up) {
  const Vector3d g1 = tangent.normalized();
  Vector3d g2 = up.cross(g1);
  if (g2.norm() < 1e-8) g2 = Vector3d::UnitX().cross(g1);
  g2.normalize();
  Eigen::Matrix3d lambda;
  lambda.col(0) = g1;
  lambda.col(1) = g2;
  lambda.col(2) = g1.cross(g2);
  return lambda;
}

void add_parameter(Scenario& s, const std::string& name, double value) { s.parameters.emplace_back(name, value); }

void build_arc(Scenario& s, const ArcGeometry& g) {
  const double r0 = g.radius;
  const double length = r0 * g.angle_deg * kPi / 180.0;
  const auto r = [r0](double t) { return Vector3d(r0 * std::sin(t / r0), r0 * (1.0 - std::cos(t / r0)), 0.0); };
  const auto tangent = [r0](double t) { return Vector3d(std::cos(t / r0), std::sin(t / r0), 0.0); };
  const FiberGeometry geo = curve_fiber(r, tangent, length, g.n_elements);
  s.model.add_fiber(geo, CrossSection::square(g.side, g.rho), {g.E, g.G});
  const Fiber& f = s.model.fibers()[0];
  // Clamp: position and triad held. The nodal tangent stays free so that the
  // shear strain at the support is not forced to zero.
  s.model.fix_centerline(f.nodes.front(), {true, true, true, false, false, false});
  s.model.fix_rotation(f.nodes.front(), {true, true, true});
  s.model.add_load({f.nodes.back(), g.tip_force, Vector3d::Zero(), Schedule::ramp(0.0, s.t_end)});
  s.reaction_nodes = {f.nodes.front()};
  add_parameter(s, "arc_radius", r0);
  add_parameter(s, "arc_angle_deg", g.angle_deg);
  add_parameter(s, "arc_length", length);
  add_parameter(s, "section_side", g.side);
  add_parameter(s, "slenderness_r0_over_side", r0 / g.side);
  add_parameter(s, "youngs_modulus", g.E);
  add_parameter(s, "shear_modulus", g.G);
  add_parameter(s, "torsion_constant_factor", 0.1406);
  add_parameter(s, "tip_force_x", g.tip_force.x());
  add_parameter(s, "tip_force_y", g.tip_force.y());
  add_parameter(s, "tip_force_z", g.tip_force.z());
}

void build_helix(Scenario& s, const HelixGeometry& g) {
  const HelixCurve helix(g.total_length, g.total_coils);
  const double beta_end = 2.0 * kPi * g.coils;
  const double length = helix.arc_length(beta_end);
  const auto r = [&helix](double t) { return helix.position(helix.beta_at(t)); };
  const auto tangent = [&helix](double t) { return helix.derivative(helix.beta_at(t)).normalized(); };
  const FiberGeometry geo = curve_fiber(r, tangent, length, g.n_elements);
  CrossSection section = CrossSection::circular(g.radius, g.rho, g.shear_correction);
  s.model.add_fiber(geo, section, {g.E, g.G});
  const Fiber& f = s.model.fibers()[0];
  s.model.fix_centerline(f.nodes.front(), {true, true, true, false, false, false});
  s.model.fix_rotation(f.nodes.front(), {true, true, true});

  Schedule pulse;
  pulse.points = {{0.0, 0.0}, {g.ramp_peak, 1.0}, {g.ramp_release, 0.0}};
  const Vector3d force(0.0, 0.0, g.tip_force_z);
  // The tip lies off the helix axis; the moment cancels the lever arm of the
  // force about the axis in the reference configuration.
  const Vector3d tip = helix.position(beta_end);
  const Vector3d axis_point(0.0, -helix.R0, tip.z());
  const Vector3d moment = g.balance_moment ? Vector3d(-(tip - axis_point).cross(force)) : Vector3d::Zero();
  s.model.add_load({f.nodes.back(), force, moment, pulse});
  s.reaction_nodes = {f.nodes.front()};
  s.moment_point = Vector3d(0.0, -helix.R0, 0.0);
  if (g.guide_cylinder) s.contact.cylinders.push_back({Vector3d(0.0, -helix.R0, 0.0), Vector3d::UnitZ(), g.guide_radius});

  add_parameter(s, "total_length", g.total_length);
  add_parameter(s, "total_coils", g.total_coils);
  add_parameter(s, "helix_radius_R0", helix.R0);
  add_parameter(s, "modelled_coils", g.coils);
  add_parameter(s, "modelled_length", length);
  add_parameter(s, "section_radius", g.radius);
  add_parameter(s, "youngs_modulus", g.E);
  add_parameter(s, "shear_modulus", g.G);
  add_parameter(s, "density", g.rho);
  add_parameter(s, "shear_correction", g.shear_correction);
  add_parameter(s, "tip_force_z", g.tip_force_z);
  add_parameter(s, "tip_moment_x", moment.x());
  add_parameter(s, "ramp_peak", g.ramp_peak);
  add_parameter(s, "ramp_release", g.ramp_release);
  if (g.guide_cylinder) add_parameter(s, "guide_radius", g.guide_radius);
}

void build_rope(Scenario& s, const RopeGeometry& g) {
  s.initial_equilibrium = true;
  std::vector<Vector3d> centers = {Vector3d::Zero()};
  if (g.fibers == 7) {
    for (int k = 0; k < 6; ++k) {
      const double phi = k * kPi / 3.0;
      centers.push_back((2.0 * g.radius + g.initial_gap) * Vector3d(std::cos(phi), std::sin(phi), 0.0));
    }
  }
  const CrossSection section = CrossSection::circular(g.radius, g.rho);
  const double turns = 2.0 * kPi * g.rotations;
  const double t_end = s.t_end;
  for (const Vector3d& c : centers) {
    const int fi = s.model.add_fiber(straight_fiber_geometry(c, Vector3d::UnitZ(), g.length, g.n_elements), section,
                                     {g.E, g.G});
    const Fiber& f = s.model.fibers()[fi];
    const int front = f.nodes.front();
    const int back = f.nodes.back();
    const int cf = s.model.nodes()[front].centerline;
    const double rho = std::hypot(c.x(), c.y());
    const double phi0 = std::atan2(c.y(), c.x());
    // Front end points travel on circles about the bundle axis.
    s.model.add_dirichlet({cf, [=](double t) { return rho * std::cos(phi0 + turns * t / t_end); }});
    s.model.add_dirichlet({cf + 1, [=](double t) { return rho * std::sin(phi0 + turns * t / t_end); }});
    s.model.fix_centerline(front, {false, false, true, false, false, false});
    // Back end points slide axially under a constant tension.
    s.model.fix_centerline(back, {true, true, false, false, false, false});
    s.model.add_load({back, Vector3d(0.0, 0.0, g.axial_force), Vector3d::Zero(), Schedule::constant(1.0)});
    // Simo-Reissner fibers: the rigid spin about the fiber axis is blocked at the back end.
    if (s.model.type() == ElementType::SimoReissner) s.model.fix_rotation(back, {false, false, true});
    s.reaction_nodes.push_back(front);
  }
  add_parameter(s, "fibers", g.fibers);
  add_parameter(s, "fiber_length", g.length);
  add_parameter(s, "fiber_radius", g.radius);
  add_parameter(s, "slenderness", g.length / g.radius);
  add_parameter(s, "youngs_modulus", g.E);
  add_parameter(s, "shear_modulus", g.G);
  add_parameter(s, "elements_per_fiber", g.n_elements);
  add_parameter(s, "axial_force", g.axial_force);
  add_parameter(s, "rotations", g.rotations);
  add_parameter(s, "initial_gap", g.initial_gap);
}

void build_crossing(Scenario& s, const CrossingGeometry& g) {
  const double alpha = g.angle_deg * kPi / 180.0;
  const Vector3d d1 = Vector3d::UnitX();
  const Vector3d d2(std::cos(alpha), std::sin(alpha), 0.0);
  const Vector3d lift(0.0, 0.0, 2.0 * g.radius + g.initial_gap);
  const CrossSection section = CrossSection::circular(g.radius, g.rho);
  s.model.add_fiber(straight_fiber_geometry(-0.5 * g.length * d1, d1, g.length, g.n_elements), section, {g.E, g.G});
  s.model.add_fiber(straight_fiber_geometry(lift - 0.5 * g.length * d2, d2, g.length, g.n_elements), section,
                    {g.E, g.G});
  for (const Fiber& f : s.model.fibers()) {
    s.model.fix_centerline(f.nodes.front(), {true, true, true, false, false, false});
    s.model.fix_centerline(f.nodes.back(), {true, true, true, false, false, false});
    s.reaction_nodes.push_back(f.nodes.front());
    s.reaction_nodes.push_back(f.nodes.back());
  }
  const Fiber& upper = s.model.fibers()[1];
  // With an odd element count the crossing lies inside an element and the push is shared by the two central nodes.
  const Vector3d push(0.0, 0.0, -g.push_force);
  if (g.n_elements % 2 == 0) {
    s.model.add_load({upper.nodes[g.n_elements / 2], push, Vector3d::Zero(), Schedule::ramp(0.0, s.t_end)});
  } else {
    for (int k : {g.n_elements / 2, g.n_elements / 2 + 1})
      s.model.add_load({upper.nodes[k], 0.5 * push, Vector3d::Zero(), Schedule::ramp(0.0, s.t_end)});
  }
  add_parameter(s, "crossing_angle_deg", g.angle_deg);
  add_parameter(s, "fiber_length", g.length);
  add_parameter(s, "fiber_radius", g.radius);
  add_parameter(s, "youngs_modulus", g.E);
  add_parameter(s, "push_force", g.push_force);
}

}  // namespace

HelixCurve::HelixCurve(double total_length, double total_coils) {
  const double beta_max = 2.0 * kPi * total_coils;
  c = 6.0 / (beta_max * beta_max);
  R0 = 1.0;
  R0 = total_length / arc_length(beta_max);
}

Vector3d HelixCurve::position(double beta) const {
  return R0 * Vector3d(std::sin(beta), std::cos(beta) - 1.0, c * beta * beta);
}

Vector3d HelixCurve::derivative(double beta) const {
  return R0 * Vector3d(std::cos(beta), -std::sin(beta), 2.0 * c * beta);
}

double HelixCurve::arc_length(double beta) const {
  // int_0^b sqrt(1 + a^2 x^2) dx with a = 2c.
  const double a = 2.0 * c;
  const double q = std::sqrt(1.0 + a * a * beta * beta);
  return R0 * 0.5 * (beta * q + std::asinh(a * beta) / a);
}

double HelixCurve::beta_at(double s) const {
  double beta = s / R0;
  for (int it = 0; it < 50; ++it) {
    const double f = arc_length(beta) - s;
    const double df = derivative(beta).norm();
    const double step = f / df;
    beta -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(beta))) break;
  }
  return beta;
}

FiberGeometry curve_fiber(const std::function<Vector3d(double)>& r, const std::function<Vector3d(double)>& t,
                          double length, int n_elements, const Vector3d& up) {
  FiberGeometry g;
  for (int i = 0; i <= n_elements; ++i) {
    const double s = length * i / n_elements;
    g.positions.push_back(r(s));
    g.tangents.push_back(t(s).normalized());
    g.node_triads.push_back(frame_from(g.tangents.back(), up));
  }
  for (int e = 0; e < n_elements; ++e) {
    // Mid triad aligned with the interpolated reference tangent at xi = 0.
    const ElementCenterlineDofs dofs{g.positions[e], g.tangents[e], g.positions[e + 1], g.tangents[e + 1]};
    const double l = element_arc_length(dofs);
    const Vector3d tm = hermite_eval<double>(dofs.to_vector(), 0.0, l, 1);
    g.mid_triads.push_back(frame_from(tm, up));
  }
  return g;
}

FiberGeometry straight_fiber_geometry(const Vector3d& start, const Vector3d& direction, double length,
                                      int n_elements) {
  const Vector3d d = direction.normalized();
  return curve_fiber([&](double s) { return Vector3d(start + s * d); }, [&](double) { return d; }, length, n_elements,
                     std::abs(d.z()) > 0.9 ? Vector3d::UnitX() : Vector3d::UnitZ());
}

Scenario build_scenario(const ScenarioConfig& config) {
  validate_config(config);
  Scenario s{Model(config.element, config.integration), {}, config.solver, config.dynamics, config.t_end, {}, {}, {}};
  s.contact.enabled = config.contact_enabled;
  s.contact.settings = config.contact;
  std::visit(
      [&s](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ArcGeometry>) build_arc(s, g);
        if constexpr (std::is_same_v<G, HelixGeometry>) build_helix(s, g);
        if constexpr (std::is_same_v<G, RopeGeometry>) build_rope(s, g);
        if constexpr (std::is_same_v<G, CrossingGeometry>) build_crossing(s, g);
      },
      config.geometry);
  if (!s.contact.cylinders.empty()) s.contact.enabled = true;
  return s;
}

}  // namespace beamfe
