#include "beamfe/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "beamfe/errors.hpp"
#include "beamfe/quadrature.hpp"

namespace beamfe {

using Eigen::Vector3d;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("malformed number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("malformed integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

const std::string& csv_header() {
  static const std::string header =
      "step,time,n_dofs,l2_error,kinetic_energy,internal_energy,contact_energy,total_energy,"
      "reaction_fx,reaction_fy,reaction_fz,reaction_mx,reaction_my,reaction_mz,"
      "newton_iterations,accumulated_iterations,active_contact_points,active_line_points,"
      "rigid_contact_points,candidate_pairs";
  return header;
}

std::string csv_row(const ResultRecord& r) {
  std::string s = std::to_string(r.step);
  const auto add = [&s](const std::string& v) {
    s += ',';
    s += v;
  };
  add(format_double(r.time));
  add(std::to_string(r.n_dofs));
  for (double v : {r.l2_error, r.kinetic_energy, r.internal_energy, r.contact_energy, r.total_energy})
    add(format_double(v));
  for (int i = 0; i < 3; ++i) add(format_double(r.reaction_force(i)));
  for (int i = 0; i < 3; ++i) add(format_double(r.reaction_moment(i)));
  for (int v : {r.newton_iterations, r.accumulated_iterations, r.active_contact_points, r.active_line_points,
                r.rigid_contact_points, r.candidate_pairs})
    add(std::to_string(v));
  return s;
}

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << csv_header() << '\n';
  for (const ResultRecord& r : records) out << csv_row(r) << '\n';
}

void write_csv(const std::string& path, const std::vector<ResultRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_csv(out, records);
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ResultRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw IoError("CSV header mismatch");
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line, ',');
    if (c.size() != 20) throw IoError("CSV row with " + std::to_string(c.size()) + " columns");
    ResultRecord r;
    r.step = parse_int(c[0]);
    r.time = parse_double(c[1]);
    r.n_dofs = parse_int(c[2]);
    r.l2_error = parse_double(c[3]);
    r.kinetic_energy = parse_double(c[4]);
    r.internal_energy = parse_double(c[5]);
    r.contact_energy = parse_double(c[6]);
    r.total_energy = parse_double(c[7]);
    for (int i = 0; i < 3; ++i) r.reaction_force(i) = parse_double(c[8 + i]);
    for (int i = 0; i < 3; ++i) r.reaction_moment(i) = parse_double(c[11 + i]);
    r.newton_iterations = parse_int(c[14]);
    r.accumulated_iterations = parse_int(c[15]);
    r.active_contact_points = parse_int(c[16]);
    r.active_line_points = parse_int(c[17]);
    r.rigid_contact_points = parse_int(c[18]);
    r.candidate_pairs = parse_int(c[19]);
    out.push_back(r);
  }
  return out;
}

GeometryFrame sample_geometry(const Model& model, const ModelState& state, double time) {
  GeometryFrame frame;
  frame.time = time;
  for (std::size_t fi = 0; fi < model.fibers().size(); ++fi) {
    const Fiber& f = model.fibers()[fi];
    FiberPolyline p;
    p.id = static_cast<int>(fi);
    p.radius = f.section.radius;
    for (int e : f.elements) {
      const ElementCenterlineDofs dofs = model.centerline(e, state);
      for (int k = 0; k < kSamplesPerElement; ++k) {
        const double xi = -1.0 + 2.0 * k / (kSamplesPerElement - 1);
        p.points.push_back(eval_centerline(dofs, model.reference(e), xi, 0));
      }
    }
    frame.fibers.push_back(std::move(p));
  }
  return frame;
}

void write_geometry_frame(std::ostream& out, const GeometryFrame& frame) {
  out << "FRAME t=" << format_double(frame.time) << '\n';
  for (const FiberPolyline& f : frame.fibers) {
    out << "FIBER id=" << f.id << " R=" << format_double(f.radius) << '\n';
    for (const Vector3d& p : f.points) {
      out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
    }
  }
}

std::vector<GeometryFrame> parse_geometry(std::istream& in) {
  std::vector<GeometryFrame> frames;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("FRAME t=", 0) == 0) {
      frames.push_back({parse_double(line.substr(8)), {}});
    } else if (line.rfind("FIBER id=", 0) == 0) {
      if (frames.empty()) throw IoError("FIBER before FRAME at line " + std::to_string(line_no));
      const std::size_t r = line.find(" R=");
      if (r == std::string::npos) throw IoError("FIBER line without radius at line " + std::to_string(line_no));
      FiberPolyline p;
      p.id = parse_int(line.substr(9, r - 9));
      p.radius = parse_double(line.substr(r + 3));
      frames.back().fibers.push_back(std::move(p));
    } else {
      if (frames.empty() || frames.back().fibers.empty()) {
        throw IoError("point outside a FIBER block at line " + std::to_string(line_no));
      }
      const std::vector<std::string> c = split(line, ' ');
      if (c.size() != 3) throw IoError("expected 'x y z' at line " + std::to_string(line_no));
      frames.back().fibers.back().points.emplace_back(parse_double(c[0]), parse_double(c[1]), parse_double(c[2]));
    }
  }
  return frames;
}

double CenterlineCurve::length() const {
  double l = 0.0;
  for (const ElementReferenceGeometry& r : reference) l += r.length();
  return l;
}

CenterlineCurve fiber_curve(const Model& model, const ModelState& state, int fiber) {
  CenterlineCurve c;
  for (int e : model.fibers().at(fiber).elements) {
    c.reference.push_back(model.reference(e));
    c.current.push_back(model.centerline(e, state));
  }
  return c;
}

namespace {

const QuadratureRule& rule10() {
  static const QuadratureRule r = gauss_legendre(10);
  return r;
}

// Reference arc length from xi = -1 to xi within one element.
double partial_length(const ElementReferenceGeometry& ref, double xi) {
  const QuadratureRule& q = rule10();
  const double half = 0.5 * (xi + 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x = -1.0 + half * (q.points[i] + 1.0);
    s += q.weights[i] * half * ref.jacobian(x);
  }
  return s;
}

// Element parameter at which the partial length equals s (Newton on the monotone map).
double xi_at_length(const ElementReferenceGeometry& ref, double s) {
  double xi = std::clamp(2.0 * s / ref.length() - 1.0, -1.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const double step = (partial_length(ref, xi) - s) / ref.jacobian(xi);
    xi = std::clamp(xi - step, -1.0, 1.0);
    if (std::abs(step) < 1e-15) break;
  }
  return xi;
}

}  // namespace

Vector3d position_at_arc_length(const CenterlineCurve& curve, double s, bool current) {
  const std::size_t n = curve.reference.size();
  double start = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const double l = curve.reference[e].length();
    if (s <= start + l || e + 1 == n) {
      const double xi = xi_at_length(curve.reference[e], std::clamp(s - start, 0.0, l));
      const ElementCenterlineDofs& dofs = current ? curve.current[e] : curve.reference[e].initial();
      return eval_centerline(dofs, curve.reference[e], xi, 0);
    }
    start += l;
  }
  return Vector3d::Zero();
}

double l2_error(const CenterlineCurve& solution, const CenterlineCurve& reference) {
  const QuadratureRule& q = rule10();
  double integral = 0.0;
  double start = 0.0;
  for (std::size_t e = 0; e < solution.reference.size(); ++e) {
    const ElementReferenceGeometry& ref = solution.reference[e];
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double xi = q.points[i];
      const double s = start + partial_length(ref, xi);
      const Vector3d rh = eval_centerline(solution.current[e], ref, xi, 0);
      integral += q.weights[i] * ref.jacobian(xi) * (rh - position_at_arc_length(reference, s)).squaredNorm();
    }
    start += ref.length();
  }
  double u_max = 0.0;
  for (std::size_t e = 0; e < reference.reference.size(); ++e) {
    const ElementReferenceGeometry& ref = reference.reference[e];
    std::vector<double> xs(q.points.begin(), q.points.end());
    xs.push_back(-1.0);
    xs.push_back(1.0);
    for (double xi : xs) {
      const Vector3d u = eval_centerline(reference.current[e], ref, xi, 0) - eval_centerline(ref.initial(), ref, xi, 0);
      u_max = std::max(u_max, u.norm());
    }
  }
  return std::sqrt(integral / solution.length()) / u_max;
}

}  // namespace beamfe
