#include "beamfe/contact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <unsupported/Eigen/AutoDiff>

#include "beamfe/quadrature.hpp"

namespace beamfe {

namespace {

using Eigen::Vector3d;
using AD24 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 24, 1>>;
using AD12 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 12, 1>>;

template <typename S>
using V3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using V24 = Eigen::Matrix<S, 24, 1>;

double value_of(double v) { return v; }
double value_of(const AD24& v) { return v.value(); }
double value_of(const AD12& v) { return v.value(); }

constexpr double kProjectionTol = 1e-12;
constexpr int kMaxProjectionIterations = 50;
const double kMinSinAngle = std::sin(2.0 * std::numbers::pi / 180.0);
constexpr double kMaxCondition = 1e8;

template <typename S>
struct PenaltyT {
  S f;
  S psi;
};

template <typename S>
PenaltyT<S> penalty_t(const S& g, const PenaltyLaw& law) {
  const double gv = value_of(g);
  const double eps = law.epsilon;
  const double gb = law.g_bar;
  if (law.variant == PenaltyVariant::Linear) {
    if (gv >= 0.0) return {S(0.0), S(0.0)};
    return {-eps * g, 0.5 * eps * g * g};
  }
  if (gv >= gb) return {S(0.0), S(0.0)};
  if (gv >= 0.0) {
    const S a = gb - g;
    return {eps * a * a / (2.0 * gb), eps * a * a * a / (6.0 * gb)};
  }
  return {eps * (0.5 * gb - g), eps * gb * gb / 6.0 + eps * (-0.5 * g * gb + 0.5 * g * g)};
}

template <typename S>
struct TransitionT {
  S k;
  S dk;
};

template <typename S>
TransitionT<S> transition_t(const S& z, const ABCParams& p) {
  const double z1 = p.z1();
  const double z2 = p.z2();
  const double zv = value_of(z);
  if (zv >= z1) return {S(1.0), S(0.0)};
  if (zv <= z2) return {S(0.0), S(0.0)};
  using std::cos;
  using std::sin;
  const double c = std::numbers::pi / (z1 - z2);
  const S arg = c * (z - z2);
  return {0.5 * (1.0 - cos(arg)), 0.5 * c * sin(arg)};
}

// z = |t1.t2| / (|t1||t2|) and its partial derivatives with respect to t1, t2.
template <typename S>
struct AngleT {
  S z;
  V3<S> dz_dt1;
  V3<S> dz_dt2;
};

template <typename S>
AngleT<S> angle_t(const V3<S>& t1, const V3<S>& t2) {
  using std::sqrt;
  const S n1 = sqrt(t1.dot(t1));
  const S n2 = sqrt(t2.dot(t2));
  const S c = t1.dot(t2);
  const double sgn = value_of(c) >= 0.0 ? 1.0 : -1.0;
  AngleT<S> a;
  a.z = sgn * c / (n1 * n2);
  a.dz_dt1 = (sgn / (n1 * n2)) * t2 - (a.z / (n1 * n1)) * t1;
  a.dz_dt2 = (sgn / (n1 * n2)) * t1 - (a.z / (n2 * n2)) * t2;
  return a;
}

// Curve derivatives of orders 0..2 at a (possibly active) parameter.
template <typename S>
struct CurvePoint {
  V3<S> r, rx, rxx;
};

template <typename S, typename Derived>
CurvePoint<S> curve_point(const Eigen::MatrixBase<Derived>& x, const S& xi, double length) {
  return {hermite_eval<S>(x, xi, length, 0), hermite_eval<S>(x, xi, length, 1), hermite_eval<S>(x, xi, length, 2)};
}

template <typename S>
Eigen::Matrix<S, 3, 12> hmat(const S& xi, double length, int order) {
  return hermite_matrix<S>(xi, length, order);
}

// Point contact kernel. Blend: nullptr for pure point contact.
template <typename S>
V24<S> point_kernel(const V24<S>& x, double l1, double l2, double xi_c, double eta_c, double sum_r,
                    const PenaltyLaw& law, const ABCParams* blend, double* energy, bool* active) {
  const auto x1 = x.template head<12>();
  const auto x2 = x.template tail<12>();
  V24<S> res = V24<S>::Zero();
  // One Newton step on the stationarity conditions from the converged
  // solution makes (xi, eta) carry their exact first derivatives.
  S xi(xi_c);
  S eta(eta_c);
  {
    const CurvePoint<S> a = curve_point<S>(x1, xi, l1);
    const CurvePoint<S> b = curve_point<S>(x2, eta, l2);
    const V3<S> d = a.r - b.r;
    const S f0 = a.rx.dot(d);
    const S f1 = -b.rx.dot(d);
    const S h00 = a.rxx.dot(d) + a.rx.dot(a.rx);
    const S h01 = -a.rx.dot(b.rx);
    const S h11 = -b.rxx.dot(d) + b.rx.dot(b.rx);
    const S det = h00 * h11 - h01 * h01;
    xi = xi - (h11 * f0 - h01 * f1) / det;
    eta = eta - (h00 * f1 - h01 * f0) / det;
  }
  const CurvePoint<S> a = curve_point<S>(x1, xi, l1);
  const CurvePoint<S> b = curve_point<S>(x2, eta, l2);
  const V3<S> d = a.r - b.r;
  using std::sqrt;
  const S dist = sqrt(d.dot(d));
  const V3<S> n = d / dist;
  const S g = dist - sum_r;
  const PenaltyT<S> pen = penalty_t(g, law);
  if (active) *active = value_of(pen.f) > 0.0 || value_of(pen.psi) > 0.0;
  if (value_of(pen.f) == 0.0 && value_of(pen.psi) == 0.0) {
    if (energy) *energy = 0.0;
    return res;
  }
  const Eigen::Matrix<S, 3, 12> h1 = hmat<S>(xi, l1, 0);
  const Eigen::Matrix<S, 3, 12> h2 = hmat<S>(eta, l2, 0);
  V24<S> grad_g;
  grad_g.template head<12>() = h1.transpose() * n;
  grad_g.template tail<12>() = -(h2.transpose() * n);

  if (!blend) {
    res = -(S(1.0) * pen.f) * grad_g;
    if (energy) *energy = value_of(pen.psi);
    return res;
  }
  const AngleT<S> ang = angle_t<S>(a.rx, b.rx);
  const TransitionT<S> k = transition_t(ang.z, *blend);
  if (value_of(k.k) == 1.0) {
    // Pure line regime: the point law carries no weight.
    if (active) *active = false;
    if (energy) *energy = 0.0;
    return res;
  }
  if (blend->variant == AbcVariant::ForceBased) {
    res = -((S(1.0) - k.k) * pen.f) * grad_g;
    if (energy) *energy = value_of(S((S(1.0) - k.k) * pen.psi));
    return res;
  }
  // Potential-based: Pi = (1 - k^2) Psi, so the residual also carries -2 k k' Psi grad z.
  res = -((S(1.0) - k.k * k.k) * pen.f) * grad_g;
  if (energy) *energy = value_of(S((S(1.0) - k.k * k.k) * pen.psi));
  if (value_of(k.k) != 0.0 && value_of(k.dk) != 0.0) {
    // Implicit derivatives of (xi, eta): H d(xi, eta)/dx = -dF/dx.
    const Eigen::Matrix<S, 3, 12> h1x = hmat<S>(xi, l1, 1);
    const Eigen::Matrix<S, 3, 12> h2x = hmat<S>(eta, l2, 1);
    Eigen::Matrix<S, 2, 24> B;
    B.template block<1, 12>(0, 0) = d.transpose() * h1x + a.rx.transpose() * h1;
    B.template block<1, 12>(0, 12) = -(a.rx.transpose() * h2);
    B.template block<1, 12>(1, 0) = -(b.rx.transpose() * h1);
    B.template block<1, 12>(1, 12) = -(d.transpose() * h2x) + b.rx.transpose() * h2;
    const S h00 = a.rxx.dot(d) + a.rx.dot(a.rx);
    const S h01 = -a.rx.dot(b.rx);
    const S h11 = -b.rxx.dot(d) + b.rx.dot(b.rx);
    const S det = h00 * h11 - h01 * h01;
    const Eigen::Matrix<S, 1, 24> dxi = -(h11 * B.row(0) - h01 * B.row(1)) / det;
    const Eigen::Matrix<S, 1, 24> deta = -(h00 * B.row(1) - h01 * B.row(0)) / det;
    V24<S> grad_z;
    grad_z.template head<12>() = h1x.transpose() * ang.dz_dt1;
    grad_z.template tail<12>() = h2x.transpose() * ang.dz_dt2;
    grad_z += ang.dz_dt1.dot(a.rxx) * dxi.transpose() + ang.dz_dt2.dot(b.rxx) * deta.transpose();
    res -= (S(2.0) * k.k * k.dk * pen.psi) * grad_z;
  }
  return res;
}

// Line contact kernel over the Gauss points of one slave/master pair.
template <typename S>
V24<S> line_kernel(const V24<S>& x, double l1, double l2, const std::vector<LineGaussRecord>& records, int master,
                   double sum_r, const PenaltyLaw& law, const ABCParams* blend, double* energy, int* active) {
  const auto x1 = x.template head<12>();
  const auto x2 = x.template tail<12>();
  V24<S> res = V24<S>::Zero();
  double e = 0.0;
  int n_active = 0;
  using std::sqrt;
  for (const LineGaussRecord& rec : records) {
    if (rec.master != master) continue;
    const S xi(rec.xi);
    S eta(rec.eta);
    const CurvePoint<S> a = curve_point<S>(x1, xi, l1);
    {
      const CurvePoint<S> b = curve_point<S>(x2, eta, l2);
      const V3<S> d = a.r - b.r;
      eta = eta - (-b.rx.dot(d)) / (-b.rxx.dot(d) + b.rx.dot(b.rx));
    }
    const CurvePoint<S> b = curve_point<S>(x2, eta, l2);
    const V3<S> d = a.r - b.r;
    const S dist = sqrt(d.dot(d));
    const V3<S> n = d / dist;
    const S g = dist - sum_r;
    const PenaltyT<S> pen = penalty_t(g, law);
    if (value_of(pen.f) == 0.0 && value_of(pen.psi) == 0.0) continue;
    const Eigen::Matrix<S, 3, 12> h1 = hmat<S>(xi, l1, 0);
    const Eigen::Matrix<S, 3, 12> h2 = hmat<S>(eta, l2, 0);
    V24<S> grad_g;
    grad_g.template head<12>() = h1.transpose() * n;
    grad_g.template tail<12>() = -(h2.transpose() * n);
    const double w = rec.weight;

    S scale(1.0);
    S k_val(1.0);
    TransitionT<S> k{S(1.0), S(0.0)};
    AngleT<S> ang;
    if (blend) {
      ang = angle_t<S>(a.rx, b.rx);
      k = transition_t(ang.z, *blend);
      k_val = k.k;
      if (value_of(k.k) == 0.0) continue;
      scale = blend->variant == AbcVariant::ForceBased ? k.k : S(k.k * k.k);
    }
    ++n_active;
    res -= (w * scale * pen.f) * grad_g;
    e += w * value_of(S(scale * pen.psi));
    if (blend && blend->variant == AbcVariant::PotentialBased && value_of(k.dk) != 0.0) {
      const Eigen::Matrix<S, 3, 12> h1x = hmat<S>(xi, l1, 1);
      const Eigen::Matrix<S, 3, 12> h2x = hmat<S>(eta, l2, 1);
      Eigen::Matrix<S, 1, 24> B;
      B.template head<12>() = -(b.rx.transpose() * h1);
      B.template tail<12>() = -(d.transpose() * h2x) + b.rx.transpose() * h2;
      const S h11 = -b.rxx.dot(d) + b.rx.dot(b.rx);
      const Eigen::Matrix<S, 1, 24> deta = -B / h11;
      V24<S> grad_z;
      grad_z.template head<12>() = h1x.transpose() * ang.dz_dt1;
      grad_z.template tail<12>() = h2x.transpose() * ang.dz_dt2;
      grad_z += ang.dz_dt2.dot(b.rxx) * deta.transpose();
      res += (w * S(2.0) * k_val * k.dk * pen.psi) * grad_z;
    }
  }
  if (energy) *energy = e;
  if (active) *active = n_active;
  return res;
}

V24<AD24> seed24(const Vector24& x) {
  V24<AD24> out;
  for (int i = 0; i < 24; ++i) out(i) = AD24(x(i), 24, i);
  return out;
}

void unpack24(const V24<AD24>& r, Vector24& value, Matrix24& jac) {
  for (int i = 0; i < 24; ++i) {
    value(i) = r(i).value();
    jac.row(i) = r(i).derivatives().transpose();
  }
}

Vector24 stack(const HermiteCurve& a, const HermiteCurve& b) {
  Vector24 x;
  x << a.x, b.x;
  return x;
}

// Symmetric 2x2 condition number from the closed-form eigenvalues.
double condition_2x2(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double r = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double l1 = std::abs(m + r);
  const double l2 = std::abs(m - r);
  const double lo = std::min(l1, l2);
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : std::max(l1, l2) / lo;
}

double sin_angle(const Vector3d& t1, const Vector3d& t2) { return t1.cross(t2).norm() / (t1.norm() * t2.norm()); }

struct BilateralNewton {
  double xi, eta, h00, h01, h11;
  bool converged;
};

BilateralNewton bilateral_newton(const HermiteCurve& c1, const HermiteCurve& c2, double xi, double eta) {
  const double scale = 0.5 * (c1.length + c2.length);
  for (int it = 0; it < kMaxProjectionIterations; ++it) {
    const CurvePoint<double> a = curve_point<double>(c1.x, xi, c1.length);
    const CurvePoint<double> b = curve_point<double>(c2.x, eta, c2.length);
    const Vector3d d = a.r - b.r;
    const double f0 = a.rx.dot(d);
    const double f1 = -b.rx.dot(d);
    const double h00 = a.rxx.dot(d) + a.rx.dot(a.rx);
    const double h01 = -a.rx.dot(b.rx);
    const double h11 = -b.rxx.dot(d) + b.rx.dot(b.rx);
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-300)) return {xi, eta, h00, h01, h11, false};
    const double dxi = -(h11 * f0 - h01 * f1) / det;
    const double deta = -(h00 * f1 - h01 * f0) / det;
    const bool small_residual = std::hypot(f0, f1) < 1e-10 * scale * scale;
    if (small_residual && std::hypot(dxi, deta) < kProjectionTol) return {xi, eta, h00, h01, h11, true};
    xi += dxi;
    eta += deta;
    if (!std::isfinite(xi) || !std::isfinite(eta) || std::abs(xi) > 5.0 || std::abs(eta) > 5.0) break;
  }
  return {xi, eta, 0, 0, 0, false};
}

}  // namespace

ClosestPointResult closest_point_bilateral(const HermiteCurve& c1, const HermiteCurve& c2) {
  struct Seed {
    double d2, xi, eta;
  };
  std::vector<Seed> seeds;
  const int n = 8;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double xi = -1.0 + (2.0 * i + 1.0) / n;
      const double eta = -1.0 + (2.0 * j + 1.0) / n;
      seeds.push_back({(c1.eval(xi) - c2.eval(eta)).squaredNorm(), xi, eta});
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.d2 < b.d2; });

  ClosestPointResult best;
  best.kind = ProjectionKind::Bilateral;
  bool have = false;
  bool have_interior = false;
  double best_h[3] = {0, 0, 0};
  const double box = 1.0 + 1e-12;
  for (std::size_t s = 0; s < std::min<std::size_t>(8, seeds.size()); ++s) {
    const BilateralNewton nw = bilateral_newton(c1, c2, seeds[s].xi, seeds[s].eta);
    if (!nw.converged) continue;
    // Only minima: the Hessian of the squared distance must be positive definite.
    if (!(nw.h00 > 0.0 && nw.h00 * nw.h11 - nw.h01 * nw.h01 > 0.0)) continue;
    const bool interior = std::abs(nw.xi) <= box && std::abs(nw.eta) <= box;
    const double dist = (c1.eval(nw.xi) - c2.eval(nw.eta)).norm();
    const bool better = !have || (interior && !have_interior) ||
                        (interior == have_interior && dist < best.distance - 1e-14 * (1.0 + dist));
    if (better) {
      have = true;
      have_interior = interior;
      best.xi = nw.xi;
      best.eta = nw.eta;
      best.distance = dist;
      best_h[0] = nw.h00;
      best_h[1] = nw.h01;
      best_h[2] = nw.h11;
    }
  }
  if (!have) {
    const Seed& s = seeds.front();
    best.xi = s.xi;
    best.eta = s.eta;
    best.distance = std::sqrt(s.d2);
    best.converged = false;
    best.status = sin_angle(c1.eval(s.xi, 1), c2.eval(s.eta, 1)) < kMinSinAngle ? ProjectionStatus::NonUnique
                                                                                  : ProjectionStatus::NotConverged;
    return best;
  }
  best.converged = true;
  const Vector3d t1 = c1.eval(best.xi, 1);
  const Vector3d t2 = c2.eval(best.eta, 1);
  if (sin_angle(t1, t2) < kMinSinAngle || condition_2x2(best_h[0], best_h[1], best_h[2]) > kMaxCondition) {
    best.status = ProjectionStatus::NonUnique;
  } else if (!have_interior) {
    best.status = ProjectionStatus::OutsideElement;
    best.xi = std::clamp(best.xi, -1.0, 1.0);
    best.eta = std::clamp(best.eta, -1.0, 1.0);
  } else {
    best.status = ProjectionStatus::Ok;
    best.xi = std::clamp(best.xi, -1.0, 1.0);
    best.eta = std::clamp(best.eta, -1.0, 1.0);
  }
  const Vector3d d = c1.eval(best.xi) - c2.eval(best.eta);
  best.distance = d.norm();
  best.normal = d / best.distance;
  return best;
}

ClosestPointResult closest_point_unilateral(const Vector3d& point, const HermiteCurve& master) {
  ClosestPointResult best;
  best.kind = ProjectionKind::Unilateral;
  struct Seed {
    double d2, eta;
  };
  std::vector<Seed> seeds;
  const int n = 16;
  for (int i = 0; i < n; ++i) {
    const double eta = -1.0 + (2.0 * i + 1.0) / n;
    seeds.push_back({(point - master.eval(eta)).squaredNorm(), eta});
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.d2 < b.d2; });
  const double scale = master.length;
  bool have = false;
  bool have_interior = false;
  const double box = 1.0 + 1e-12;
  for (std::size_t s = 0; s < 4; ++s) {
    double eta = seeds[s].eta;
    bool ok = false;
    for (int it = 0; it < kMaxProjectionIterations; ++it) {
      const CurvePoint<double> b = curve_point<double>(master.x, eta, master.length);
      const Vector3d d = point - b.r;
      const double f = -b.rx.dot(d);
      const double h = b.rx.dot(b.rx) - b.rxx.dot(d);
      if (!(std::abs(h) > 1e-300)) break;
      const double step = -f / h;
      if (std::abs(f) < 1e-10 * scale * scale && std::abs(step) < kProjectionTol) {
        ok = h > 0.0;
        break;
      }
      eta += step;
      if (!std::isfinite(eta) || std::abs(eta) > 5.0) break;
    }
    if (!ok) continue;
    const bool interior = std::abs(eta) <= box;
    const double dist = (point - master.eval(eta)).norm();
    const bool better = !have || (interior && !have_interior) ||
                        (interior == have_interior && dist < best.distance - 1e-14 * (1.0 + dist));
    if (better) {
      have = true;
      have_interior = interior;
      best.eta = eta;
      best.distance = dist;
    }
  }
  if (!have) {
    best.status = ProjectionStatus::NotConverged;
    return best;
  }
  best.converged = true;
  best.status = have_interior ? ProjectionStatus::Ok : ProjectionStatus::OutsideElement;
  best.eta = std::clamp(best.eta, -1.0, 1.0);
  if (have_interior) {
    const Vector3d d = point - master.eval(best.eta);
    best.distance = d.norm();
    best.normal = d / best.distance;
  }
  return best;
}

ContactAngle contact_angle(const Vector3d& t1, const Vector3d& t2) {
  const double z = std::min(1.0, std::abs(t1.dot(t2)) / (t1.norm() * t2.norm()));
  return {std::acos(z), z};
}

PenaltyValue penalty_force(double g, const PenaltyLaw& law) {
  const PenaltyT<double> p = penalty_t(g, law);
  PenaltyValue v{p.f, 0.0, p.psi};
  if (law.variant == PenaltyVariant::Linear) {
    v.df_dg = g < 0.0 ? -law.epsilon : 0.0;
  } else if (g < 0.0) {
    v.df_dg = -law.epsilon;
  } else if (g < law.g_bar) {
    v.df_dg = law.epsilon * (g - law.g_bar) / law.g_bar;
  }
  return v;
}

double ABCParams::z1() const { return std::cos(alpha1); }
double ABCParams::z2() const { return std::cos(alpha2); }
bool ABCParams::valid() const { return 0.0 <= alpha1 && alpha1 < alpha2 && alpha2 <= 0.5 * std::numbers::pi; }

TransitionFactor abc_transition_factor(double z, const ABCParams& params) {
  const TransitionT<double> t = transition_t(z, params);
  return {t.k, t.dk};
}

PairContribution point_contact_contribution(const ContactElement& e1, const ContactElement& e2,
                                            const ClosestPointResult& cp, const PenaltyLaw& law, bool with_stiffness) {
  PairContribution out;
  out.slave = e1.id;
  out.master = e2.id;
  const double sum_r = e1.radius + e2.radius;
  const Vector24 x = stack(e1.curve, e2.curve);
  bool active = false;
  if (with_stiffness) {
    const auto r = point_kernel<AD24>(seed24(x), e1.curve.length, e2.curve.length, cp.xi, cp.eta, sum_r, law,
                                      nullptr, &out.energy, &active);
    unpack24(r, out.residual, out.stiffness);
  } else {
    out.residual = point_kernel<double>(x, e1.curve.length, e2.curve.length, cp.xi, cp.eta, sum_r, law, nullptr,
                                        &out.energy, &active);
  }
  out.active_points = active ? 1 : 0;
  return out;
}

PairContribution abc_point_contribution(const ContactElement& e1, const ContactElement& e2,
                                        const ClosestPointResult& cp, const ContactSettings& settings,
                                        bool with_stiffness) {
  PairContribution out;
  out.slave = e1.id;
  out.master = e2.id;
  const double sum_r = e1.radius + e2.radius;
  const Vector24 x = stack(e1.curve, e2.curve);
  bool active = false;
  if (with_stiffness) {
    const auto r = point_kernel<AD24>(seed24(x), e1.curve.length, e2.curve.length, cp.xi, cp.eta, sum_r,
                                      settings.point_law, &settings.abc, &out.energy, &active);
    unpack24(r, out.residual, out.stiffness);
  } else {
    out.residual = point_kernel<double>(x, e1.curve.length, e2.curve.length, cp.xi, cp.eta, sum_r,
                                        settings.point_law, &settings.abc, &out.energy, &active);
  }
  out.active_points = active ? 1 : 0;
  return out;
}

std::vector<std::pair<double, double>> slave_gauss_layout(int n_segments, int n_gauss) {
  const QuadratureRule rule = gauss_legendre(n_gauss);
  std::vector<std::pair<double, double>> out;
  const double h = 2.0 / n_segments;
  for (int s = 0; s < n_segments; ++s) {
    const double a = -1.0 + s * h;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      out.emplace_back(a + 0.5 * h * (rule.points[q] + 1.0), 0.5 * h * rule.weights[q]);
    }
  }
  return out;
}

std::vector<LineGaussRecord> line_contact_records(const ContactElement& slave,
                                                  const std::vector<const ContactElement*>& masters,
                                                  const ContactSettings& settings, double activation_gap) {
  std::vector<LineGaussRecord> out;
  if (masters.empty()) return out;
  for (const auto& [xi, w] : slave_gauss_layout(settings.n_segments, settings.n_gauss_per_segment)) {
    const Vector3d p = slave.curve.eval(xi);
    LineGaussRecord best;
    bool have = false;
    for (const ContactElement* m : masters) {
      const ClosestPointResult cp = closest_point_unilateral(p, m->curve);
      if (!cp.ok()) continue;
      const double g = cp.distance - slave.radius - m->radius;
      if (!have || g < best.gap) {
        have = true;
        best.master = m->id;
        best.xi = xi;
        best.eta = cp.eta;
        best.gap = g;
        best.normal = cp.normal;
        best.weight = w * slave.reference->jacobian(xi);
      }
    }
    if (have && best.gap < activation_gap) out.push_back(best);
  }
  return out;
}

namespace {

PairContribution line_impl(const ContactElement& slave, const ContactElement& master,
                           const std::vector<LineGaussRecord>& records, const PenaltyLaw& law, const ABCParams* blend,
                           bool with_stiffness) {
  PairContribution out;
  out.slave = slave.id;
  out.master = master.id;
  const double sum_r = slave.radius + master.radius;
  const Vector24 x = stack(slave.curve, master.curve);
  if (with_stiffness) {
    const auto r = line_kernel<AD24>(seed24(x), slave.curve.length, master.curve.length, records, master.id, sum_r,
                                     law, blend, &out.energy, &out.active_line_points);
    unpack24(r, out.residual, out.stiffness);
  } else {
    out.residual = line_kernel<double>(x, slave.curve.length, master.curve.length, records, master.id, sum_r, law,
                                       blend, &out.energy, &out.active_line_points);
  }
  return out;
}

}  // namespace

PairContribution line_contact_contribution(const ContactElement& slave, const ContactElement& master,
                                           const std::vector<LineGaussRecord>& records, const PenaltyLaw& law,
                                           bool with_stiffness) {
  return line_impl(slave, master, records, law, nullptr, with_stiffness);
}

PairContribution abc_line_contribution(const ContactElement& slave, const ContactElement& master,
                                       const std::vector<LineGaussRecord>& records, const ContactSettings& settings,
                                       bool with_stiffness) {
  return line_impl(slave, master, records, settings.line_law, &settings.abc, with_stiffness);
}

std::array<Vector3d, 4> bezier_control_points(const HermiteCurve& c) {
  const Vector3d d1 = c.x.segment<3>(0);
  const Vector3d t1 = c.x.segment<3>(3);
  const Vector3d d2 = c.x.segment<3>(6);
  const Vector3d t2 = c.x.segment<3>(9);
  return {d1, d1 + c.length * t1 / 3.0, d2 - c.length * t2 / 3.0, d2};
}

std::vector<std::pair<int, int>> broadphase_search(const std::vector<ContactElement>& elements, double margin) {
  struct Box {
    Vector3d lo, hi;
  };
  std::vector<Box> boxes;
  boxes.reserve(elements.size());
  for (const ContactElement& e : elements) {
    const auto p = bezier_control_points(e.curve);
    Box b{p[0], p[0]};
    for (const Vector3d& q : p) {
      b.lo = b.lo.cwiseMin(q);
      b.hi = b.hi.cwiseMax(q);
    }
    const double grow = e.radius + 0.5 * margin;
    b.lo.array() -= grow;
    b.hi.array() += grow;
    boxes.push_back(b);
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      const ContactElement& a = elements[i];
      const ContactElement& b = elements[j];
      if (a.fiber == b.fiber && std::abs(a.index_in_fiber - b.index_in_fiber) <= 1) continue;
      if ((boxes[i].lo.array() > boxes[j].hi.array()).any() || (boxes[j].lo.array() > boxes[i].hi.array()).any()) {
        continue;
      }
      out.emplace_back(std::min(a.id, b.id), std::max(a.id, b.id));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double rigid_gap(const RigidSphere& s, const Vector3d& p, double beam_radius) {
  return (p - s.center).norm() - s.radius - beam_radius;
}

double rigid_gap(const RigidCylinder& c, const Vector3d& p, double beam_radius) {
  const Vector3d a = c.axis.normalized();
  const Vector3d d = (p - c.point) - a * a.dot(p - c.point);
  return d.norm() - c.radius - beam_radius;
}

namespace {

// Offset of a centerline point from the primitive; its norm minus the
// primitive radius is the surface distance.
template <typename S>
V3<S> primitive_offset(const RigidSphere& s, const V3<S>& p) {
  return p - s.center.cast<S>();
}
template <typename S>
V3<S> primitive_offset(const RigidCylinder& c, const V3<S>& p) {
  const Vector3d a = c.axis.normalized();
  const V3<S> q = p - c.point.cast<S>();
  return q - a.cast<S>() * a.cast<S>().dot(q);
}

template <typename Primitive>
RigidContribution rigid_impl(const ContactElement& element, const Primitive& prim, const ContactSettings& settings,
                             bool with_stiffness) {
  RigidContribution out;
  const PenaltyLaw& law = settings.line_law;
  const auto layout = slave_gauss_layout(settings.n_segments, settings.n_gauss_per_segment);
  Vector12<AD12> xa;
  for (int i = 0; i < 12; ++i) xa(i) = AD12(element.curve.x(i), 12, i);
  Vector12<AD12> res = Vector12<AD12>::Zero();
  for (const auto& [xi, wq] : layout) {
    const double w = wq * element.reference->jacobian(xi);
    if (with_stiffness) {
      const V3<AD12> p = hermite_eval<AD12>(xa, AD12(xi), element.curve.length, 0);
      const V3<AD12> d = primitive_offset(prim, p);
      using std::sqrt;
      const AD12 dist = sqrt(d.dot(d));
      const AD12 g = dist - prim.radius - element.radius;
      const PenaltyT<AD12> pen = penalty_t(g, law);
      if (pen.f.value() == 0.0 && pen.psi.value() == 0.0) continue;
      ++out.active_points;
      out.energy += w * pen.psi.value();
      const Eigen::Matrix<AD12, 3, 12> h = hermite_matrix<AD12>(AD12(xi), element.curve.length, 0);
      res -= (w * pen.f) * (h.transpose() * (d / dist));
    } else {
      const Vector3d p = element.curve.eval(xi);
      const Vector3d d = primitive_offset(prim, p);
      const double dist = d.norm();
      const PenaltyT<double> pen = penalty_t(dist - prim.radius - element.radius, law);
      if (pen.f == 0.0 && pen.psi == 0.0) continue;
      ++out.active_points;
      out.energy += w * pen.psi;
      out.residual -= (w * pen.f) * (hermite_matrix<double>(xi, element.curve.length, 0).transpose() * (d / dist));
    }
  }
  if (with_stiffness) {
    for (int i = 0; i < 12; ++i) {
      out.residual(i) = res(i).value();
      out.stiffness.row(i) = res(i).derivatives().transpose();
    }
  }
  return out;
}

}  // namespace

RigidContribution rigid_primitive_contact(const ContactElement& element, const RigidSphere& sphere,
                                          const ContactSettings& settings, bool with_stiffness) {
  return rigid_impl(element, sphere, settings, with_stiffness);
}

RigidContribution rigid_primitive_contact(const ContactElement& element, const RigidCylinder& cylinder,
                                          const ContactSettings& settings, bool with_stiffness) {
  return rigid_impl(element, cylinder, settings, with_stiffness);
}

}  // namespace beamfe
