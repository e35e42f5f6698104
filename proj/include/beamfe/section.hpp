#pragma once

#include <Eigen/Core>

namespace beamfe {

struct Material {
  double E = 1.0;
  double G = 0.5;

  bool valid() const { return E > 0.0 && G > 0.0; }
};

/// Cross-section constants. A2, A3 are the shear-reduced areas (shear
/// correction already applied); radius is the contact radius of the beam.
struct CrossSection {
  double A = 1.0;
  double A2 = 1.0;
  double A3 = 1.0;
  double I2 = 1.0;
  double I3 = 1.0;
  double IT = 2.0;
  double rho = 1.0;
  double radius = 1.0;
  double shear_correction = 1.0;

  double polar_inertia() const { return I2 + I3; }

  bool valid() const {
    return A > 0.0 && A2 > 0.0 && A3 > 0.0 && I2 > 0.0 && I3 > 0.0 && IT > 0.0 && rho > 0.0 && radius > 0.0 &&
           shear_correction > 0.0;
  }

  static CrossSection circular(double radius, double rho, double shear_correction = 1.0);

  /// Square section of side a. The torsion constant uses 0.1406 a^4.
  static CrossSection square(double side, double rho, double shear_correction = 1.0);

  bool operator==(const CrossSection&) const = default;
};

/// Material constitutive matrices diag(GI_T, EI_2, EI_3) and diag(EA, GA_2, GA_3).
inline Eigen::Vector3d moment_stiffness(const CrossSection& s, const Material& m) {
  return {m.G * s.IT, m.E * s.I2, m.E * s.I3};
}
inline Eigen::Vector3d force_stiffness(const CrossSection& s, const Material& m) {
  return {m.E * s.A, m.G * s.A2, m.G * s.A3};
}
/// Material rotational inertia diag(rho I_P, rho I_2, rho I_3).
inline Eigen::Vector3d rotational_inertia(const CrossSection& s) {
  return {s.rho * s.polar_inertia(), s.rho * s.I2, s.rho * s.I3};
}

}  // namespace beamfe
