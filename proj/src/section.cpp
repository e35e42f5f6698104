#include "beamfe/section.hpp"

#include <numbers>

namespace beamfe {

CrossSection CrossSection::circular(double radius, double rho, double shear_correction) {
  CrossSection s;
  const double pi = std::numbers::pi;
  s.A = pi * radius * radius;
  s.A2 = shear_correction * s.A;
  s.A3 = shear_correction * s.A;
  s.I2 = 0.25 * pi * radius * radius * radius * radius;
  s.I3 = s.I2;
  s.IT = 2.0 * s.I2;
  s.rho = rho;
  s.radius = radius;
  s.shear_correction = shear_correction;
  return s;
}

CrossSection CrossSection::square(double side, double rho, double shear_correction) {
  CrossSection s;
  const double a2 = side * side;
  s.A = a2;
  s.A2 = shear_correction * a2;
  s.A3 = shear_correction * a2;
  s.I2 = a2 * a2 / 12.0;
  s.I3 = s.I2;
  s.IT = 0.1406 * a2 * a2;
  s.rho = rho;
  s.radius = 0.5 * side;
  s.shear_correction = shear_correction;
  return s;
}

}  // namespace beamfe
