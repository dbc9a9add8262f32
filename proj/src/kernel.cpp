#include "fbem/kernel.hpp"

#include <cmath>

#include "fbem/errors.hpp"

namespace fbem {

Wavenumber::Wavenumber(Complex k) : k_(k) {
  if (!(k.imag() > 0.0) || k.real() < 0.0) {
    throw DomainError("wavenumber must satisfy Im k > 0 and Re k >= 0");
  }
}

namespace {

double distance(const Point3& x, const Point3& y) {
  const double r = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) +
                             (x[2] - y[2]) * (x[2] - y[2]));
  if (r < kSingularRadius) throw SingularEvaluation("kernel evaluated at coincident points");
  return r;
}

}  // namespace

Complex phi(const Point3& x, const Point3& y, const Wavenumber& k) {
  return helmholtz_radial(k.value(), distance(x, y));
}

Complex dphi_dn_y(const Point3& x, const Point3& y, const Wavenumber& k, const Point3& normal) {
  const double r = distance(x, y);
  const Complex ik = Complex(0.0, 1.0) * k.value();
  const double projection =
      (x[0] - y[0]) * normal[0] + (x[1] - y[1]) * normal[1] + (x[2] - y[2]) * normal[2];
  // d r / d y = -(x - y) / r
  return -(ik * r - 1.0) * std::exp(ik * r) / (4.0 * kPi * r * r * r) * projection;
}

}  // namespace fbem
