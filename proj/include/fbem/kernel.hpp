#pragma once

#include <array>
#include <complex>

namespace fbem {

using Complex = std::complex<double>;
using Point3 = std::array<double, 3>;

/// Wavenumber with Im k > 0 and Re k >= 0, i.e. 0 < arg(k) <= pi/2.
class Wavenumber {
 public:
  explicit Wavenumber(Complex k);
  static Wavenumber imaginary(double kappa) { return Wavenumber(Complex(0.0, kappa)); }

  Complex value() const { return k_; }
  bool purely_imaginary() const { return k_.real() == 0.0; }
  bool is_i() const { return k_ == Complex(0.0, 1.0); }

 private:
  Complex k_;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSingularRadius = 1e-14;

/// exp(i k r) / (4 pi r) for r > 0, without the distance check.
inline Complex helmholtz_radial(Complex k, double r) {
  const double decay = std::exp(-k.imag() * r);
  if (k.real() == 0.0) return Complex(decay / (4.0 * kPi * r), 0.0);
  const double phase = k.real() * r;
  return Complex(std::cos(phase), std::sin(phase)) * (decay / (4.0 * kPi * r));
}

/// Fundamental solution exp(ik|x-y|)/(4 pi |x-y|). Throws SingularEvaluation for |x-y| < 1e-14.
Complex phi(const Point3& x, const Point3& y, const Wavenumber& k);

/// Normal derivative of phi with respect to y along the unit vector `normal`.
Complex dphi_dn_y(const Point3& x, const Point3& y, const Wavenumber& k, const Point3& normal);

}  // namespace fbem
