#include <doctest.h>

#include <cmath>

#include "fbem/errors.hpp"
#include "fbem/kernel.hpp"

using namespace fbem;

TEST_SUITE("kernel") {
  TEST_CASE("wavenumber domain") {
    CHECK_NOTHROW(Wavenumber(Complex(0.0, 1.0)));
    CHECK_NOTHROW(Wavenumber(Complex(3.0, 0.1)));
    CHECK_THROWS_AS(Wavenumber(Complex(1.0, 0.0)), DomainError);
    CHECK_THROWS_AS(Wavenumber(Complex(-1.0, 1.0)), DomainError);
    CHECK(Wavenumber::imaginary(1.0).is_i());
  }

  TEST_CASE("unit distance values") {
    const Point3 x{0.0, 0.0, 0.0}, y{1.0, 0.0, 0.0};
    const Complex at_i = phi(x, y, Wavenumber::imaginary(1.0));
    CHECK(at_i.real() == doctest::Approx(0.0292743).epsilon(1e-6));
    CHECK(at_i.real() == doctest::Approx(std::exp(-1.0) / (4.0 * kPi)).epsilon(1e-14));
    CHECK(at_i.imag() == 0.0);

    const Complex oscillating = phi(x, y, Wavenumber(Complex(1.0, 1.0)));
    CHECK(std::abs(oscillating) == doctest::Approx(std::exp(-1.0) / (4.0 * kPi)).epsilon(1e-14));
    CHECK(std::arg(oscillating) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("decay at large distance") {
    const Complex far = phi({0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}, Wavenumber::imaginary(1.0));
    CHECK(std::abs(far) <= std::exp(-10.0) / (40.0 * kPi) * (1.0 + 1e-14));
    CHECK(std::abs(far) == doctest::Approx(3.613e-7).epsilon(1e-3));
  }

  TEST_CASE("symmetry and the singular guard") {
    const Wavenumber k(Complex(2.0, 0.5));
    const Point3 a{0.1, -0.3, 0.0}, b{0.7, 0.2, 0.0};
    CHECK(phi(a, b, k) == phi(b, a, k));
    CHECK_THROWS_AS(phi(a, a, k), SingularEvaluation);
  }

  TEST_CASE("normal derivative in the plane vanishes") {
    const Complex d = dphi_dn_y({0.3, 0.1, 0.0}, {0.0, 0.0, 0.0}, Wavenumber::imaginary(1.0), {0.0, 0.0, 1.0});
    CHECK(std::abs(d) == 0.0);
  }

  TEST_CASE("normal derivative with respect to y") {
    // d/dy3 of e^{-|x - y|}/(4 pi |x - y|) at x = e3, y = 0 is +2 e^{-1} / (4 pi).
    const Wavenumber k = Wavenumber::imaginary(1.0);
    const Point3 x{0.0, 0.0, 1.0}, y{0.0, 0.0, 0.0}, n{0.0, 0.0, 1.0};
    const Complex d = dphi_dn_y(x, y, k, n);
    CHECK(d.real() == doctest::Approx(2.0 * std::exp(-1.0) / (4.0 * kPi)).epsilon(1e-12));
    CHECK(d.real() == doctest::Approx(0.0585498).epsilon(1e-6));

    // central difference oracle for an oblique configuration
    const Wavenumber k2(Complex(1.5, 0.7));
    const Point3 p{0.4, -0.2, 0.9}, q{0.1, 0.3, -0.2}, m{0.6, 0.0, 0.8};
    const double h = 1e-5;
    Point3 qp = q, qm = q;
    for (int i = 0; i < 3; ++i) qp[i] += h * m[i], qm[i] -= h * m[i];
    const Complex fd = (phi(p, qp, k2) - phi(p, qm, k2)) / (2.0 * h);
    CHECK(std::abs(dphi_dn_y(p, q, k2, m) - fd) < 1e-8 * std::abs(fd));
  }
}
