#include <doctest.h>

#include <cmath>

#include "fbem/errors.hpp"
#include "fbem/pair_integrals.hpp"
#include "fbem/quadrature.hpp"
#include "oracle.hpp"

using namespace fbem;

namespace {

// int over {0 <= x2 <= x1 <= 1} of x1^a x2^b
double reference_monomial(int a, int b) { return 1.0 / ((b + 1.0) * (a + b + 2.0)); }

double polynomial4(double x1, double x2, double y1, double y2) {
  return 1.0 + x1 * x2 - 2.0 * y1 * y1 + 3.0 * x1 * y2 * y2 + x2 * x2 * y1 * y2;
}

double tensor_reference() {
  const auto& t = quad::triangle_rule(12);
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) sum += t.w[i] * t.w[j] * polynomial4(t.x1[i], t.x2[i], t.x1[j], t.x2[j]);
  return sum;
}

oracle::Tri to_oracle(const Triangle& t) {
  oracle::Tri o;
  for (int i = 0; i < 3; ++i) o.v[i] = {t.vertices[i].x, t.vertices[i].y};
  return o;
}

const Triangle kRight{{Point2{0, 0}, {1, 0}, {0, 1}}};

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("gauss-legendre is exact to degree 2n - 1") {
    for (int n : {1, 3, 8, 20}) {
      const auto& r = quad::gauss_legendre(n);
      for (int d = 0; d <= 2 * n - 1; ++d) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += r.w[i] * std::pow(r.x[i], d);
        CHECK(sum == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("gauss-jacobi rule carries the weight u") {
    const auto& r = quad::gauss_jacobi_u(6);
    for (int d = 0; d <= 11; ++d) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * std::pow(r.x[i], d);
      CHECK(sum == doctest::Approx(1.0 / (d + 2)).epsilon(1e-13));
    }
  }

  TEST_CASE("triangle rules") {
    for (int degree : {1, 4, 7, 12}) {
      const auto& t = quad::triangle_rule(degree);
      for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
          double sum = 0.0;
          for (std::size_t i = 0; i < t.size(); ++i) sum += t.w[i] * std::pow(t.x1[i], a) * std::pow(t.x2[i], b);
          CHECK(sum == doctest::Approx(reference_monomial(a, b)).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("regularized pair rules integrate polynomials exactly") {
    const double want = tensor_reference();
    const std::vector<const std::vector<quad::PairNode>*> rules{&quad::coincident_rule(8), &quad::common_edge_rule(8),
                                                                 &quad::common_vertex_rule(8)};
    for (std::size_t r = 0; r < rules.size(); ++r) {
      double weights = 0.0, sum = 0.0;
      for (const auto& n : *rules[r]) {
        weights += n.w;
        sum += n.w * polynomial4(n.x1, n.x2, n.y1, n.y2);
        if (r < 2) CHECK(std::abs(n.d1 - (n.x1 - n.y1)) < 1e-14);
        if (r < 1) CHECK(std::abs(n.d2 - (n.x2 - n.y2)) < 1e-14);
      }
      CHECK(weights == doctest::Approx(0.25).epsilon(1e-14));
      CHECK(sum == doctest::Approx(want).epsilon(1e-13));
    }
  }

  TEST_CASE("pair classification") {
    const QuadratureOptions options;
    CHECK(classify_pair(kRight, kRight, options) == PairCase::Coincident);
    CHECK(classify_pair(kRight, Triangle{{Point2{1, 0}, {1, 1}, {0, 1}}}, options) == PairCase::CommonEdge);
    CHECK(classify_pair(kRight, Triangle{{Point2{1, 0}, {2, 0}, {2, 1}}}, options) == PairCase::CommonVertex);
    CHECK(classify_pair(kRight, Triangle{{Point2{1.5, 0}, {2.5, 0}, {2, 1}}}, options) == PairCase::Near);
    CHECK(classify_pair(kRight, Triangle{{Point2{10, 0}, {11, 0}, {10, 1}}}, options) == PairCase::Separated);
  }

  TEST_CASE("swapping the panels leaves the value unchanged") {
    const Wavenumber k(Complex(2.0, 0.5));
    const std::vector<std::pair<Triangle, Triangle>> pairs{
        {kRight, Triangle{{Point2{1, 0}, {1, 1}, {0, 1}}}},
        {kRight, Triangle{{Point2{0, 0}, {-1, 0.3}, {-0.2, -1}}}},
        {kRight, Triangle{{Point2{1.3, 0.2}, {2.0, 0.1}, {1.8, 1.0}}}},
        {kRight, Triangle{{Point2{6, 0}, {7, 0}, {6, 1}}}},
    };
    for (const auto& [a, b] : pairs) {
      const Complex ab = panel_pair_integral(a, b, k), ba = panel_pair_integral(b, a, k);
      CHECK(std::abs(ab - ba) <= 1e-13 * std::abs(ab));
    }
  }

  TEST_CASE("well separated unit-area elements") {
    // two right triangles of area 1 whose centroids are 10 apart
    const double leg = std::sqrt(2.0);
    const Triangle a{{Point2{0, 0}, {leg, 0}, {0, leg}}};
    const Point2 shift{10.0, 0.0};
    const Triangle b{{a.vertices[0] + shift, a.vertices[1] + shift, a.vertices[2] + shift}};
    const Complex value = panel_pair_integral(a, b, Wavenumber::imaginary(1.0));
    CHECK(value.real() == doctest::Approx(std::exp(-10.0) / (40.0 * kPi)).epsilon(2e-3));
    CHECK(value.imag() == 0.0);
  }

  TEST_CASE("singular rules against the oracle") {
    const oracle::PairOracle reference(Complex(0.0, 1.0));
    const Complex coincident = panel_pair_integral(kRight, kRight, Wavenumber::imaginary(1.0));
    const Complex want = reference.scalar(to_oracle(kRight), to_oracle(kRight));
    CHECK(std::abs(coincident - want) < 1e-6 * std::abs(want));

    const Triangle touching{{Point2{0, 0}, {-1, 0}, {0, -1}}};
    const LocalBlock got = panel_pair_block(kRight, touching, Wavenumber::imaginary(1.0));
    const oracle::Block expected = reference.block(to_oracle(kRight), to_oracle(touching));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(std::abs(got[i][j] - expected[i][j]) < 1e-6 * std::abs(expected[i][j]));
  }

  TEST_CASE("block entries sum to the scalar integral") {
    const Wavenumber k(Complex(1.0, 1.0));
    const Triangle b{{Point2{1, 0}, {1, 1}, {0, 1}}};
    const LocalBlock block = panel_pair_block(kRight, b, k);
    Complex sum = 0.0;
    for (const auto& row : block)
      for (const Complex& v : row) sum += v;
    CHECK(std::abs(sum - panel_pair_integral(kRight, b, k)) < 1e-13 * std::abs(sum));
  }

  TEST_CASE("explicit rules must match the geometry") {
    const Wavenumber k = Wavenumber::imaginary(1.0);
    CHECK_THROWS_AS(panel_pair_integral(kRight, kRight, k, PairCase::Separated), QuadratureFailure);
    CHECK_THROWS_AS(panel_pair_integral(kRight, Triangle{{Point2{1, 0}, {1, 1}, {0, 1}}}, k, PairCase::Coincident),
                    QuadratureFailure);
    CHECK_NOTHROW(panel_pair_integral(kRight, kRight, k, PairCase::Coincident));
  }

  TEST_CASE("the coincident self-check rejects slivers") {
    const Triangle sliver{{Point2{0, 0}, {1, 0}, {0.3, 0.2}}};
    try {
      panel_pair_integral(sliver, sliver, Wavenumber::imaginary(1.0));
      FAIL("expected QuadratureFailure");
    } catch (const QuadratureFailure& e) {
      CHECK(e.pair_case() == "coincident");
      CHECK(e.error_estimate() > 1e-6);
    }
    QuadratureOptions fine;
    fine.singular_points = 16;
    CHECK_NOTHROW(panel_pair_integral(sliver, sliver, Wavenumber::imaginary(1.0), fine));
  }

  TEST_CASE("fixed orders are deterministic") {
    const Wavenumber k(Complex(0.5, 1.0));
    const Triangle b{{Point2{1, 0}, {1, 1}, {0, 1}}};
    CHECK(panel_pair_integral(kRight, b, k) == panel_pair_integral(kRight, b, k));
  }
}
