#include "fbem/sobolev.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbem/errors.hpp"
#include "fbem/quadrature.hpp"
#include "fbem/variational.hpp"

namespace fbem {

namespace {

// Divided differences exp[z_a, z_b, ...] of nodes selected by index from z, with the
// exponentials e^z precomputed in ez so that leaves cost no further exp calls.
class ExpDivDiff {
 public:
  ExpDivDiff() {
    inv_factorial_[0] = 1.0;
    for (std::size_t i = 1; i < inv_factorial_.size(); ++i) inv_factorial_[i] = inv_factorial_[i - 1] / i;
  }

  Complex operator()(const Complex* z, const Complex* ez, const int* idx, int count) const {
    if (count == 1) return ez[idx[0]];
    int a = 0, b = 0;
    double widest = 0.0;
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        const double d = std::abs(z[idx[i]] - z[idx[j]]);
        if (d > widest) widest = d, a = i, b = j;
      }
    }
    if (widest <= 2.0) return series(z, ez, idx, count);
    // f[S] = (f[S without a] - f[S without b]) / (z_b - z_a), splitting the widest pair.
    std::array<int, 4> without_a{}, without_b{};
    int na = 0, nb = 0;
    for (int i = 0; i < count; ++i) {
      if (i != a) without_a[na++] = idx[i];
      if (i != b) without_b[nb++] = idx[i];
    }
    return ((*this)(z, ez, without_a.data(), na) - (*this)(z, ez, without_b.data(), nb)) /
           (z[idx[b]] - z[idx[a]]);
  }

 private:
  static constexpr int kTerms = 32;
  std::array<double, kTerms + 4> inv_factorial_{};

  // Taylor series about the first node c: e^c sum_n h_n(z - c) / (n + m)!, with h_n the
  // complete homogeneous symmetric polynomials; |z - c| <= 2 keeps it short.
  Complex series(const Complex* z, const Complex* ez, const int* idx, int count) const {
    const Complex c = z[idx[0]];
    std::array<Complex, kTerms> h{};
    h[0] = 1.0;
    for (int i = 1; i < count; ++i) {
      const Complex w = z[idx[i]] - c;
      for (int n = 1; n < kTerms; ++n) h[n] += w * h[n - 1];
    }
    const int m = count - 1;
    Complex sum = 0.0;
    for (int n = kTerms - 1; n >= 0; --n) sum += h[n] * inv_factorial_[n + m];
    return ez[idx[0]] * sum;
  }
};

const ExpDivDiff& exp_divdiff() {
  static const ExpDivDiff instance;
  return instance;
}

// Element data for repeated transform evaluation, vertices relative to `origin`.
struct TransformData {
  struct Element {
    std::array<Point2, 3> v;
    double twice_area;
    std::array<Complex, 3> coeff;  // P0 uses coeff[0]
  };
  bool p1 = false;
  std::vector<Element> elements;
  double support_radius = 0.0;

  TransformData(const FunctionSpace& space, std::span<const Complex> c, Point2 origin) {
    const Mesh& mesh = space.mesh();
    p1 = space.kind() == SpaceKind::P1ZeroTrace;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const auto dofs = space.element_dofs(e);
      Element el{};
      bool nonzero = false;
      for (int i = 0; i < 3; ++i) {
        if (dofs[i] >= 0) el.coeff[i] = c[dofs[i]];
        nonzero = nonzero || el.coeff[i] != Complex(0.0);
      }
      if (!nonzero) continue;
      for (int i = 0; i < 3; ++i) {
        el.v[i] = mesh.vertices[mesh.elements[e][i]] - origin;
        support_radius = std::max(support_radius, norm(el.v[i]));
      }
      el.twice_area = 2.0 * mesh.element_area(e);
      elements.push_back(el);
    }
  }

  // int_T lambda_i e^{-i xi.x} = 2|T| exp[z_0, z_1, z_2, z_i] and int_T e^{-i xi.x} = 2|T| exp[z_0, z_1, z_2]
  // with z_j = -i xi.v_j (Hermite-Genocchi).
  Complex operator()(Point2 xi) const {
    const auto& dd = exp_divdiff();
    Complex sum = 0.0;
    std::array<Complex, 3> z{}, ez{};
    for (const auto& el : elements) {
      for (int i = 0; i < 3; ++i) {
        const double phase = -dot(xi, el.v[i]);
        z[i] = Complex(0.0, phase);
        ez[i] = Complex(std::cos(phase), std::sin(phase));
      }
      if (!p1) {
        static constexpr int kAll[3] = {0, 1, 2};
        sum += el.twice_area * el.coeff[0] * dd(z.data(), ez.data(), kAll, 3);
      } else {
        Complex local = 0.0;
        for (int i = 0; i < 3; ++i) {
          if (el.coeff[i] == Complex(0.0)) continue;
          const int idx[4] = {0, 1, 2, i};
          local += el.coeff[i] * dd(z.data(), ez.data(), idx, 4);
        }
        sum += el.twice_area * local;
      }
    }
    return sum / (2.0 * kPi);
  }
};

}  // namespace

double energy_norm(const ComplexMatrix& matrix, const ComplexVector& coeff) {
  if (coeff.size() == 0) return 0.0;
  return std::sqrt(std::abs(coeff.dot(matrix * coeff)));
}

double energy_norm(const GalerkinSystem& system, const ComplexVector& coeff) {
  if (coeff.size() != system.matrix.cols()) throw DomainError("coefficient vector has the wrong size");
  return energy_norm(system.matrix, coeff);
}

void HsNormSpec::validate() const {
  if (!(s >= -1.0 && s <= 1.0)) throw DomainError("Sobolev order must lie in [-1, 1]");
  if (!(radius >= 10.0)) throw DomainError("frequency truncation radius must be at least 10");
  if (radial_nodes < 8 || angular_nodes < 8) throw DomainError("too few quadrature nodes");
}

Complex density_transform(const FunctionSpace& space, std::span<const Complex> coeff, Point2 xi) {
  if (coeff.size() != space.dof_count()) throw DomainError("coefficient vector has the wrong size");
  return TransformData(space, coeff, Point2{})(xi);
}

HsNormResult hs_norm(const FunctionSpace& space, std::span<const Complex> coeff, const HsNormSpec& spec) {
  spec.validate();
  if (coeff.size() != space.dof_count()) throw DomainError("coefficient vector has the wrong size");
  HsNormResult result;

  // |u^|^2 is translation invariant: centre the support to bound the angular bandwidth.
  const Mesh& mesh = space.mesh();
  Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto& v : mesh.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const TransformData transform(space, coeff, 0.5 * (lo + hi));
  if (transform.elements.empty()) return result;
  const double support = std::max(transform.support_radius, 1e-12);

  // Composite Gauss-Legendre panels in the radius; panel length resolves the radial
  // oscillation of |u^|^2, whose frequency is at most the support diameter.
  constexpr int kPanelNodes = 8;
  const int min_panels = std::max(1, spec.radial_nodes / kPanelNodes);
  const int panels = std::max(min_panels, static_cast<int>(std::ceil(spec.radius * 2.0 * support / 4.0)));
  const double panel_length = spec.radius / panels;
  const auto& gl = quad::gauss_legendre(kPanelNodes);
  const int shells = panels * kPanelNodes;
  std::vector<double> rho(shells), weight(shells), mass(shells);
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < kPanelNodes; ++i) {
      rho[p * kPanelNodes + i] = (p + gl.x[i]) * panel_length;
      weight[p * kPanelNodes + i] = gl.w[i] * panel_length;
    }
  }

  // Shell mass m(rho) = rho int_0^{2 pi} |u^(rho, theta)|^2 dtheta by the trapezoidal rule,
  // with enough nodes to resolve angular frequencies up to 2 rho * support.
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < shells; ++i) {
    const int nodes = std::max(spec.angular_nodes, static_cast<int>(std::ceil(2.6 * rho[i] * support)) + 16);
    double sum = 0.0;
    for (int t = 0; t < nodes; ++t) {
      const double theta = 2.0 * kPi * t / nodes;
      sum += std::norm(transform({rho[i] * std::cos(theta), rho[i] * std::sin(theta)}));
    }
    mass[i] = rho[i] * sum * (2.0 * kPi / nodes);
  }

  for (int i = 0; i < shells; ++i) result.truncated += weight[i] * std::pow(1.0 + rho[i] * rho[i], spec.s) * mass[i];

  // Tail: the shell mass behaves like C_q rho^{-q} + C_{q+1} rho^{-q-1} (q = 2 for piecewise
  // constants, 4 for continuous densities). Both coefficients are fitted by weighted least
  // squares on the last decade and integrated in closed form with rho^{2s} for the weight.
  const double q = transform.p1 ? 4.0 : 2.0;
  double g11 = 0.0, g12 = 0.0, g22 = 0.0, r1 = 0.0, r2 = 0.0;
  for (int i = 0; i < shells; ++i) {
    if (rho[i] < 0.1 * spec.radius) continue;
    const double b1 = std::pow(rho[i] / spec.radius, -q), b2 = b1 * spec.radius / rho[i];
    const double w = weight[i] * std::pow(rho[i] / spec.radius, 2.0 * q);  // equalize the decade
    g11 += w * b1 * b1, g12 += w * b1 * b2, g22 += w * b2 * b2;
    r1 += w * b1 * mass[i], r2 += w * b2 * mass[i];
  }
  auto tail_integral = [&](double power) {  // int_R^inf rho^{2s} (rho / R)^{-power} d rho
    const double e = 2.0 * spec.s - power + 1.0;
    return e < 0.0 ? std::pow(spec.radius, 2.0 * spec.s + 1.0) / -e : std::numeric_limits<double>::infinity();
  };
  const double det = g11 * g22 - g12 * g12;
  double c1 = g11 > 0.0 ? r1 / g11 : 0.0, c2 = 0.0;
  if (det > 1e-12 * g11 * g22) {
    const double two_c1 = (g22 * r1 - g12 * r2) / det, two_c2 = (g11 * r2 - g12 * r1) / det;
    // Keep the two-term fit only when it is a physically sensible envelope.
    if (two_c1 > 0.0 && two_c1 + two_c2 > 0.0) c1 = two_c1, c2 = two_c2;
  }
  if (c1 == 0.0 && c2 == 0.0) {
    result.tail = 0.0;
  } else {
    result.tail = c1 * tail_integral(q) + (c2 != 0.0 ? c2 * tail_integral(q + 1.0) : 0.0);
  }
  result.value = std::sqrt(result.truncated + result.tail);
  if (!(result.tail <= spec.tail_warning * (result.truncated + result.tail))) {
    result.warning = true;
    std::ostringstream msg;
    msg << "TruncationWarning: tail estimate " << result.tail << " exceeds "
        << spec.tail_warning * 100.0 << "% of the squared norm";
    result.message = msg.str();
  }
  return result;
}

double capacity_estimate(const PanelSet& screen, int refine, const QuadratureOptions& options,
                         Execution execution) {
  if (screen.empty()) return 0.0;
  auto mesh = std::make_shared<const Mesh>(mesh_panels(screen, refine));
  auto space = std::make_shared<const FunctionSpace>(build_space(mesh, SpaceKind::P0Jump));
  const GalerkinSystem system =
      assemble_system(space, Wavenumber::imaginary(1.0), BoundaryData::constant(1.0), options, execution);
  return mean_functional(solve(system)).real();
}

}  // namespace fbem
