#include "fbem/assembly.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "fbem/errors.hpp"
#include "fbem/quadrature.hpp"

namespace fbem {

namespace {

// Collects the first exception thrown inside an OpenMP region.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

void require_kind(const FunctionSpace& space, SpaceKind kind, const char* what) {
  if (space.kind() != kind) {
    throw SpaceKindError(std::string(what) + " requires a " + to_string(kind) + " space, got " +
                         to_string(space.kind()));
  }
}

// Gradients of the barycentric coordinates of element e.
std::array<Point2, 3> barycentric_gradients(const Mesh& mesh, std::size_t e) {
  const auto& t = mesh.elements[e];
  const Point2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
  const double twice_area = cross(p1 - p0, p2 - p0);
  auto rot = [&](Point2 a, Point2 b) {  // grad of the coordinate opposite the edge a -> b
    return Point2{(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
  };
  return {rot(p1, p2), rot(p2, p0), rot(p0, p1)};
}

}  // namespace

BoundaryData BoundaryData::constant(Complex c) {
  BoundaryData d;
  d.kind = Kind::Constant;
  d.value = c;
  return d;
}

BoundaryData BoundaryData::plane_wave(Point2 dir) {
  if (norm(dir) > 1.0 + 1e-12) throw DomainError("plane-wave direction must satisfy |d| <= 1");
  BoundaryData d;
  d.kind = Kind::PlaneWave;
  d.direction = dir;
  return d;
}

BoundaryData BoundaryData::polynomial(std::vector<Monomial> terms) {
  for (const auto& m : terms) {
    if (m.px < 0 || m.py < 0) throw DomainError("negative monomial power");
  }
  BoundaryData d;
  d.kind = Kind::Polynomial;
  d.monomials = std::move(terms);
  return d;
}

Complex BoundaryData::operator()(Point2 x, Complex k) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::PlaneWave: return std::exp(Complex(0.0, 1.0) * k * dot(direction, x));
    case Kind::Polynomial: {
      Complex sum = 0.0;
      for (const auto& m : monomials) sum += m.coeff * std::pow(x.x, m.px) * std::pow(x.y, m.py);
      return sum;
    }
  }
  return 0.0;
}

bool BoundaryData::is_zero() const {
  switch (kind) {
    case Kind::Constant: return value == Complex(0.0);
    case Kind::PlaneWave: return false;
    case Kind::Polynomial:
      return std::all_of(monomials.begin(), monomials.end(),
                         [](const Monomial& m) { return m.coeff == Complex(0.0); });
  }
  return false;
}

ComplexMatrix assemble_single_layer(const FunctionSpace& space, const Wavenumber& k,
                                    const QuadratureOptions& options, Execution execution) {
  require_kind(space, SpaceKind::P0Jump, "single-layer assembly");
  const Mesh& mesh = space.mesh();
  const auto n = static_cast<long>(space.dof_count());
  ComplexMatrix a(n, n);
  ExceptionSlot slot;
  // Upper triangle row by row; each entry is an independent pure integral.
#pragma omp parallel for schedule(dynamic, 4) if (execution == Execution::Parallel)
  for (long p = 0; p < n; ++p) {
    slot.run([&] {
      for (long q = p; q < n; ++q) a(p, q) = element_pair_integral(mesh, p, q, k, options);
    });
  }
  slot.rethrow();
  for (long p = 0; p < n; ++p) {
    for (long q = p + 1; q < n; ++q) a(q, p) = a(p, q);
  }
  return a;
}

Complex single_layer_energy(const FunctionSpace& space, const Wavenumber& k, const ComplexVector& coeff,
                            const QuadratureOptions& options, Execution execution) {
  require_kind(space, SpaceKind::P0Jump, "single-layer energy");
  const Mesh& mesh = space.mesh();
  const auto n = static_cast<long>(space.dof_count());
  std::vector<Complex> rows(static_cast<std::size_t>(n), 0.0);
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 4) if (execution == Execution::Parallel)
  for (long p = 0; p < n; ++p) {
    slot.run([&] {
      const Complex cp = coeff(p);
      Complex sum = std::conj(cp) * element_pair_integral(mesh, p, p, k, options) * cp;
      for (long q = p + 1; q < n; ++q) {
        const Complex cq = coeff(q);
        if (cp == Complex(0.0) && cq == Complex(0.0)) continue;
        sum += element_pair_integral(mesh, p, q, k, options) * (std::conj(cp) * cq + std::conj(cq) * cp);
      }
      rows[p] = sum;
    });
  }
  slot.rethrow();
  Complex total = 0.0;
  for (const Complex& r : rows) total += r;
  return total;
}

ComplexMatrix assemble_hypersingular(const FunctionSpace& space, const Wavenumber& k,
                                     const QuadratureOptions& options, Execution execution) {
  require_kind(space, SpaceKind::P1ZeroTrace, "hypersingular assembly");
  const Mesh& mesh = space.mesh();
  const auto n = static_cast<long>(space.dof_count());
  const Complex k2 = k.value() * k.value();

  std::vector<std::size_t> active;  // elements carrying at least one dof
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto d = space.element_dofs(e);
    if (d[0] >= 0 || d[1] >= 0 || d[2] >= 0) active.push_back(e);
  }
  std::vector<std::array<Point2, 3>> grads(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) grads[i] = barycentric_gradients(mesh, active[i]);

  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  const long m = static_cast<long>(active.size());
  constexpr long kChunk = 32;
  std::vector<LocalBlock> blocks;
  ExceptionSlot slot;
  // Blocks of a chunk of rows are computed in parallel, then scattered serially in a
  // fixed order so the result does not depend on the thread count.
  for (long row0 = 0; row0 < m; row0 += kChunk) {
    const long rows = std::min(kChunk, m - row0);
    blocks.assign(static_cast<std::size_t>(rows * m), LocalBlock{});
#pragma omp parallel for collapse(2) schedule(dynamic, 16) if (execution == Execution::Parallel)
    for (long r = 0; r < rows; ++r) {
      for (long c = 0; c < m; ++c) {
        if (c < row0 + r) continue;
        slot.run([&] {
          blocks[r * m + c] = element_pair_block(mesh, active[row0 + r], active[c], k, options);
        });
      }
    }
    slot.rethrow();
    for (long r = 0; r < rows; ++r) {
      const long ia = row0 + r;
      const auto da = space.element_dofs(active[ia]);
      for (long ib = ia; ib < m; ++ib) {
        const auto db = space.element_dofs(active[ib]);
        const LocalBlock& block = blocks[r * m + ib];
        Complex total = 0.0;
        for (const auto& row : block) {
          for (const auto& v : row) total += v;
        }
        for (int i = 0; i < 3; ++i) {
          if (da[i] < 0) continue;
          for (int j = 0; j < 3; ++j) {
            if (db[j] < 0) continue;
            const Complex v = total * dot(grads[ia][i], grads[ib][j]) - k2 * block[i][j];
            a(da[i], db[j]) += v;
            if (ib != ia) a(db[j], da[i]) += v;
          }
        }
      }
    }
  }
  // Exact symmetry regardless of summation order.
  for (long p = 0; p < n; ++p) {
    for (long q = p + 1; q < n; ++q) {
      const Complex v = 0.5 * (a(p, q) + a(q, p));
      a(p, q) = v;
      a(q, p) = v;
    }
  }
  return a;
}

ComplexMatrix assemble_matrix(const FunctionSpace& space, const Wavenumber& k,
                              const QuadratureOptions& options, Execution execution) {
  return space.kind() == SpaceKind::P0Jump ? assemble_single_layer(space, k, options, execution)
                                           : assemble_hypersingular(space, k, options, execution);
}

ComplexVector assemble_rhs(const FunctionSpace& space, const BoundaryData& data, const Wavenumber& k) {
  const Mesh& mesh = space.mesh();
  ComplexVector b = ComplexVector::Zero(static_cast<long>(space.dof_count()));
  if (data.is_zero()) return b;
  int degree = 12;
  for (const auto& m : data.monomials) degree = std::max(degree, m.px + m.py + 1);
  const auto& rule = quad::triangle_rule(std::min(degree, 60));
  const double sign = space.kind() == SpaceKind::P0Jump ? 1.0 : -1.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    if (dofs[0] < 0 && dofs[1] < 0 && dofs[2] < 0) continue;
    const auto& t = mesh.elements[e];
    const Point2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    const double jac = std::abs(cross(p1 - p0, p2 - p1));
    std::array<Complex, 3> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x1 = rule.x1[q], x2 = rule.x2[q];
      const Point2 x = p0 + x1 * (p1 - p0) + x2 * (p2 - p1);
      const Complex fw = data(x, k.value()) * (rule.w[q] * jac);
      if (space.kind() == SpaceKind::P0Jump) {
        local[0] += fw;
      } else {
        local[0] += fw * (1.0 - x1);
        local[1] += fw * (x1 - x2);
        local[2] += fw * x2;
      }
    }
    for (int i = 0; i < 3; ++i) {
      if (dofs[i] >= 0) b(dofs[i]) += sign * local[i];
    }
  }
  return b;
}

FormConstants estimate_constants(const ComplexMatrix& matrix, const ComplexMatrix& reference) {
  FormConstants out;
  const long n = matrix.rows();
  if (n == 0) return out;
  Eigen::LLT<ComplexMatrix> llt(reference);
  if (llt.info() != Eigen::Success) throw SingularMatrix(0.0);
  // M = L^{-1} A L^{-H}: the form in coordinates orthonormal for the reference norm.
  ComplexMatrix m = llt.matrixL().solve(matrix);
  m = llt.matrixL().solve(m.adjoint()).adjoint();
  out.continuity = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()(0);

  // Distance from 0 to the numerical range = max over theta of lambda_min(Herm(e^{i theta} M)).
  auto support = [&](double theta) {
    const ComplexMatrix h = 0.5 * (std::polar(1.0, theta) * m + std::polar(1.0, -theta) * m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
  };
  constexpr int kGrid = 32;
  double best_theta = 0.0, best = -1e300;
  for (int i = 0; i < kGrid; ++i) {
    const double theta = 2.0 * kPi * i / kGrid;
    const double v = support(theta);
    if (v > best) best = v, best_theta = theta;
  }
  // Golden-section refinement; the support function is concave near its maximum.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_theta - 2.0 * kPi / kGrid, hi = best_theta + 2.0 * kPi / kGrid;
  double t1 = hi - g * (hi - lo), t2 = lo + g * (hi - lo);
  double f1 = support(t1), f2 = support(t2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      lo = t1, t1 = t2, f1 = f2;
      t2 = lo + g * (hi - lo), f2 = support(t2);
    } else {
      hi = t2, t2 = t1, f2 = f1;
      t1 = hi - g * (hi - lo), f1 = support(t1);
    }
  }
  out.coercivity = std::max({best, f1, f2, 0.0});
  return out;
}

GalerkinSystem assemble_system(std::shared_ptr<const FunctionSpace> space, const Wavenumber& k,
                               const BoundaryData& data, const QuadratureOptions& options,
                               Execution execution) {
  GalerkinSystem system;
  system.space = space;
  system.k = k;
  system.quadrature = options;
  system.matrix = assemble_matrix(*space, k, options, execution);
  system.rhs = assemble_rhs(*space, data, k);
  if (k.is_i()) {
    system.reference = system.matrix;
  } else {
    system.reference = assemble_matrix(*space, Wavenumber::imaginary(1.0), options, execution);
    const FormConstants c = estimate_constants(system.matrix, system.reference);
    system.continuity_est = c.continuity;
    system.coercivity_est = c.coercivity;
  }
  return system;
}

}  // namespace fbem
