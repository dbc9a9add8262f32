#include "fbem/variational.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fbem/errors.hpp"
#include "fbem/sobolev.hpp"

namespace fbem {

namespace {

constexpr double kMinRcond = 1e-14;
constexpr double kResidualTolerance = 1e-10;

ProblemTag tag_for(const FunctionSpace& space) {
  return space.kind() == SpaceKind::P0Jump ? ProblemTag::DirichletJump : ProblemTag::NeumannJump;
}

ComplexVector lu_solve(const ComplexMatrix& a, const ComplexVector& b, double& rcond, double& residual) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rcond = 1.0;
    residual = 0.0;
    return ComplexVector::Zero(b.size());
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) throw SingularMatrix(rcond);
  ComplexVector x = lu.solve(b);
  residual = (a * x - b).norm() / bnorm;
  if (residual > kResidualTolerance) {
    x += lu.solve(b - a * x);  // one step of iterative refinement
    residual = (a * x - b).norm() / bnorm;
  }
  if (!(residual <= kResidualTolerance)) throw SingularMatrix(rcond);
  return x;
}

// |b|_* = sqrt(b^H G^{-1} b), the dual norm for the reference Gram matrix.
double dual_norm(const ComplexMatrix& reference, const ComplexVector& b) {
  if (b.norm() == 0.0) return 0.0;
  Eigen::LLT<ComplexMatrix> llt(reference);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(std::abs(b.dot(llt.solve(b))));
}

int integer_reciprocal(double alpha) {
  const double m = std::round(1.0 / alpha);
  return std::abs(1.0 / alpha - m) <= 1e-9 ? static_cast<int>(m) : 0;
}

LevelRecord make_record(int level, const GalerkinSystem& system, const Solution& sol) {
  LevelRecord r;
  r.level = level;
  r.dofs = system.size();
  r.energy_norm = sol.energy_norm;
  r.functional = std::abs(mean_functional(sol));
  r.c_h = system.coercivity_est;
  r.C_h = system.continuity_est;
  r.bound = r.c_h > 0.0 ? dual_norm(system.reference, system.rhs) / r.c_h
                        : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

std::string to_string(ProblemTag tag) {
  return tag == ProblemTag::DirichletJump ? "dirichlet" : "neumann";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::ConvergesToZero: return "ConvergesToZero";
    case Verdict::ConvergesToNonzero: return "ConvergesToNonzero";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

Solution solve(const GalerkinSystem& system) {
  if (system.size() == 0) throw EmptySpaceError("cannot solve an empty Galerkin system");
  Solution sol;
  sol.space = system.space;
  sol.tag = tag_for(*system.space);
  sol.coefficients = lu_solve(system.matrix, system.rhs, sol.rcond, sol.relative_residual);
  sol.energy_norm = energy_norm(system.matrix, sol.coefficients);
  return sol;
}

Solution solve_in_subspace(const GalerkinSystem& system, const Eigen::SparseMatrix<double>& embedding,
                           std::shared_ptr<const FunctionSpace> subspace) {
  const ComplexMatrix p = ComplexMatrix(embedding.cast<Complex>());
  const ComplexMatrix a = p.transpose() * system.matrix * p;
  const ComplexVector b = p.transpose() * system.rhs;
  Solution sol;
  sol.space = std::move(subspace);
  sol.tag = tag_for(*system.space);
  sol.coefficients = lu_solve(a, b, sol.rcond, sol.relative_residual);
  sol.energy_norm = energy_norm(a, sol.coefficients);
  return sol;
}

double galerkin_orthogonality_check(const Solution& fine, const Eigen::SparseMatrix<double>& embedding,
                                    const GalerkinSystem& fine_system) {
  const ComplexVector residual = fine_system.matrix * fine.coefficients - fine_system.rhs;
  const ComplexVector projected = embedding.transpose().cast<Complex>() * residual;
  double column_sum = 0.0;  // |P^T|_inf
  for (int c = 0; c < embedding.outerSize(); ++c) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(embedding, c); it; ++it) s += std::abs(it.value());
    column_sum = std::max(column_sum, s);
  }
  const double a_inf = fine_system.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = column_sum * (a_inf * fine.coefficients.cwiseAbs().maxCoeff() +
                                     fine_system.rhs.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  return projected.cwiseAbs().maxCoeff() / scale;
}

double galerkin_orthogonality_check(const Solution& fine, const FunctionSpace& coarse_space,
                                    const GalerkinSystem& fine_system) {
  return galerkin_orthogonality_check(fine, prolongation(coarse_space, *fine_system.space), fine_system);
}

CeaRecord cea_diagnostic(const Solution& coarse, const Solution& fine,
                         const Eigen::SparseMatrix<double>& embedding, const GalerkinSystem& fine_system,
                         double continuity, double coercivity) {
  const ComplexMatrix& g = fine_system.reference;
  const ComplexMatrix p = ComplexMatrix(embedding.cast<Complex>());
  auto gnorm = [&](const ComplexVector& v) { return std::sqrt(std::abs(v.dot(g * v))); };

  CeaRecord rec;
  rec.lhs = gnorm(p * coarse.coefficients - fine.coefficients);
  // G-orthogonal projection of the fine solution onto the coarse space.
  const ComplexMatrix gp = g * p;
  const ComplexMatrix normal = p.adjoint() * gp;
  const ComplexVector rhs = gp.adjoint() * fine.coefficients;
  ComplexVector best = ComplexVector::Zero(p.cols());
  if (rhs.norm() > 0.0) best = Eigen::LLT<ComplexMatrix>(normal).solve(rhs);
  rec.best_approximation = gnorm(p * best - fine.coefficients);
  rec.constant_ratio = coercivity > 0.0 ? continuity / coercivity : std::numeric_limits<double>::infinity();
  rec.rhs = rec.constant_ratio * rec.best_approximation;
  // Relative slack plus a round-off floor tied to the size of the fine solution.
  rec.holds = rec.lhs <= rec.rhs * (1.0 + 1e-8) + 1e-12 * gnorm(fine.coefficients);
  return rec;
}

TrendDiagnostics classify_trend(const std::vector<double>& q, const VerdictRule& rule) {
  TrendDiagnostics t;
  const std::size_t n = q.size();
  if (n == 0) return t;
  if (std::all_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) {
    t.verdict = Verdict::ConvergesToZero;
    t.ratios.assign(n - 1, 0.0);
    return t;
  }
  for (std::size_t j = 1; j < n; ++j) {
    t.ratios.push_back(q[j - 1] != 0.0 ? q[j] / q[j - 1] : std::numeric_limits<double>::quiet_NaN());
  }
  const bool positive = std::all_of(q.begin(), q.end(), [](double v) { return v > 0.0; });

  if (positive && n >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < n; ++j) mx += j, my += std::log(q[j]);
    mx /= n, my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sxy += (j - mx) * (std::log(q[j]) - my);
      sxx += (j - mx) * (j - mx);
    }
    t.fitted_ratio = std::exp(sxy / sxx);
  }

  const std::size_t tail_count = std::min<std::size_t>(3, n);
  const auto last = q.end() - static_cast<long>(tail_count);
  const double hi = *std::max_element(last, q.end());
  const double lo = *std::min_element(last, q.end());
  t.spread = hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();

  t.tail = std::numeric_limits<double>::infinity();
  t.extrapolated_limit = q.back();
  if (n >= 3) {
    const double d1 = q[n - 1] - q[n - 2];
    const double d0 = q[n - 2] - q[n - 3];
    if (d0 != 0.0) {
      const double r = std::abs(d1 / d0);
      if (r < 1.0) t.tail = std::abs(d1) * r / (1.0 - r);
    } else if (d1 == 0.0) {
      t.tail = 0.0;
    }
    if (d1 != d0) t.extrapolated_limit = q[n - 1] - d1 * d1 / (d1 - d0);
  }

  if (positive && n >= 2 && t.fitted_ratio <= rule.zero_fit_ratio && t.ratios.back() <= rule.zero_last_ratio) {
    t.verdict = Verdict::ConvergesToZero;
  } else if (n >= 3 && t.spread <= rule.nonzero_spread && q.back() >= rule.nonzero_tail_factor * t.tail) {
    t.verdict = Verdict::ConvergesToNonzero;
  }
  return t;
}

Complex mean_functional(const Solution& solution) {
  const auto weights = solution.space->basis_integrals();
  Complex sum = 0.0;
  for (std::size_t p = 0; p < weights.size(); ++p) sum += solution.coefficients(static_cast<long>(p)) * weights[p];
  return sum;
}

ConvergenceReport solve_decreasing_sequence(double alpha, const SequenceOptions& options) {
  if (options.levels < 2) throw DomainError("a sequence needs at least two levels");
  PrefractalSpec{Family::CantorDust, alpha, options.levels}.validate();

  ConvergenceReport report;
  report.family = Family::CantorDust;
  report.alpha = alpha;
  report.tag = ProblemTag::DirichletJump;
  report.refine = options.refine;
  report.monitored = "abs_mean_functional";
  const int ratio = integer_reciprocal(alpha);
  report.diff_method = ratio > 0 ? "superspace" : "scalar-functional";
  const bool capacity_run = options.k.is_i() && options.data.kind == BoundaryData::Kind::Constant &&
                            options.data.value == Complex(1.0);
  const int divisions = 1 << options.refine;

  std::shared_ptr<const FunctionSpace> prev_space;
  Solution prev;
  std::vector<double> monitored;
  for (int j = 1; j <= options.levels; ++j) {
    const PanelSet screen = cantor_dust_prefractal(alpha, j);
    auto mesh = std::make_shared<const Mesh>(mesh_with_divisions(screen, divisions, options.element_cap));
    auto space = std::make_shared<const FunctionSpace>(build_space(mesh, SpaceKind::P0Jump));
    const GalerkinSystem system =
        assemble_system(space, options.k, options.data, options.quadrature, options.execution);
    Solution sol = solve(system);
    LevelRecord rec = make_record(j, system, sol);
    if (capacity_run) rec.capacity = mean_functional(sol).real();

    if (prev_space) {
      if (ratio > 0) {
        // Level j-1 meshed so that both levels are unions of its elements.
        const PanelSet coarse_screen = cantor_dust_prefractal(alpha, j - 1);
        auto super_mesh = std::make_shared<const Mesh>(
            mesh_with_divisions(coarse_screen, divisions * ratio, options.element_cap));
        const FunctionSpace super(super_mesh, SpaceKind::P0Jump);
        const ComplexVector diff = prolongation(*prev_space, super).cast<Complex>() * prev.coefficients -
                                   prolongation(*space, super).cast<Complex>() * sol.coefficients;
        rec.diff_prev = std::sqrt(std::abs(
            single_layer_energy(super, options.k, diff, options.quadrature, options.execution)));
      } else {
        rec.diff_prev = std::abs(rec.functional - report.levels.back().functional);
      }
    }
    monitored.push_back(rec.functional);
    report.levels.push_back(rec);
    prev_space = space;
    prev = std::move(sol);
  }
  report.trend = classify_trend(monitored, options.rule);
  return report;
}

ConvergenceReport solve_increasing_sequence(const SequenceOptions& options) {
  if (options.levels < 2) throw DomainError("a sequence needs at least two levels");
  ConvergenceReport report;
  report.family = Family::SierpinskiComplement;
  report.tag = ProblemTag::NeumannJump;
  report.refine = options.refine;
  report.monitored = "energy_norm";
  report.diff_method = "nested";

  std::shared_ptr<const FunctionSpace> prev_space;
  Solution prev;
  std::vector<double> monitored;
  for (int j = 1; j <= options.levels; ++j) {
    const PanelSet screen = sierpinski_complement_screen(j);
    auto mesh = std::make_shared<const Mesh>(mesh_panels(screen, options.refine, options.element_cap));
    auto space = std::make_shared<const FunctionSpace>(build_space(mesh, SpaceKind::P1ZeroTrace));
    const GalerkinSystem system =
        assemble_system(space, options.k, options.data, options.quadrature, options.execution);
    Solution sol = solve(system);
    LevelRecord rec = make_record(j, system, sol);
    if (prev_space) {
      // V_{j-1} is a subspace of V_j, so the difference is measured with A_j.
      const ComplexVector diff =
          prolongation(*prev_space, *space).cast<Complex>() * prev.coefficients - sol.coefficients;
      rec.diff_prev = energy_norm(system.matrix, diff);
    }
    monitored.push_back(rec.energy_norm);
    report.levels.push_back(rec);
    prev_space = space;
    prev = std::move(sol);
  }

  // Whole base triangle, meshed finely enough to contain the last level's space.
  const PanelSet base = sierpinski_base_screen();
  auto base_mesh = std::make_shared<const Mesh>(
      mesh_with_divisions(base, 1 << (options.levels + options.refine), options.element_cap));
  auto base_space = std::make_shared<const FunctionSpace>(build_space(base_mesh, SpaceKind::P1ZeroTrace));
  const GalerkinSystem base_system =
      assemble_system(base_space, options.k, options.data, options.quadrature, options.execution);
  const Solution base_sol = solve(base_system);
  const ComplexVector gap =
      prolongation(*prev_space, *base_space).cast<Complex>() * prev.coefficients - base_sol.coefficients;
  report.gap_to_base = energy_norm(base_system.matrix, gap);
  report.base_dofs = base_space->dof_count();
  report.trend = classify_trend(monitored, options.rule);
  return report;
}

}  // namespace fbem
