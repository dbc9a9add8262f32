#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "fbem/assembly.hpp"
#include "fbem/geometry.hpp"

namespace fbem {

enum class ProblemTag { DirichletJump, NeumannJump };

std::string to_string(ProblemTag tag);

struct Solution {
  ComplexVector coefficients;
  std::shared_ptr<const FunctionSpace> space;
  ProblemTag tag = ProblemTag::DirichletJump;
  double energy_norm = 0.0;
  double relative_residual = 0.0;
  double rcond = 1.0;
};

/// Solves A x = b by LU with partial pivoting. Throws SingularMatrix when the
/// reciprocal condition estimate is below 1e-14 or the residual exceeds 1e-10.
Solution solve(const GalerkinSystem& system);

/// Galerkin solution in the subspace spanned by the columns of `embedding`, using the
/// form of `system`: (P^T A P) x = P^T b. The returned coefficients are in the subspace.
Solution solve_in_subspace(const GalerkinSystem& system, const Eigen::SparseMatrix<double>& embedding,
                           std::shared_ptr<const FunctionSpace> subspace);

/// max_e |a(u_fine, P e) - <b, P e>| over coarse basis vectors e, divided by
/// |b|_inf + |A|_inf |u_fine|_inf.
double galerkin_orthogonality_check(const Solution& fine, const Eigen::SparseMatrix<double>& embedding,
                                    const GalerkinSystem& fine_system);
double galerkin_orthogonality_check(const Solution& fine, const FunctionSpace& coarse_space,
                                    const GalerkinSystem& fine_system);

/// Quasi-optimality check |u_c - u_f| <= (C/c) inf_v |v - u_f| in the reference norm of
/// the fine system (the k = i Gram matrix).
struct CeaRecord {
  double lhs = 0.0;
  double best_approximation = 0.0;
  double constant_ratio = 1.0;  // C_h / c_h
  double rhs = 0.0;
  bool holds = true;
};

CeaRecord cea_diagnostic(const Solution& coarse, const Solution& fine,
                         const Eigen::SparseMatrix<double>& embedding, const GalerkinSystem& fine_system,
                         double continuity, double coercivity);

enum class Verdict { ConvergesToZero, ConvergesToNonzero, Inconclusive };

std::string to_string(Verdict verdict);

/// Trend rule applied to a positive sequence q_1..q_J.
struct VerdictRule {
  double zero_fit_ratio = 0.9;       // exp(slope of log q_j) at most this
  double zero_last_ratio = 0.95;     // and q_J / q_{J-1} at most this
  double nonzero_spread = 0.10;      // (max - min) / max over the last three values
  double nonzero_tail_factor = 10.0; // q_J >= factor * geometric tail of future decrements
};

struct TrendDiagnostics {
  std::vector<double> ratios;       // q_j / q_{j-1}
  double fitted_ratio = 0.0;        // exp of the least-squares slope of log q_j
  double spread = 0.0;
  double tail = 0.0;                // geometric estimate of the remaining change
  double extrapolated_limit = 0.0;  // Aitken extrapolation of q_j
  Verdict verdict = Verdict::Inconclusive;
};

TrendDiagnostics classify_trend(const std::vector<double>& values, const VerdictRule& rule = {});

struct LevelRecord {
  int level = 0;
  std::size_t dofs = 0;
  double energy_norm = 0.0;
  std::optional<double> diff_prev;
  std::optional<double> capacity;
  double functional = 0.0;  // |<1, phi_j>|
  double bound = 0.0;       // Lax-Milgram bound |b|_* / c_h
  double c_h = 1.0;
  double C_h = 1.0;
};

struct ConvergenceReport {
  Family family = Family::CantorDust;
  double alpha = 0.0;
  ProblemTag tag = ProblemTag::DirichletJump;
  int refine = 0;
  std::vector<LevelRecord> levels;
  std::string monitored;    // quantity the verdict is computed from
  std::string diff_method;  // "superspace" or "scalar-functional" or "nested"
  TrendDiagnostics trend;
  std::optional<double> gap_to_base;  // |phi_J - phi*| on the full base screen
  std::optional<std::size_t> base_dofs;
};

struct SequenceOptions {
  int levels = 4;  // j = 1..levels
  int refine = 0;
  Wavenumber k = Wavenumber::imaginary(1.0);
  BoundaryData data = BoundaryData::constant(1.0);
  QuadratureOptions quadrature;
  Execution execution = Execution::Parallel;
  std::size_t element_cap = kDefaultElementCap;
  VerdictRule rule;
};

/// Dirichlet problems on the Cantor dust levels 1..J with P0 densities.
ConvergenceReport solve_decreasing_sequence(double alpha, const SequenceOptions& options);

/// Neumann problems on the Sierpinski complement screens 1..J with P1 densities, plus the
/// comparison solve on the whole base triangle.
ConvergenceReport solve_increasing_sequence(const SequenceOptions& options);

/// |<1, phi>| for a P0 or P1 density.
Complex mean_functional(const Solution& solution);

}  // namespace fbem
