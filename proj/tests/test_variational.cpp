#include <doctest.h>

#include <cmath>
#include <random>

#include "fbem/errors.hpp"
#include "fbem/variational.hpp"

using namespace fbem;

namespace {

std::shared_ptr<const FunctionSpace> space_on(const PanelSet& set, int refine, SpaceKind kind) {
  return std::make_shared<const FunctionSpace>(build_space(std::make_shared<const Mesh>(mesh_panels(set, refine)), kind));
}

PanelSet unit_square() { return make_panel_set({Square{{0.0, 0.0}, 1.0}}); }

GalerkinSystem square_system(int refine, const BoundaryData& data = BoundaryData::constant(1.0)) {
  return assemble_system(space_on(unit_square(), refine, SpaceKind::P0Jump), Wavenumber::imaginary(1.0), data);
}

Eigen::SparseMatrix<double> identity(std::size_t n) {
  Eigen::SparseMatrix<double> id(static_cast<long>(n), static_cast<long>(n));
  id.setIdentity();
  return id;
}

}  // namespace

TEST_SUITE("variational") {
  TEST_CASE("one by one system") {
    GalerkinSystem system;
    system.space = space_on(make_panel_set({Triangle{{Point2{0, 0}, {1, 0}, {0, 1}}}}), 0, SpaceKind::P0Jump);
    system.matrix = ComplexMatrix::Constant(1, 1, 2.0);
    system.rhs = ComplexVector::Constant(1, 3.0);
    system.reference = system.matrix;
    const Solution sol = solve(system);
    CHECK(sol.coefficients(0) == Complex(1.5));
    CHECK(sol.energy_norm == doctest::Approx(std::sqrt(4.5)));
    CHECK(sol.tag == ProblemTag::DirichletJump);

    system.matrix(0, 0) = 0.0;
    CHECK_THROWS_AS(solve(system), SingularMatrix);
  }

  TEST_CASE("dirichlet solve on the unit square") {
    const GalerkinSystem system = square_system(2);
    const Solution sol = solve(system);
    CHECK(sol.relative_residual < 1e-12);
    CHECK(sol.energy_norm > 0.0);
    // capacity identity: <1, phi> = a(phi, phi) for f = 1
    CHECK(mean_functional(sol).real() == doctest::Approx(sol.energy_norm * sol.energy_norm).epsilon(1e-10));
    // the density of a flat plate is symmetric under the square's reflections
    const Mesh& mesh = sol.space->mesh();
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const Point2 c = mesh.centroid(e);
      for (std::size_t f = 0; f < mesh.num_elements(); ++f) {
        if (norm(mesh.centroid(f) - Point2{1.0 - c.x, c.y}) < 1e-12)
          CHECK(std::abs(sol.coefficients(e) - sol.coefficients(f)) < 1e-9 * std::abs(sol.coefficients(e)));
      }
    }
  }

  TEST_CASE("zero data gives zero solutions") {
    const Solution sol = solve(square_system(1, BoundaryData::constant(0.0)));
    CHECK(sol.coefficients.isZero(0.0));
    CHECK(sol.energy_norm == 0.0);
  }

  TEST_CASE("galerkin orthogonality") {
    const auto coarse = space_on(unit_square(), 2, SpaceKind::P0Jump);
    const GalerkinSystem fine = square_system(3);
    Solution sol = solve(fine);
    CHECK(galerkin_orthogonality_check(sol, *coarse, fine) <= 1e-9);
    // coarse = fine
    CHECK(galerkin_orthogonality_check(sol, identity(fine.size()), fine) <= 1e-12);
    // detector sensitivity
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double scale = sol.coefficients.cwiseAbs().maxCoeff();
    for (long i = 0; i < sol.coefficients.size(); ++i) sol.coefficients(i) += 1e-3 * scale * unit(rng);
    CHECK(galerkin_orthogonality_check(sol, *coarse, fine) > 1e-6);
  }

  TEST_CASE("cea inequality") {
    const GalerkinSystem fine = square_system(3);
    const Solution fine_sol = solve(fine);
    const auto coarse_space = space_on(unit_square(), 1, SpaceKind::P0Jump);
    const auto p = prolongation(*coarse_space, *fine.space);
    const Solution coarse_sol = solve_in_subspace(fine, p, coarse_space);
    const CeaRecord rec = cea_diagnostic(coarse_sol, fine_sol, p, fine, fine.continuity_est, fine.coercivity_est);
    CHECK(rec.holds);
    CHECK(rec.lhs > 0.0);
    CHECK(rec.lhs <= rec.rhs * (1.0 + 1e-8));

    const CeaRecord same = cea_diagnostic(fine_sol, fine_sol, identity(fine.size()), fine, 1.0, 1.0);
    CHECK(same.lhs < 1e-12);
    CHECK(same.best_approximation < 1e-12);
    CHECK(same.holds);

    const GalerkinSystem zero = square_system(2, BoundaryData::constant(0.0));
    const auto coarse0 = space_on(unit_square(), 1, SpaceKind::P0Jump);
    const auto p0 = prolongation(*coarse0, *zero.space);
    const CeaRecord nothing = cea_diagnostic(solve_in_subspace(zero, p0, coarse0), solve(zero), p0, zero, 1.0, 1.0);
    CHECK(nothing.lhs == 0.0);
    CHECK(nothing.rhs == 0.0);
    CHECK(nothing.holds);
  }

  TEST_CASE("cea inequality with a complex wavenumber") {
    const auto fine_space = space_on(unit_square(), 2, SpaceKind::P0Jump);
    const GalerkinSystem fine = assemble_system(fine_space, Wavenumber(Complex(3.0, 1.0)), BoundaryData::plane_wave({0.6, 0.0}));
    const auto coarse = space_on(unit_square(), 1, SpaceKind::P0Jump);
    const auto p = prolongation(*coarse, *fine_space);
    const CeaRecord rec =
        cea_diagnostic(solve_in_subspace(fine, p, coarse), solve(fine), p, fine, fine.continuity_est, fine.coercivity_est);
    CHECK(rec.constant_ratio >= 1.0);
    CHECK(rec.holds);
  }

  TEST_CASE("trend classification") {
    std::vector<double> geometric, plateau, slow;
    for (int j = 0; j < 5; ++j) {
      geometric.push_back(std::pow(0.6, j));
      plateau.push_back(2.0 + std::pow(0.3, j));
      slow.push_back(1.0 - 0.03 * j);  // no geometric decay, no plateau
    }
    CHECK(classify_trend(geometric).verdict == Verdict::ConvergesToZero);
    CHECK(classify_trend(geometric).fitted_ratio == doctest::Approx(0.6));
    const auto flat = classify_trend(plateau);
    CHECK(flat.verdict == Verdict::ConvergesToNonzero);
    CHECK(flat.extrapolated_limit == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(classify_trend(slow).verdict == Verdict::Inconclusive);
    CHECK(classify_trend({0.0, 0.0, 0.0}).verdict == Verdict::ConvergesToZero);
    CHECK(classify_trend({1.0}).verdict == Verdict::Inconclusive);
  }

  TEST_CASE("zero data sequences") {
    SequenceOptions opts;
    opts.levels = 2;
    opts.data = BoundaryData::constant(0.0);
    const ConvergenceReport dirichlet = solve_decreasing_sequence(1.0 / 3.0, opts);
    for (const auto& level : dirichlet.levels) {
      CHECK(level.energy_norm == 0.0);
      if (level.diff_prev) CHECK(*level.diff_prev == 0.0);
    }
    CHECK(dirichlet.trend.verdict == Verdict::ConvergesToZero);

    opts.refine = 2;
    const ConvergenceReport neumann = solve_increasing_sequence(opts);
    for (const auto& level : neumann.levels) CHECK(level.energy_norm == 0.0);
    opts.levels = 1;
    CHECK_THROWS_AS(solve_decreasing_sequence(1.0 / 3.0, opts), DomainError);
  }

  TEST_CASE("decreasing sequence records") {
    SequenceOptions opts;
    opts.levels = 3;
    const ConvergenceReport report = solve_decreasing_sequence(1.0 / 3.0, opts);
    REQUIRE(report.levels.size() == 3);
    CHECK(report.diff_method == "superspace");
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& level = report.levels[j];
      CHECK(level.level == static_cast<int>(j + 1));
      CHECK(level.dofs == (std::size_t{2} << (2 * (j + 1))));
      REQUIRE(level.capacity.has_value());
      // capacity = a(phi, phi) = |phi|_a^2
      CHECK(*level.capacity == doctest::Approx(level.energy_norm * level.energy_norm).epsilon(1e-9));
      CHECK(level.energy_norm <= level.bound * (1.0 + 1e-12));
      if (j > 0) {
        REQUIRE(level.diff_prev.has_value());
        CHECK(*level.diff_prev > 0.0);
        CHECK(*level.capacity <= *report.levels[j - 1].capacity);
      }
    }
  }

  TEST_CASE("generic alpha falls back to the functional difference") {
    SequenceOptions opts;
    opts.levels = 2;
    const ConvergenceReport report = solve_decreasing_sequence(0.3, opts);
    CHECK(report.diff_method == "scalar-functional");
    REQUIRE(report.levels[1].diff_prev.has_value());
    CHECK(*report.levels[1].diff_prev ==
          doctest::Approx(std::abs(report.levels[1].functional - report.levels[0].functional)));
  }

  TEST_CASE("increasing sequence on two levels") {
    SequenceOptions opts;
    opts.levels = 2;
    opts.refine = 2;
    const ConvergenceReport report = solve_increasing_sequence(opts);
    CHECK(report.tag == ProblemTag::NeumannJump);
    CHECK(report.diff_method == "nested");
    REQUIRE(report.gap_to_base.has_value());
    CHECK(*report.gap_to_base > 0.0);
    // the energy of nested Galerkin solutions of a coercive symmetric problem grows with the space
    CHECK(report.levels[1].energy_norm >= report.levels[0].energy_norm);
  }
}
