// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//   fbem_acceptance --tool <path to fbem> --workdir <scratch directory>

#include <CLI11.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <iostream>
#include <sstream>

#include "fbem/errors.hpp"
#include "fbem/sobolev.hpp"
#include "fbem/variational.hpp"
#include "golden.hpp"

using namespace fbem;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::shared_ptr<const FunctionSpace> space_on(const PanelSet& set, int refine, SpaceKind kind) {
  return std::make_shared<const FunctionSpace>(build_space(std::make_shared<const Mesh>(mesh_panels(set, refine)), kind));
}

PanelSet unit_square() { return make_panel_set({Square{{0.0, 0.0}, 1.0}}); }

// Shell invocation of the command line tool; returns the exit status.
int run_tool(const std::string& tool, const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string cmd = "\"" + tool + "\" " + args + " --output-dir \"" + dir.string() + "\" > \"" +
                          (dir / "stdout.json").string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kSequenceArgs = "solve-sequence --family cantor_dust --levels 4 --refine 0 --k-re 0 --k-im 1 "
                                  "--bc dirichlet --data const:1";

Outcome dimensions() {
  const auto start = std::chrono::steady_clock::now();
  const double dust = similarity_dimension({Family::CantorDust, 1.0 / 3.0, 0}).hausdorff_dim;
  const double dust_fine = similarity_dimension({Family::CantorDust, 0.2, 0}).hausdorff_dim;
  const double gasket = similarity_dimension({Family::SierpinskiGasket, 0.0, 0}).hausdorff_dim;
  const DimensionReport threshold = similarity_dimension({Family::CantorDust, 0.25, 0});
  const double elapsed = seconds_since(start);
  const double err = std::max({std::abs(dust - 2.0 * std::log(2.0) / std::log(3.0)),
                               std::abs(dust_fine - 2.0 * std::log(2.0) / std::log(5.0)),
                               std::abs(gasket - std::log(3.0) / std::log(2.0))});
  const bool ok = err <= 1e-10 && threshold.hausdorff_dim == 1.0 && threshold.prediction == Nullity::Indeterminate &&
                  elapsed < 1e-3;
  return {ok, "max error " + fmt(err) + ", alpha=1/4 dim " + fmt(threshold.hausdorff_dim) + " " +
                  to_string(threshold.prediction) + ", " + fmt(elapsed * 1e3) + " ms"};
}

Outcome dichotomy(const std::string& tool, const fs::path& work) {
  std::string detail;
  bool ok = true;
  for (const auto& [alpha, expected] : {std::pair{"0.2", "ConvergesToZero"}, std::pair{"0.3333333333333333", "ConvergesToNonzero"}}) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = work / (std::string("dichotomy_") + alpha);
    const int code = run_tool(tool, kSequenceArgs + " --alpha " + alpha, dir);
    const double elapsed = seconds_since(start);
    std::string verdict = "exit " + std::to_string(code);
    std::size_t dofs = 0;
    if (code == 0 || code == 3) {
      const json doc = json::parse(slurp(dir / "fbem.json"));
      verdict = doc["report"]["trend"]["verdict"].get<std::string>();
      for (const auto& level : doc["report"]["levels"]) dofs = std::max(dofs, level["dofs"].get<std::size_t>());
    }
    ok = ok && verdict == expected && dofs <= 2000 && elapsed <= 300.0;
    detail += std::string(detail.empty() ? "" : "; ") + "alpha=" + alpha + " " + verdict + " (max dofs " +
              std::to_string(dofs) + ", " + fmt(elapsed) + " s)";
  }
  return {ok, detail};
}

Outcome positivity() {
  double smallest = 1e300;
  bool factored = true;
  auto check = [&](const ComplexMatrix& a) {
    const Eigen::MatrixXd sym = 0.5 * (a.real() + a.real().transpose());
    factored = factored && a.imag().cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff();
    factored = factored && Eigen::LLT<Eigen::MatrixXd>(sym).info() == Eigen::Success;
    smallest = std::min(smallest, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0));
  };
  const Wavenumber k = Wavenumber::imaginary(1.0);
  for (const auto& [set, refine] : {std::pair{unit_square(), 2}, std::pair{cantor_dust_prefractal(1.0 / 3.0, 2), 1},
                                    std::pair{cantor_dust_prefractal(0.2, 3), 0},
                                    std::pair{sierpinski_complement_screen(2), 1}}) {
    check(assemble_single_layer(*space_on(set, refine, SpaceKind::P0Jump), k));
  }
  for (const auto& [set, refine] : {std::pair{unit_square(), 2}, std::pair{unit_square(), 3},
                                    std::pair{sierpinski_complement_screen(2), 2}}) {
    check(assemble_hypersingular(*space_on(set, refine, SpaceKind::P1ZeroTrace), k));
  }
  return {factored && smallest > 1e-14, "7 matrices, Cholesky " + std::string(factored ? "ok" : "failed") +
                                            ", smallest eigenvalue " + fmt(smallest)};
}

Outcome galerkin() {
  const auto fine_space = space_on(unit_square(), 3, SpaceKind::P0Jump);
  const auto coarse_space = space_on(unit_square(), 2, SpaceKind::P0Jump);
  const GalerkinSystem fine = assemble_system(fine_space, Wavenumber::imaginary(1.0), BoundaryData::constant(1.0));
  const Solution fine_sol = solve(fine);
  const auto p = prolongation(*coarse_space, *fine_space);
  const double orth = galerkin_orthogonality_check(fine_sol, p, fine);
  const CeaRecord cea =
      cea_diagnostic(solve_in_subspace(fine, p, coarse_space), fine_sol, p, fine, fine.continuity_est, fine.coercivity_est);
  const bool ok = orth <= 1e-9 && cea.lhs <= cea.rhs * (1.0 + 1e-8) + 1e-8;
  return {ok, "orthogonality " + fmt(orth) + ", cea " + fmt(cea.lhs) + " <= " + fmt(cea.rhs)};
}

Outcome capacity() {
  std::vector<double> refine_sweep, level_sweep;
  for (int r = 1; r <= 3; ++r) refine_sweep.push_back(capacity_estimate(unit_square(), r));
  for (int j = 1; j <= 3; ++j) level_sweep.push_back(capacity_estimate(cantor_dust_prefractal(1.0 / 3.0, j), 1));
  bool ok = true;
  for (std::size_t i = 1; i < 3; ++i) {
    ok = ok && refine_sweep[i] >= refine_sweep[i - 1] - 1e-10;
    ok = ok && level_sweep[i] <= level_sweep[i - 1] + 1e-10;
  }
  return {ok, "refine " + fmt(refine_sweep[0]) + " " + fmt(refine_sweep[1]) + " " + fmt(refine_sweep[2]) +
                  "; level " + fmt(level_sweep[0]) + " " + fmt(level_sweep[1]) + " " + fmt(level_sweep[2])};
}

Outcome fourier_norms() {
  struct Case {
    std::shared_ptr<const FunctionSpace> space;
    std::vector<Complex> coeff;
  };
  std::vector<Case> cases;
  cases.push_back({space_on(unit_square(), 0, SpaceKind::P0Jump), {1.0, 1.0}});
  cases.push_back({space_on(make_panel_set({Square{{0.25, 0.25}, 0.5}}), 0, SpaceKind::P0Jump), {2.0, 2.0}});
  {
    const auto space = space_on(unit_square(), 1, SpaceKind::P0Jump);
    std::vector<Complex> c(space->dof_count());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = Complex(1.0 + 0.5 * std::cos(double(i)), std::sin(2.0 * i));
    cases.push_back({space, c});
  }
  double worst = 0.0;
  for (const auto& c : cases) {
    double exact = 0.0;
    const Mesh& mesh = c.space->mesh();
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) exact += std::norm(c.coeff[e]) * mesh.element_area(e);
    const double value = hs_norm(*c.space, c.coeff, HsNormSpec{}).value;
    worst = std::max(worst, std::abs(value - std::sqrt(exact)) / std::sqrt(exact));
  }
  const auto hat = space_on(unit_square(), 1, SpaceKind::P1ZeroTrace);
  std::vector<double> values;
  for (double s : {-0.5, 0.0, 0.5}) {
    HsNormSpec spec;
    spec.s = s;
    values.push_back(hs_norm(*hat, std::vector<Complex>{1.0}, spec).value);
  }
  const bool increasing = values[0] < values[1] && values[1] < values[2] && std::isfinite(values[2]);
  return {worst <= 2e-3 && increasing, "L2 max rel error " + fmt(worst) + "; hat norms " + fmt(values[0]) + " < " +
                                           fmt(values[1]) + " < " + fmt(values[2])};
}

Outcome increasing_sequence() {
  SequenceOptions options;
  options.levels = 3;
  options.refine = 2;
  const ConvergenceReport report = solve_increasing_sequence(options);
  std::vector<double> diffs;
  for (const auto& level : report.levels)
    if (level.diff_prev) diffs.push_back(*level.diff_prev);
  bool ok = diffs.size() == 2 && report.gap_to_base.has_value() && std::isfinite(*report.gap_to_base);
  for (std::size_t i = 1; ok && i < diffs.size(); ++i) ok = diffs[i] < diffs[i - 1];
  std::string detail = "diffs";
  for (double d : diffs) detail += " " + fmt(d);
  detail += ", gap to base " + (report.gap_to_base ? fmt(*report.gap_to_base) : std::string("missing"));
  return {ok, detail};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  std::string name;
  const auto results = golden::run();
  for (const auto& r : results)
    if (!(r.rel_error <= worst)) worst = r.rel_error, name = r.name;
  return {results.size() == 10 && worst <= 1e-6, std::to_string(results.size()) + " pairs, worst " + fmt(worst) + " (" + name + ")"};
}

Outcome determinism(const std::string& tool, const fs::path& work) {
  const fs::path a = work / "determinism_a", b = work / "determinism_b";
  const int ca = run_tool(tool, kSequenceArgs + " --alpha 0.2", a);
  const int cb = run_tool(tool, kSequenceArgs + " --alpha 0.2", b);
  const std::string first = slurp(a / "fbem.csv"), second = slurp(b / "fbem.csv");
  const bool ok = ca == 0 && cb == 0 && !first.empty() && first == second;
  return {ok, std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string tool;
  std::string workdir = (fs::temp_directory_path() / "fbem_acceptance").string();
  app.add_option("--tool", tool, "path to the fbem executable")->required();
  app.add_option("--workdir", workdir, "scratch directory for tool output");
  CLI11_PARSE(app, argc, argv);
  const fs::path work(workdir);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dimension formulas", dimensions},
      {"nullity dichotomy", [&] { return dichotomy(tool, work); }},
      {"positive definite at k=i", positivity},
      {"galerkin orthogonality and cea", galerkin},
      {"capacity monotonicity", capacity},
      {"fourier sobolev norm", fourier_norms},
      {"increasing neumann sequence", increasing_sequence},
      {"oracle equivalence", oracle_equivalence},
      {"determinism", [&] { return determinism(tool, work); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": "
              << outcome.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
