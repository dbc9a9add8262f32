#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "fbem/errors.hpp"
#include "fbem/report.hpp"
#include "fbem/serialization.hpp"
#include "fbem/variational.hpp"

namespace fbem::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path output_dir(const ExperimentConfig& config) {
  const char* env = std::getenv("FBEM_OUTPUT_DIR");
  fs::path dir = env && *env ? fs::path(env) : fs::path(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Timestamps live in a sidecar so the report files stay byte-reproducible.
void write_sidecar(const fs::path& dir, const ExperimentConfig& config) {
  const json meta = {{"timestamp", utc_timestamp()}, {"version", FBEM_VERSION}, {"command", config.command}};
  write_file(dir / (config.prefix + ".meta.json"), meta.dump(2) + "\n");
}

json envelope(const ExperimentConfig& config) {
  return {{"version", FBEM_VERSION}, {"config", config.to_json()}};
}

}  // namespace

PanelSet make_screen(const ExperimentConfig& config, int level) {
  if (config.unit_square()) return make_panel_set({Square{{0.0, 0.0}, 1.0}});
  switch (config.family_enum()) {
    case Family::CantorDust: return cantor_dust_prefractal(config.alpha, level);
    case Family::SierpinskiGasket: return sierpinski_prefractal(level);
    case Family::SierpinskiComplement: return sierpinski_complement_screen(level);
    case Family::Custom: break;
  }
  throw ConfigError("family cannot be generated");
}

int cmd_generate(const ExperimentConfig& config, std::ostream& out) {
  const PanelSet screen = make_screen(config, config.level);
  const Mesh mesh = mesh_panels(screen, config.refine, config.dof_cap);
  const fs::path dir = output_dir(config);
  const fs::path panels_path = dir / (config.prefix + "_panels.json");
  const fs::path mesh_path = dir / (config.prefix + "_mesh.json");
  write_file(panels_path, panel_set_to_json(screen).dump() + "\n");
  write_file(mesh_path, mesh_to_json(mesh).dump() + "\n");
  json summary = envelope(config);
  summary["panels"] = screen.size();
  summary["area"] = screen.area();
  summary["elements"] = mesh.num_elements();
  summary["vertices"] = mesh.num_vertices();
  summary["h"] = mesh.h;
  summary["files"] = {panels_path.string(), mesh_path.string()};
  out << summary.dump(2) << "\n";
  return kOk;
}

int cmd_solve_sequence(const ExperimentConfig& config, std::ostream& out) {
  SequenceOptions options;
  options.levels = config.levels;
  options.refine = config.refine;
  options.k = config.wavenumber();
  options.data = config.boundary_data();
  options.quadrature = config.quadrature;
  options.element_cap = config.dof_cap;
  const ConvergenceReport report = config.bc == "dirichlet" ? solve_decreasing_sequence(config.alpha, options)
                                                            : solve_increasing_sequence(options);
  const fs::path dir = output_dir(config);
  json doc = envelope(config);
  doc["report"] = report_json(report);
  write_file(dir / (config.prefix + ".csv"), report_csv(report));
  write_file(dir / (config.prefix + ".json"), doc.dump(2) + "\n");
  write_sidecar(dir, config);
  out << doc["report"].dump(2) << "\n";
  return report.trend.verdict == Verdict::Inconclusive ? kInconclusive : kOk;
}

int cmd_capacity(const ExperimentConfig& config, std::ostream& out) {
  const int first = config.unit_square() ? 0 : (config.family_enum() == Family::SierpinskiComplement ? 1 : config.level);
  const int last = config.unit_square() ? 0 : std::max(first, config.levels);
  std::ostringstream csv;
  csv << "level,refine,dofs,capacity\n";
  json rows = json::array();
  bool monotone_refine = true, monotone_level = true;
  std::vector<double> finest;
  for (int j = first; j <= last; ++j) {
    const PanelSet screen = make_screen(config, j);
    if (screen.empty()) throw ConfigError("screen at level " + std::to_string(j) + " is empty");
    double previous = 0.0;
    for (int r = 0; r <= config.refine; ++r) {
      const std::size_t dofs = projected_element_count(screen, 1 << r);
      if (dofs > config.dof_cap) throw CapacityError("capacity run exceeds the dof cap");
      const double cap = capacity_estimate(screen, r, config.quadrature);
      if (r > 0 && cap < previous - 1e-10 * std::abs(previous)) monotone_refine = false;
      previous = cap;
      csv << j << ',' << r << ',' << dofs << ',' << format_number(cap) << '\n';
      rows.push_back({{"level", j}, {"refine", r}, {"dofs", dofs}, {"capacity", cap}});
    }
    finest.push_back(previous);
  }
  for (std::size_t i = 1; i < finest.size(); ++i) {
    if (finest[i] > finest[i - 1] * (1.0 + 1e-10)) monotone_level = false;
  }
  const fs::path dir = output_dir(config);
  json doc = envelope(config);
  doc["capacity"] = rows;
  doc["nondecreasing_in_refine"] = monotone_refine;
  doc["nonincreasing_in_level"] = monotone_level;
  write_file(dir / (config.prefix + "_capacity.csv"), csv.str());
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_predict(const ExperimentConfig& config, std::ostream& out) {
  if (config.unit_square()) throw ConfigError("predict needs a fractal family");
  PrefractalSpec spec{config.family_enum(), config.alpha, config.level};
  const DimensionReport rep = similarity_dimension(spec);
  json doc = {{"family", config.family},
              {"hausdorff_dim", rep.hausdorff_dim},
              {"threshold_s", rep.threshold_s},
              {"prediction", to_string(rep.prediction)},
              {"version", FBEM_VERSION}};
  if (spec.family == Family::CantorDust) doc["alpha"] = config.alpha;
  if (config.s) {
    try {
      doc["s"] = *config.s;
      doc["prediction_at_s"] = to_string(nullity_prediction(rep.hausdorff_dim, *config.s));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_norms(const ExperimentConfig& config, std::ostream& out) {
  const PanelSet screen = make_screen(config, config.level);
  auto mesh = std::make_shared<const Mesh>(mesh_panels(screen, config.refine, config.dof_cap));
  const SpaceKind kind = config.bc == "dirichlet" ? SpaceKind::P0Jump : SpaceKind::P1ZeroTrace;
  auto space = std::make_shared<const FunctionSpace>(build_space(mesh, kind));
  const GalerkinSystem system =
      assemble_system(space, config.wavenumber(), config.boundary_data(), config.quadrature);
  const Solution sol = solve(system);
  const fs::path dir = output_dir(config);
  json doc = envelope(config);
  doc["dofs"] = space->dof_count();
  doc["energy_norm"] = sol.energy_norm;
  doc["relative_residual"] = sol.relative_residual;
  doc["C_h"] = system.continuity_est;
  doc["c_h"] = system.coercivity_est;
  json norms = json::array();
  for (double order : config.hs_orders) {
    HsNormSpec spec = config.hs;
    spec.s = order;
    const HsNormResult r = hs_norm(*space, {sol.coefficients.data(), static_cast<std::size_t>(sol.coefficients.size())}, spec);
    json entry = {{"s", order},
                  {"value", std::isfinite(r.value) ? json(r.value) : json(nullptr)},
                  {"truncated_squared", r.truncated},
                  {"tail_squared", std::isfinite(r.tail) ? json(r.tail) : json(nullptr)},
                  {"warning", r.warning}};
    if (r.warning) std::cerr << r.message << " (s = " << order << ")\n";
    norms.push_back(entry);
  }
  doc["hs_norms"] = norms;
  if (config.dump_matrix) {
    write_matrix_dump((dir / (config.prefix + "_matrix.bin")).string(), system.matrix);
    write_file(dir / (config.prefix + "_matrix.json"), system_metadata(system).dump(2) + "\n");
  }
  write_file(dir / (config.prefix + "_norms.json"), doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kOk;
}

int run_command(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  if (config.command == "generate") return cmd_generate(config, out);
  if (config.command == "solve-sequence") return cmd_solve_sequence(config, out);
  if (config.command == "capacity") return cmd_capacity(config, out);
  if (config.command == "predict") return cmd_predict(config, out);
  return cmd_norms(config, out);
}

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> family, bc, data, output_dir, prefix;
  std::optional<double> alpha, k_re, k_im, s, radius;
  std::optional<int> level, levels, refine, far_order, near_order, singular_points;
  std::optional<std::size_t> dof_cap;
  std::vector<double> orders;
  bool dump_matrix = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--family", family, "cantor_dust | sierpinski_gasket | sierpinski_complement | unit_square");
    app->add_option("--alpha", alpha, "Cantor dust ratio in (0, 1/2)");
    app->add_option("--level", level, "prefractal level");
    app->add_option("--levels", levels, "number of levels in a sequence");
    app->add_option("--refine", refine, "uniform refinements per panel");
    app->add_option("--k-re", k_re, "real part of the wavenumber");
    app->add_option("--k-im", k_im, "imaginary part of the wavenumber");
    app->add_option("--bc", bc, "dirichlet | neumann");
    app->add_option("--data", data, "const:<c> | planewave:<dx>,<dy> | poly:<c>*x^<a>*y^<b>+...");
    app->add_option("--far-order", far_order, "quadrature degree for separated pairs");
    app->add_option("--near-order", near_order, "quadrature degree for nearby pairs");
    app->add_option("--singular-points", singular_points, "points per axis of the singular rules");
    app->add_option("--s", s, "Sobolev order for predict");
    app->add_option("--orders", orders, "Sobolev orders for norms")->delimiter(',');
    app->add_option("--radius", radius, "frequency truncation radius for norms");
    app->add_option("--output-dir", output_dir, "output directory");
    app->add_option("--prefix", prefix, "output file prefix");
    app->add_option("--dof-cap", dof_cap, "maximum number of elements");
    app->add_flag("--dump-matrix", dump_matrix, "write the Galerkin matrix (norms)");
  }

  void apply(ExperimentConfig& c) const {
    if (family) c.family = *family;
    if (alpha) c.alpha = *alpha;
    if (level) c.level = *level;
    if (levels) c.levels = *levels;
    if (refine) c.refine = *refine;
    if (k_re) c.k_re = *k_re;
    if (k_im) c.k_im = *k_im;
    if (bc) c.bc = *bc;
    if (data) c.data = parse_data_flag(*data);
    if (far_order) c.quadrature.far_order = *far_order;
    if (near_order) c.quadrature.near_order = *near_order;
    if (singular_points) c.quadrature.singular_points = *singular_points;
    if (s) c.s = *s;
    if (!orders.empty()) c.hs_orders = orders;
    if (radius) c.hs.radius = *radius;
    if (output_dir) c.output_dir = *output_dir;
    if (prefix) c.prefix = *prefix;
    if (dof_cap) c.dof_cap = *dof_cap;
    if (dump_matrix) c.dump_matrix = true;
  }
};

int report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Galerkin BEM solver for Helmholtz scattering by prefractal screens", "fbem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FBEM_VERSION));
  Overrides overrides;
  const char* names[][2] = {{"generate", "write panel and mesh JSON"},
                            {"solve-sequence", "solve a nested screen sequence and report convergence"},
                            {"capacity", "capacity per level with a refinement sweep"},
                            {"predict", "similarity dimension and nullity prediction"},
                            {"norms", "energy and Fourier Sobolev norms of a solution"}};
  for (const auto& [name, help] : names) overrides.attach(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    return report_error(err, "ConfigError", e.what(), kConfigError);
  }

  try {
    ExperimentConfig config;
    if (!overrides.config_path.empty()) {
      std::ifstream in(overrides.config_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON in config: ") + e.what());
      }
      config = config_from_json(doc);
    }
    overrides.apply(config);
    config.command = app.get_subcommands().front()->get_name();
    return run_command(config, out);
  } catch (const ConfigError& e) {
    return report_error(err, e.kind(), e.what(), kConfigError);
  } catch (const DomainError& e) {
    return report_error(err, e.kind(), e.what(), kConfigError);
  } catch (const CapacityError& e) {
    return report_error(err, e.kind(), e.what(), kConfigError);
  } catch (const EmptySpaceError& e) {
    return report_error(err, e.kind(), e.what(), kConfigError);
  } catch (const Error& e) {
    return report_error(err, e.kind(), e.what(), kNumericFailure);
  } catch (const std::exception& e) {
    return report_error(err, "RuntimeError", e.what(), kNumericFailure);
  }
}

}  // namespace fbem::cli
