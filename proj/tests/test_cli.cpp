#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "fbem/errors.hpp"

using namespace fbem;
using namespace fbem::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fbem");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fbem_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const json doc = json::parse(R"({"command": "generate", "family": "sierpinski_gasket", "level": 2,
                                     "wavenumber": {"re": 1.0, "im": 0.5},
                                     "quadrature": {"far_order": 5},
                                     "output": {"prefix": "g"}})");
    const ExperimentConfig c = config_from_json(doc);
    CHECK(c.family == "sierpinski_gasket");
    CHECK(c.level == 2);
    CHECK(c.wavenumber().value() == Complex(1.0, 0.5));
    CHECK(c.quadrature.far_order == 5);
    CHECK(c.quadrature.near_order == QuadratureOptions{}.near_order);
    CHECK(c.prefix == "g");
    CHECK_NOTHROW(c.validate());

    // round trip through to_json
    const ExperimentConfig back = config_from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"colour": 1})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"quadrature": {"order": 1}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"level": "two"})")), ConfigError);
  }

  TEST_CASE("data flag syntax") {
    CHECK(parse_data_flag("const:2.5") == json{{"type", "const"}, {"value", 2.5}});
    CHECK(parse_data_flag("planewave:0.6,0.8")["d"] == json{0.6, 0.8});
    const json poly = parse_data_flag("poly:2*x^1*y^3+0.5");
    REQUIRE(poly["terms"].size() == 2);
    CHECK(poly["terms"][0] == json{{"c", 2.0}, {"px", 1}, {"py", 3}});
    CHECK(poly["terms"][1] == json{{"c", 0.5}, {"px", 0}, {"py", 0}});
    CHECK_THROWS_AS(parse_data_flag("wave:1"), ConfigError);
    CHECK_THROWS_AS(parse_data_flag("const:abc"), ConfigError);
    CHECK_THROWS_AS(parse_data_flag("poly:x^^2"), ConfigError);
  }

  TEST_CASE("validation rules") {
    ExperimentConfig c;
    c.command = "solve-sequence";
    CHECK_NOTHROW(c.validate());
    c.alpha = 0.6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.alpha = 0.2;
    c.k_im = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.k_im = 1.0;
    c.bc = "neumann";
    CHECK_THROWS_AS(c.validate(), ConfigError);  // neumann sequences need the complement family
    c.family = "sierpinski_complement";
    CHECK_NOTHROW(c.validate());
    c.command = "capacity";
    c.bc = "dirichlet";
    c.k_re = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    const Run bad = invoke({"solve-sequence", "--alpha", "0.6"});
    CHECK(bad.code == kConfigError);
    CHECK(json::parse(bad.err)["error"] == "ConfigError");
    CHECK(invoke({"frobnicate"}).code == kConfigError);
    CHECK(invoke({"predict", "--level", "x"}).code == kConfigError);
  }

  TEST_CASE("generate") {
    const fs::path dir = scratch("generate");
    Run r = invoke({"generate", "--alpha", "0.3333333333333333", "--level", "2", "--output-dir", dir.string(),
                    "--prefix", "dust"});
    REQUIRE(r.code == kOk);
    CHECK(json::parse(r.out)["panels"] == 16);
    const json panels = json::parse(slurp(dir / "dust_panels.json"));
    CHECK(panels.dump().find("\"square\"") != std::string::npos);
    CHECK(fs::exists(dir / "dust_mesh.json"));

    r = invoke({"generate", "--family", "sierpinski_gasket", "--level", "3", "--refine", "1", "--output-dir",
                dir.string()});
    REQUIRE(r.code == kOk);
    const json summary = json::parse(r.out);
    CHECK(summary["panels"] == 27);
    CHECK(summary["elements"] == 108);
  }

  TEST_CASE("predict") {
    Run r = invoke({"predict", "--alpha", "0.25"});
    REQUIRE(r.code == kOk);
    json doc = json::parse(r.out);
    CHECK(doc["hausdorff_dim"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(doc["prediction"] == "Indeterminate");

    r = invoke({"predict", "--family", "sierpinski_gasket", "--s", "-0.5"});
    REQUIRE(r.code == kOk);
    doc = json::parse(r.out);
    CHECK(doc["hausdorff_dim"].get<double>() == doctest::Approx(std::log(3.0) / std::log(2.0)));
    CHECK(doc.contains("prediction_at_s"));

    CHECK(invoke({"predict", "--family", "unit_square"}).code == kConfigError);
  }

  TEST_CASE("output directory from the environment") {
    const fs::path dir = scratch("env");
    ::setenv("FBEM_OUTPUT_DIR", dir.string().c_str(), 1);
    const Run r = invoke({"generate", "--family", "unit_square", "--prefix", "sq", "--output-dir", "/nonexistent"});
    ::unsetenv("FBEM_OUTPUT_DIR");
    REQUIRE(r.code == kOk);
    CHECK(fs::exists(dir / "sq_mesh.json"));
  }

  TEST_CASE("norms and capacity commands") {
    const fs::path dir = scratch("norms");
    Run r = invoke({"norms", "--family", "unit_square", "--refine", "1", "--orders", "0", "--output-dir",
                    dir.string()});
    REQUIRE(r.code == kOk);
    json doc = json::parse(r.out);
    CHECK(doc["dofs"] == 8);
    CHECK(doc["C_h"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["hs_norms"].size() == 1);

    r = invoke({"capacity", "--family", "unit_square", "--refine", "2", "--output-dir", dir.string()});
    REQUIRE(r.code == kOk);
    doc = json::parse(r.out);
    CHECK(doc["capacity"].size() == 3);
    CHECK(doc["nondecreasing_in_refine"] == true);
    CHECK(fs::exists(dir / "fbem_capacity.csv"));
  }

  TEST_CASE("solve-sequence is reproducible") {
    const fs::path a = scratch("seq_a"), b = scratch("seq_b");
    const std::vector<std::string> common{"solve-sequence", "--alpha", "0.2", "--levels", "3"};
    auto with_dir = [&](const fs::path& dir) {
      auto args = common;
      args.insert(args.end(), {"--output-dir", dir.string()});
      return invoke(args);
    };
    const Run first = with_dir(a), second = with_dir(b);
    CHECK((first.code == kOk || first.code == kInconclusive));
    CHECK(first.code == second.code);
    const std::string csv = slurp(a / "fbem.csv");
    CHECK(csv.rfind("j,dofs,energy_norm,diff_prev,capacity,c_h,C_h\n", 0) == 0);
    CHECK(csv == slurp(b / "fbem.csv"));
    CHECK(fs::exists(a / "fbem.meta.json"));
  }

  TEST_CASE("installed executable") {
    const char* tool = std::getenv("FBEM_TOOL");
    if (!tool) return;
    const std::string cmd = std::string(tool) + " predict --alpha 0.7 > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == kConfigError);
    CHECK(WEXITSTATUS(std::system((std::string(tool) + " --version > /dev/null").c_str())) == 0);
  }
}
