#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fbem/assembly.hpp"
#include "fbem/geometry.hpp"
#include "fbem/sobolev.hpp"

namespace fbem::cli {

/// Everything an experiment needs. Loaded from JSON, then overridden by flags.
struct ExperimentConfig {
  std::string command;
  std::string family = "cantor_dust";  // also "unit_square"
  double alpha = 1.0 / 3.0;
  int level = 1;
  int levels = 4;
  int refine = 0;
  double k_re = 0.0;
  double k_im = 1.0;
  std::string bc = "dirichlet";
  nlohmann::json data = {{"type", "const"}, {"value", 1.0}};
  QuadratureOptions quadrature;
  HsNormSpec hs;
  std::vector<double> hs_orders = {-0.5, 0.0, 0.5};
  std::optional<double> s;  // predict: extra nullity query
  std::string output_dir = ".";
  std::string prefix = "fbem";
  std::size_t dof_cap = kDefaultElementCap;
  bool dump_matrix = false;

  Wavenumber wavenumber() const;
  BoundaryData boundary_data() const;
  Family family_enum() const;
  bool unit_square() const { return family == "unit_square"; }

  /// Checks ranges and cross-field rules; throws ConfigError or DomainError.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Reads a config document, rejecting unknown keys.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Parses the compact data syntax used on the command line:
/// "const:<c>", "planewave:<dx>,<dy>", "poly:<c>*x^<a>*y^<b>+...".
nlohmann::json parse_data_flag(const std::string& text);

}  // namespace fbem::cli
