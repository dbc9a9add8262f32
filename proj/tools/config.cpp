#include "config.hpp"

#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "fbem/errors.hpp"

namespace fbem::cli {

namespace {

using nlohmann::json;

void check_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ConfigError("cannot parse number '" + s + "'");
  return v;
}

}  // namespace

Wavenumber ExperimentConfig::wavenumber() const {
  if (!(k_im > 0.0) || !(k_re >= 0.0)) {
    throw ConfigError("wavenumber must have im > 0 and re >= 0");
  }
  return Wavenumber(Complex(k_re, k_im));
}

BoundaryData ExperimentConfig::boundary_data() const {
  try {
    const std::string type = data.at("type").get<std::string>();
    if (type == "const") {
      if (data.contains("im")) return BoundaryData::constant(Complex(data.at("value").get<double>(), data.at("im").get<double>()));
      return BoundaryData::constant(data.at("value").get<double>());
    }
    if (type == "planewave") {
      return BoundaryData::plane_wave({data.at("d").at(0).get<double>(), data.at("d").at(1).get<double>()});
    }
    if (type == "poly") {
      std::vector<BoundaryData::Monomial> terms;
      for (const auto& t : data.at("terms")) {
        terms.push_back({t.at("c").get<double>(), t.value("px", 0), t.value("py", 0)});
      }
      return BoundaryData::polynomial(std::move(terms));
    }
    throw ConfigError("unknown data type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed data block: ") + e.what());
  }
}

Family ExperimentConfig::family_enum() const {
  if (unit_square()) return Family::Custom;
  return family_from_string(family);
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> commands = {"generate", "solve-sequence", "capacity", "predict", "norms"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  const Family f = family_enum();
  if (f == Family::Custom && !unit_square()) throw ConfigError("family 'custom' cannot be generated");
  if (f == Family::CantorDust && !(alpha > 0.0 && alpha < 0.5)) {
    throw ConfigError("alpha must lie in (0, 1/2) for cantor_dust");
  }
  if (level < 0) throw ConfigError("level must be nonnegative");
  if (levels < 1) throw ConfigError("levels must be at least 1");
  if (refine < 0 || refine > 12) throw ConfigError("refine must lie in [0, 12]");
  if (bc != "dirichlet" && bc != "neumann") throw ConfigError("bc must be 'dirichlet' or 'neumann'");
  wavenumber();
  boundary_data();
  if (quadrature.far_order < 1 || quadrature.near_order < 1 || quadrature.singular_points < 2 ||
      quadrature.singular_points > 30 || !(quadrature.admissibility > 0.0)) {
    throw ConfigError("invalid quadrature orders");
  }
  try {
    hs.validate();
    for (double order : hs_orders) HsNormSpec{order, hs.radius, hs.radial_nodes, hs.angular_nodes}.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (command == "solve-sequence") {
    if (levels < 2) throw ConfigError("solve-sequence needs levels >= 2");
    if (bc == "dirichlet" && f != Family::CantorDust) throw ConfigError("dirichlet sequences use cantor_dust");
    if (bc == "neumann" && f != Family::SierpinskiComplement) {
      throw ConfigError("neumann sequences use sierpinski_complement");
    }
  }
  if (command == "capacity") {
    if (k_re != 0.0 || k_im != 1.0) throw ConfigError("capacity requires k = i");
    if (bc != "dirichlet") throw ConfigError("capacity requires bc = dirichlet");
    if (f == Family::SierpinskiComplement && level < 1) throw ConfigError("complement screens start at level 1");
  }
  if (prefix.empty() || prefix.find('/') != std::string::npos) throw ConfigError("invalid output prefix");
}

json ExperimentConfig::to_json() const {
  json doc = {{"command", command},
              {"family", family},
              {"alpha", alpha},
              {"level", level},
              {"levels", levels},
              {"refine", refine},
              {"wavenumber", {{"re", k_re}, {"im", k_im}}},
              {"bc", bc},
              {"data", data},
              {"quadrature",
               {{"far_order", quadrature.far_order},
                {"near_order", quadrature.near_order},
                {"singular_points", quadrature.singular_points},
                {"admissibility", quadrature.admissibility}}},
              {"hs",
               {{"orders", hs_orders},
                {"radius", hs.radius},
                {"radial_nodes", hs.radial_nodes},
                {"angular_nodes", hs.angular_nodes}}},
              {"output", {{"dir", output_dir}, {"prefix", prefix}}},
              {"dof_cap", dof_cap},
              {"dump_matrix", dump_matrix}};
  if (s) doc["s"] = *s;
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc, {"command", "family", "alpha", "level", "levels", "refine", "wavenumber", "bc", "data",
                   "quadrature", "hs", "output", "dof_cap", "dump_matrix", "s"},
             "config");
  ExperimentConfig c;
  read(doc, "command", c.command);
  read(doc, "family", c.family);
  read(doc, "alpha", c.alpha);
  read(doc, "level", c.level);
  read(doc, "levels", c.levels);
  read(doc, "refine", c.refine);
  read(doc, "bc", c.bc);
  read(doc, "dof_cap", c.dof_cap);
  read(doc, "dump_matrix", c.dump_matrix);
  if (doc.contains("s")) {
    double s = 0.0;
    read(doc, "s", s);
    c.s = s;
  }
  if (doc.contains("wavenumber")) {
    const json& k = doc.at("wavenumber");
    check_keys(k, {"re", "im"}, "wavenumber");
    read(k, "re", c.k_re);
    read(k, "im", c.k_im);
  }
  if (doc.contains("data")) {
    c.data = doc.at("data");
    check_keys(c.data, {"type", "value", "im", "d", "terms"}, "data");
  }
  if (doc.contains("quadrature")) {
    const json& q = doc.at("quadrature");
    check_keys(q, {"far_order", "near_order", "singular_points", "admissibility"}, "quadrature");
    read(q, "far_order", c.quadrature.far_order);
    read(q, "near_order", c.quadrature.near_order);
    read(q, "singular_points", c.quadrature.singular_points);
    read(q, "admissibility", c.quadrature.admissibility);
  }
  if (doc.contains("hs")) {
    const json& h = doc.at("hs");
    check_keys(h, {"orders", "radius", "radial_nodes", "angular_nodes"}, "hs");
    read(h, "orders", c.hs_orders);
    read(h, "radius", c.hs.radius);
    read(h, "radial_nodes", c.hs.radial_nodes);
    read(h, "angular_nodes", c.hs.angular_nodes);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, {"dir", "prefix"}, "output");
    read(o, "dir", c.output_dir);
    read(o, "prefix", c.prefix);
  }
  return c;
}

json parse_data_flag(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "const") {
    return {{"type", "const"}, {"value", rest.empty() ? 1.0 : parse_double(rest)}};
  }
  if (kind == "planewave") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw ConfigError("planewave data needs 'planewave:<dx>,<dy>'");
    return {{"type", "planewave"},
            {"d", {parse_double(rest.substr(0, comma)), parse_double(rest.substr(comma + 1))}}};
  }
  if (kind == "poly") {
    static const std::regex term(R"(^([-+0-9.eE]+)(\*x\^(\d+))?(\*y\^(\d+))?$)");
    json terms = json::array();
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, '+')) {
      std::smatch m;
      if (!std::regex_match(item, m, term)) throw ConfigError("cannot parse polynomial term '" + item + "'");
      terms.push_back({{"c", parse_double(m[1])},
                       {"px", m[3].matched ? std::stoi(m[3]) : 0},
                       {"py", m[5].matched ? std::stoi(m[5]) : 0}});
    }
    if (terms.empty()) throw ConfigError("empty polynomial");
    return {{"type", "poly"}, {"terms", terms}};
  }
  throw ConfigError("unknown data kind '" + kind + "'");
}

}  // namespace fbem::cli
