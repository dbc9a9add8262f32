#include "fbem/serialization.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fbem/errors.hpp"

namespace fbem {

namespace {

constexpr char kMagic[8] = {'F', 'B', 'E', 'M', 'M', 'A', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "matrix dumps assume a little-endian host");

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

nlohmann::json panel_set_to_json(const PanelSet& set) {
  nlohmann::json panels = nlohmann::json::array();
  for (const auto& panel : set.panels) {
    std::visit(Overloaded{
                   [&](const Square& s) {
                     panels.push_back({{"type", "square"}, {"x", s.corner.x}, {"y", s.corner.y}, {"side", s.side}});
                   },
                   [&](const Triangle& t) {
                     nlohmann::json v = nlohmann::json::array();
                     for (const auto& p : t.vertices) v.push_back({p.x, p.y});
                     panels.push_back({{"type", "triangle"}, {"v", v}});
                   },
               },
               panel);
  }
  nlohmann::json doc = {{"family", to_string(set.family)},
                        {"level", set.level},
                        {"panels", panels},
                        {"open", set.openness == Openness::OpenScreen}};
  if (set.family == Family::CantorDust) doc["alpha"] = set.alpha;
  return doc;
}

PanelSet panel_set_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Panel> panels;
    for (const auto& p : doc.at("panels")) {
      const std::string type = p.at("type").get<std::string>();
      if (type == "square") {
        panels.emplace_back(Square{{p.at("x").get<double>(), p.at("y").get<double>()}, p.at("side").get<double>()});
      } else if (type == "triangle") {
        Triangle t;
        for (int i = 0; i < 3; ++i) t.vertices[i] = {p.at("v").at(i).at(0).get<double>(), p.at("v").at(i).at(1).get<double>()};
        panels.emplace_back(t);
      } else {
        throw ConfigError("unknown panel type '" + type + "'");
      }
    }
    PanelSet set = make_panel_set(std::move(panels),
                                  doc.at("open").get<bool>() ? Openness::OpenScreen : Openness::ClosedSet);
    set.family = family_from_string(doc.at("family").get<std::string>());
    set.level = doc.at("level").get<int>();
    set.alpha = doc.value("alpha", 0.0);
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed panel set: ") + e.what());
  }
}

nlohmann::json mesh_to_json(const Mesh& mesh) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : mesh.vertices) vertices.push_back({v.x, v.y});
  nlohmann::json triangles = nlohmann::json::array();
  for (const auto& t : mesh.elements) triangles.push_back({t[0], t[1], t[2]});
  return {{"vertices", vertices}, {"triangles", triangles}};
}

void write_matrix_dump(const std::string& path, const ComplexMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const std::uint64_t rows = matrix.rows(), cols = matrix.cols();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (long i = 0; i < matrix.rows(); ++i) {
    for (long j = 0; j < matrix.cols(); ++j) {
      const double pair[2] = {matrix(i, j).real(), matrix(i, j).imag()};
      out.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

ComplexMatrix read_matrix_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  char magic[8];
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ConfigError("'" + path + "' is not a matrix dump");
  ComplexMatrix m(static_cast<long>(rows), static_cast<long>(cols));
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      double pair[2];
      in.read(reinterpret_cast<char*>(pair), sizeof pair);
      m(i, j) = Complex(pair[0], pair[1]);
    }
  }
  if (!in) throw ConfigError("'" + path + "' is truncated");
  return m;
}

nlohmann::json system_metadata(const GalerkinSystem& system) {
  return {{"rows", system.matrix.rows()},
          {"cols", system.matrix.cols()},
          {"layout", "row-major complex128 after a 24-byte header"},
          {"space", to_string(system.space->kind())},
          {"elements", system.space->mesh().num_elements()},
          {"wavenumber", {system.k.value().real(), system.k.value().imag()}},
          {"quadrature",
           {{"far_order", system.quadrature.far_order},
            {"near_order", system.quadrature.near_order},
            {"singular_points", system.quadrature.singular_points},
            {"admissibility", system.quadrature.admissibility}}},
          {"C_h", system.continuity_est},
          {"c_h", system.coercivity_est},
          {"version", FBEM_VERSION}};
}

}  // namespace fbem
