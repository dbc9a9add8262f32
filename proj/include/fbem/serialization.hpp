#pragma once

#include <json.hpp>
#include <string>

#include "fbem/assembly.hpp"
#include "fbem/geometry.hpp"
#include "fbem/mesh.hpp"

namespace fbem {

nlohmann::json panel_set_to_json(const PanelSet& set);
PanelSet panel_set_from_json(const nlohmann::json& doc);

nlohmann::json mesh_to_json(const Mesh& mesh);

/// Binary layout: 8-byte magic "FBEMMAT1", uint64 rows, uint64 cols, then rows * cols
/// (re, im) pairs of little-endian doubles in row-major order.
void write_matrix_dump(const std::string& path, const ComplexMatrix& matrix);
ComplexMatrix read_matrix_dump(const std::string& path);

/// Metadata written next to a matrix dump.
nlohmann::json system_metadata(const GalerkinSystem& system);

}  // namespace fbem
