#pragma once

#include <json.hpp>
#include <string>

#include "fbem/variational.hpp"

namespace fbem {

/// Columns j,dofs,energy_norm,diff_prev,capacity,c_h,C_h; undefined fields are empty.
std::string report_csv(const ConvergenceReport& report);

/// Full record including the trend diagnostics and verdict.
nlohmann::json report_json(const ConvergenceReport& report);

/// Fixed-format number used in all CSV output.
std::string format_number(double value);

}  // namespace fbem
