#include "fbem/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fbem {

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", value);
  return buf;
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "j,dofs,energy_norm,diff_prev,capacity,c_h,C_h\n";
  for (const auto& r : report.levels) {
    out << r.level << ',' << r.dofs << ',' << format_number(r.energy_norm) << ','
        << (r.diff_prev ? format_number(*r.diff_prev) : "") << ','
        << (r.capacity ? format_number(*r.capacity) : "") << ',' << format_number(r.c_h) << ','
        << format_number(r.C_h) << '\n';
  }
  return out.str();
}

nlohmann::json report_json(const ConvergenceReport& report) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& r : report.levels) {
    levels.push_back({{"j", r.level},
                      {"dofs", r.dofs},
                      {"energy_norm", r.energy_norm},
                      {"diff_prev", optional_json(r.diff_prev)},
                      {"capacity", optional_json(r.capacity)},
                      {"mean_functional", r.functional},
                      {"lax_milgram_bound", number_or_null(r.bound)},
                      {"c_h", r.c_h},
                      {"C_h", r.C_h}});
  }
  nlohmann::json ratios = nlohmann::json::array();
  for (double v : report.trend.ratios) ratios.push_back(number_or_null(v));
  nlohmann::json doc = {
      {"family", to_string(report.family)},
      {"problem", to_string(report.tag)},
      {"refine", report.refine},
      {"levels", levels},
      {"diff_method", report.diff_method},
      {"trend",
       {{"monitored", report.monitored},
        {"ratios", ratios},
        {"fitted_ratio", number_or_null(report.trend.fitted_ratio)},
        {"spread_last_three", number_or_null(report.trend.spread)},
        {"tail_estimate", number_or_null(report.trend.tail)},
        {"extrapolated_limit", number_or_null(report.trend.extrapolated_limit)},
        {"verdict", to_string(report.trend.verdict)}}}};
  if (report.family == Family::CantorDust) doc["alpha"] = report.alpha;
  if (report.diff_method == "scalar-functional") {
    doc["note"] = "alpha is not the reciprocal of an integer; diff_prev compares the scalar functionals <1, phi_j> only";
  }
  if (report.gap_to_base) {
    doc["gap_to_base"] = *report.gap_to_base;
    doc["base_dofs"] = optional_json(report.base_dofs);
  }
  return doc;
}

}  // namespace fbem
