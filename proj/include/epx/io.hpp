#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "epx/analysis.hpp"
#include "epx/propagator.hpp"

namespace epx {

/// 17 significant digits, '.' decimal point, independent of the locale.
std::string format_real(double x);

/// Header t,re_c1,im_c1,re_c2,im_c2,norm_sq,log_scale,W1,W2 and one LF-ended
/// row per sample.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj);
nlohmann::ordered_json trajectory_to_json(const TrajectoryRecord& traj);

nlohmann::ordered_json report_to_json(const AsymmetryReport& r);
std::string summary_line(const AsymmetryReport& r);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepCell& cell);
nlohmann::ordered_json sweep_cell_to_json(const SweepCell& cell);
nlohmann::ordered_json sweep_to_json(const SweepSpec& spec, const SweepResult& result);

std::string render_table1(const Table1& table);
nlohmann::ordered_json table1_to_json(const Table1& table);
/// Inverse of table1_to_json for the fields it writes.
Table1 table1_from_json(const nlohmann::json& j);

}  // namespace epx
