#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mpnet/tshc.hpp"

namespace mpnet {

/// Subset key in km/h (negative for an unscheduled run) plus its report.
using SubsetReport = std::pair<double, TrainReport>;

inline constexpr double kAllTasksKey = -1.0;

void write_records_csv(std::ostream& out, const std::vector<SubsetReport>& reports);
void write_summary_csv(std::ostream& out, const std::vector<SubsetReport>& reports);

/// Rebuilds reports from the two CSV files. Throws std::runtime_error on corrupt input.
std::vector<SubsetReport> read_reports(std::istream& records_csv, std::istream& summary_csv);

/// Table with columns N_tasks, N_tasks*, P*, N_param, T_learn, N_rest*, dP*_1st.
std::string render_markdown(const std::vector<SubsetReport>& reports);

void write_trajectory_csv(std::ostream& out, const RolloutResult& result);

}  // namespace mpnet
