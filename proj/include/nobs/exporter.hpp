#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nobs/bench.hpp"
#include "nobs/grid.hpp"

namespace nobs {

// x along columns, one row per time level, one file per component when the
// trajectory has several.
void export_trajectory_csv(const std::string& path, const Trajectory& traj,
                           int component = 0);
// Two columns: t, value.
void export_series_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<double>& values,
                       const std::string& value_name = "value");
// One t column plus one named column per series; the error-evolution plot
// format. All series must match the length of t.
void export_multi_series_csv(
    const std::string& path, const std::vector<double>& t,
    const std::vector<std::pair<std::string, std::vector<double>>>& columns);
// format is "json" or "csv". A report with no methods still writes a valid
// document (CSV keeps its header row).
void export_report(const BenchReport& report, const std::string& format,
                   const std::string& path);
void export_text(const std::string& path, const std::string& content);

}  // namespace nobs
