#include "nobs/exporter.hpp"

#include <cstdio>
#include <fstream>

#include "nobs/errors.hpp"

namespace nobs {

namespace {

void append(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

void export_trajectory_csv(const std::string& path, const Trajectory& traj, int component) {
  std::string s = "t";
  for (int i = 0; i < traj.grid.nx; ++i) {
    s += ",x";
    append(s, traj.grid.x(i));
  }
  s += "\n";
  for (std::size_t k = 0; k < traj.grid.n_levels(); ++k) {
    append(s, traj.grid.t(static_cast<int>(k)));
    for (int i = 0; i < traj.grid.nx; ++i) {
      s += ",";
      append(s, traj.at(component, static_cast<int>(k), i));
    }
    s += "\n";
  }
  export_text(path, s);
}

void export_series_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<double>& values, const std::string& value_name) {
  if (t.size() != values.size()) throw ShapeMismatch("series columns differ in length");
  std::string s = "t," + value_name + "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    append(s, t[i]);
    s += ",";
    append(s, values[i]);
    s += "\n";
  }
  export_text(path, s);
}

void export_multi_series_csv(
    const std::string& path, const std::vector<double>& t,
    const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  std::string s = "t";
  for (const auto& [name, values] : columns) {
    if (values.size() != t.size()) throw ShapeMismatch("series columns differ in length");
    s += "," + name;
  }
  s += "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    append(s, t[i]);
    for (const auto& col : columns) {
      s += ",";
      append(s, col.second[i]);
    }
    s += "\n";
  }
  export_text(path, s);
}

void export_report(const BenchReport& report, const std::string& format,
                   const std::string& path) {
  if (format == "json")
    export_text(path, bench_report_json(report) + "\n");
  else if (format == "csv")
    export_text(path, bench_report_csv(report));
  else
    throw Error("unknown report format: " + format);
}

void export_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace nobs
