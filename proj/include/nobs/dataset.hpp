#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nobs/grid.hpp"
#include "nobs/ic_sampler.hpp"
#include "nobs/observers.hpp"

namespace nobs {

enum class SystemKind { ReactionDiffusion, PrescribedTime, Traffic };

// One supervised pair: the observer's initial state and the measurement
// record as inputs, the conventional observer's estimate trajectory as the
// target.
struct DatasetRecord {
  std::vector<std::vector<double>> ic_hat;  // 1 or 2 spatial arrays
  MeasurementSeries measurements;
  Trajectory target;
  std::map<std::string, double> meta;
};

struct ChannelStats {
  double mean = 0.0;
  double stddev = 1.0;
};

// Grouped per-channel standardization statistics. ic_hat and target are per
// state component; measurement is per measurement channel.
struct Normalization {
  std::vector<ChannelStats> ic_hat;
  std::vector<ChannelStats> measurement;
  std::vector<ChannelStats> target;
};

struct Dataset {
  SystemKind system = SystemKind::ReactionDiffusion;
  Grid grid;
  std::vector<DatasetRecord> records;
  // Standardization statistics, computed on the training split only.
  Normalization normalization;
};

struct GenerateConfig {
  SystemKind system = SystemKind::ReactionDiffusion;
  int n = 1;
  std::uint64_t seed = 0;
  IcSpec ic;
  ReactionDiffusionParams rd_params;
  PrescribedTimeGain pt_gain{0.6, 1.0, 8, 0.594};
  ArzParams arz_params;
  InjectionConfig arz_injection;
  RdScheme rd_scheme = RdScheme::ImplicitEuler;
};

// Simulates the plant, extracts measurements, runs the backstepping observer
// (ic_hat = 0 for the scalar systems, reference state for traffic), and
// stores the observer trajectory as the target. Deterministic given seed.
Dataset generate_dataset(const GenerateConfig& cfg, const Grid& grid);

// Computes mean/std for every initial-estimate component, measurement
// channel and target component over all records of ds. Channels with stddev
// below 1e-12 store stddev 1 so standardization stays finite (the zero
// initial-estimate channel is legitimately constant).
void compute_normalization(Dataset& ds);

// Bit-exact binary container. Little-endian: 8-byte magic "NOBSDS01",
// u32 header length, UTF-8 JSON header, then raw f64 payloads in
// header-declared order.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

// Small named-array dumps (sampled gain profiles and similar regression
// snapshots) in the same container envelope. A dataset file is not an
// arrays file and vice versa; the wrong reader raises HeaderMismatch.
void write_arrays(const std::string& path,
                  const std::map<std::string, std::vector<double>>& arrays);
std::map<std::string, std::vector<double>> read_arrays(const std::string& path);

}  // namespace nobs
