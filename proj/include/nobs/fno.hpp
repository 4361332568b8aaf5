#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nobs/dataset.hpp"
#include "nobs/tensor.hpp"

namespace nobs {

struct FnoConfig {
  int n_layers = 4;
  int width = 64;
  int modes_x = 16;
  int modes_t = 16;  // feedforward (space-time) variant only
  int in_channels = 0;
  int out_channels = 1;
};

enum class FnoKind { Feedforward, Recurrent };

// Named parameter tensors in fixed registration order; the order is the
// checkpoint layout and the Adam slot order, so it must never be reshuffled.
struct FnoParams {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;

  int add(const std::string& name, Tensor t);
  long total_storage() const;
};

// Kept spectral rows after flattening (t, x) bins to one mode axis:
// x one-sided bins below modes_x, paired with the modes_t lowest positive
// and negative t frequencies (the two corner blocks).
std::vector<long> feedforward_mode_set(const FnoConfig& cfg, long t_len, long x_len);
// Recurrent model keeps the lowest one-sided x bins; prefix set.
long recurrent_modes_kept(const FnoConfig& cfg, long x_len);

FnoParams init_feedforward_params(const FnoConfig& cfg, long t_len, long x_len,
                                  std::uint64_t seed);
FnoParams init_recurrent_params(const FnoConfig& cfg, long x_len, std::uint64_t seed);

// Graph builders. `param_ids` are tape leaf ids in registration order;
// input layouts are [B, T, X, Cin] and [B, X, Cin]. Output keeps the leading
// axes with Cout channels.
int feedforward_apply(Tape& tape, const FnoConfig& cfg, const std::vector<int>& param_ids,
                      int input, long t_len, long x_len);
int recurrent_apply(Tape& tape, const FnoConfig& cfg, const std::vector<int>& param_ids,
                    int input, long x_len);

struct FnoModel {
  FnoKind kind = FnoKind::Feedforward;
  FnoConfig cfg;
  SystemKind system = SystemKind::ReactionDiffusion;
  long t_len = 0;  // time levels the feedforward net was built for (nt+1)
  long x_len = 0;
  int state_components = 1;
  int measurement_channels = 1;
  FnoParams params;
  Normalization norm;
};

FnoModel make_feedforward_model(const Dataset& train, const FnoConfig& cfg,
                                std::uint64_t seed);
FnoModel make_recurrent_model(const Dataset& train, const FnoConfig& cfg,
                              std::uint64_t seed);

// Input assembly, normalized with the model's training statistics.
// Feedforward channels: initial estimate components broadcast along time,
// measurement channels broadcast along space, then x and t coordinates.
Tensor feedforward_input(const FnoModel& m, const DatasetRecord& rec, const Grid& grid);
// Recurrent channels at one step: previous estimate components, measurement
// channels at the step's base level broadcast along space, x coordinate.
Tensor recurrent_input(const FnoModel& m, const std::vector<std::vector<double>>& prev,
                       const MeasurementSeries& ms, int level);

// Full-trajectory inference. Level 0 of the result is the record's initial
// estimate verbatim; the recurrent variant rolls its own predictions forward.
Trajectory feedforward_predict(const FnoModel& m, const DatasetRecord& rec,
                               const Grid& grid);
Trajectory recurrent_predict(const FnoModel& m, const DatasetRecord& rec,
                             const Grid& grid);

}  // namespace nobs
