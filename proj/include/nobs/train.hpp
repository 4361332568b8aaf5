#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nobs/adam.hpp"
#include "nobs/dataset.hpp"
#include "nobs/fno.hpp"

namespace nobs {

struct TrainConfig {
  int epochs = 500;
  int batch = 20;
  AdamConfig adam;          // lr 1e-3
  int lr_halve_every = 100;  // epochs between halvings; 0 disables
  std::uint64_t seed = 0;    // epoch shuffling
  int log_every = 25;        // 0 silences progress lines
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean training loss per epoch
  double wall_seconds = 0.0;
};

// Ask the allocator to keep freed large buffers on the process heap instead
// of returning pages to the kernel. Training steps allocate and free the
// same multi-MB tensors thousands of times; under the default glibc policy
// roughly half the wall clock goes to mmap/munmap and refaulting. Called by
// the trainers; idempotent, a no-op on non-glibc platforms.
void retain_freed_buffers();

// Loss is the batch mean of per-record relative L2 against the stored
// targets, in normalized space. Deterministic for a fixed (model seed,
// train seed, dataset): shuffling uses the counter RNG, batches run in
// order, and every reduction has a fixed sequential order.
TrainResult train_feedforward(FnoModel& m, const Dataset& train, const TrainConfig& cfg,
                              const std::function<void(int, double)>& on_epoch = {});

// Teacher-forced one-step training: inputs are target levels k with the
// level-k measurement, labels are target levels k+1.
TrainResult train_recurrent(FnoModel& m, const Dataset& train, const TrainConfig& cfg,
                            const std::function<void(int, double)>& on_epoch = {});

}  // namespace nobs
