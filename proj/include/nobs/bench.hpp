#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nobs/dataset.hpp"
#include "nobs/fno.hpp"

namespace nobs {

struct BenchFingerprint {
  std::string cpu_model;
  int threads = 1;
  std::string build;  // compiler + flags profile
};

BenchFingerprint bench_fingerprint();

struct BenchCase {
  std::string name;
  int warmup = 3;
  int reps = 10;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  std::vector<double> samples_ms;
};

// Monotonic-clock timing: `warmup` unrecorded calls, then `reps` measured
// ones (reps >= 10). The timed region is exactly one call of fn.
BenchCase run_bench(const std::string& name, const std::function<void()>& fn,
                    int warmup = 3, int reps = 10);

// One estimation method, timed end to end (measurement in, trajectory out).
struct MethodReport {
  std::string method;  // conventional | feedforward | recurrent
  double seconds_per_instance = 0.0;  // median over measured repetitions
  int n_instances = 0;
  double mean_rel_l2 = 0.0;           // against the stored targets
  double speedup_vs_baseline = 1.0;   // baseline_time / method_time
  BenchCase timing;
};

struct BenchReport {
  BenchFingerprint fingerprint;
  std::vector<MethodReport> methods;
};

enum class BenchMethod { Conventional, Feedforward, Recurrent };

// Times per-instance estimation over the dataset's records, cycling through
// them across repetitions. The conventional method reruns the matching
// observer on the dataset grid; neural methods run full inference from the
// model. mean_rel_l2 compares each produced trajectory with the stored
// target. Throws MissingCheckpoint when a neural method lacks a model.
MethodReport bench_method(BenchMethod method, const Dataset& ds, const FnoModel* model,
                          int warmup = 3, int reps = 10);

// Serialization. Both validate that the fingerprint is populated; a report
// without an environment fingerprint is not a valid report.
std::string bench_report_json(const BenchReport& report);
// Header row always present, one row per method.
std::string bench_report_csv(const BenchReport& report);

}  // namespace nobs
