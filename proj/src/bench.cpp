#include "nobs/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "nobs/errors.hpp"
#include "nobs/gains.hpp"
#include "nobs/metrics.hpp"
#include "nobs/observers.hpp"

namespace nobs {

using nlohmann::json;

BenchFingerprint bench_fingerprint() {
  BenchFingerprint f;
  f.cpu_model = "unknown";
  std::ifstream is("/proc/cpuinfo");
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find("model name");
    if (pos != std::string::npos) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        f.cpu_model = line.substr(colon + 1);
        while (!f.cpu_model.empty() && f.cpu_model.front() == ' ')
          f.cpu_model.erase(f.cpu_model.begin());
      }
      break;
    }
  }
  f.threads = 1;  // timed runs are single-threaded by construction
#ifdef NDEBUG
  f.build = "release";
#else
  f.build = "debug";
#endif
  return f;
}

BenchCase run_bench(const std::string& name, const std::function<void()>& fn, int warmup,
                    int reps) {
  if (reps < 10) reps = 10;
  BenchCase c;
  c.name = name;
  c.warmup = warmup;
  c.reps = reps;
  for (int i = 0; i < warmup; ++i) fn();
  c.samples_ms.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    c.samples_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::vector<double> sorted = c.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  c.min_ms = sorted.front();
  c.max_ms = sorted.back();
  const std::size_t n = sorted.size();
  c.median_ms = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return c;
}

namespace {

// The conventional estimator for one record, in the system's canonical
// configuration. Traffic runs boundary-driven (the printed full-scale
// injection does not survive this discretization; see run_observer_arz).
Trajectory conventional_estimate(const Dataset& ds, const DatasetRecord& rec) {
  switch (ds.system) {
    case SystemKind::ReactionDiffusion: {
      auto params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
      auto gain = ExponentialGain::sample(params.alpha, params.beta, params.epsilon, ds.grid);
      return run_observer_reaction_diffusion(rec.measurements, gain, params, ds.grid,
                                             rec.ic_hat[0], RdScheme::ImplicitEuler);
    }
    case SystemKind::PrescribedTime: {
      auto params = ReactionDiffusionParams::constant(1.0, 12.0);
      params.right_bc = RightBc::DirichletZero;
      auto cfg = PrescribedTimeGain::with_grid(0.6, 1.0, 8, ds.grid);
      return run_observer_prescribed_time(rec.measurements, cfg, params, ds.grid,
                                          rec.ic_hat[0]);
    }
    case SystemKind::Traffic: {
      auto params = ArzParams::reference(rec.meta.at("rho_star"), rec.meta.at("v_star"));
      InjectionConfig inj;
      inj.kind = InjectionKind::None;
      auto gains = TrafficObserverGains::at_reference(params, inj);
      return run_observer_arz(rec.measurements, gains, ds.grid, rec.ic_hat[0],
                              rec.ic_hat[1]);
    }
  }
  throw Error("unknown system kind");
}

const char* method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::Conventional: return "conventional";
    case BenchMethod::Feedforward: return "feedforward";
    case BenchMethod::Recurrent: return "recurrent";
  }
  return "?";
}

}  // namespace

MethodReport bench_method(BenchMethod method, const Dataset& ds, const FnoModel* model,
                          int warmup, int reps) {
  if (ds.records.empty()) throw Error("bench needs at least one record");
  if (method != BenchMethod::Conventional) {
    if (model == nullptr)
      throw MissingCheckpoint("neural method benched without a model");
    if ((method == BenchMethod::Feedforward) != (model->kind == FnoKind::Feedforward))
      throw KindMismatch("model kind does not match the benched method");
  }

  MethodReport rep;
  rep.method = method_name(method);
  rep.n_instances = static_cast<int>(ds.records.size());

  auto estimate = [&](const DatasetRecord& rec) -> Trajectory {
    switch (method) {
      case BenchMethod::Conventional: return conventional_estimate(ds, rec);
      case BenchMethod::Feedforward: return feedforward_predict(*model, rec, ds.grid);
      case BenchMethod::Recurrent: return recurrent_predict(*model, rec, ds.grid);
    }
    throw Error("unknown method");
  };

  // Accuracy pass (untimed): every record once.
  double sum = 0.0;
  for (const auto& rec : ds.records) sum += relative_l2(estimate(rec), rec.target);
  rep.mean_rel_l2 = sum / static_cast<double>(ds.records.size());

  // Timing pass: repetitions cycle through the records so the median is a
  // per-instance figure over the dataset, not over one cached instance.
  std::size_t cursor = 0;
  rep.timing = run_bench(rep.method,
                         [&] {
                           estimate(ds.records[cursor % ds.records.size()]);
                           ++cursor;
                         },
                         warmup, std::max(reps, rep.n_instances));
  rep.seconds_per_instance = rep.timing.median_ms / 1e3;
  return rep;
}

namespace {

void require_fingerprint(const BenchReport& report) {
  if (report.fingerprint.cpu_model.empty() || report.fingerprint.build.empty() ||
      report.fingerprint.threads <= 0)
    throw Error("bench report lacks an environment fingerprint");
}

}  // namespace

std::string bench_report_json(const BenchReport& report) {
  require_fingerprint(report);
  json j;
  j["fingerprint"] = {{"cpu_model", report.fingerprint.cpu_model},
                      {"threads", report.fingerprint.threads},
                      {"build", report.fingerprint.build}};
  json methods = json::array();
  for (const auto& m : report.methods)
    methods.push_back({{"method", m.method},
                       {"seconds_per_instance", m.seconds_per_instance},
                       {"n_instances", m.n_instances},
                       {"mean_rel_l2", m.mean_rel_l2},
                       {"speedup_vs_baseline", m.speedup_vs_baseline},
                       {"timing",
                        {{"warmup", m.timing.warmup},
                         {"reps", m.timing.reps},
                         {"median_ms", m.timing.median_ms},
                         {"min_ms", m.timing.min_ms},
                         {"max_ms", m.timing.max_ms},
                         {"samples_ms", m.timing.samples_ms}}}});
  j["methods"] = std::move(methods);
  return j.dump(2);
}

std::string bench_report_csv(const BenchReport& report) {
  require_fingerprint(report);
  std::ostringstream os;
  os << "method,seconds_per_instance,n_instances,mean_rel_l2,speedup_vs_baseline,"
        "cpu_model,threads,build\n";
  for (const auto& m : report.methods) {
    os << m.method << ',';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g,", m.seconds_per_instance);
    os << buf << m.n_instances << ',';
    std::snprintf(buf, sizeof buf, "%.9g,", m.mean_rel_l2);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.9g,", m.speedup_vs_baseline);
    os << buf << '"' << report.fingerprint.cpu_model << "\"," << report.fingerprint.threads
       << ',' << report.fingerprint.build << '\n';
  }
  return os.str();
}

}  // namespace nobs
