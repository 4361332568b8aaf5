// Command-line frontend: simulate / gain / datagen / train / eval / bench /
// export. Every subcommand accepts --json for a machine-readable summary on
// stdout; file outputs land under --out-dir.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nobs/bench.hpp"
#include "nobs/checkpoint.hpp"
#include "nobs/dataset.hpp"
#include "nobs/exporter.hpp"
#include "nobs/fno.hpp"
#include "nobs/gains.hpp"
#include "nobs/metrics.hpp"
#include "nobs/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nobs;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
};

// Output paths are relative to --out-dir; inputs are taken as given.
std::string resolve_out(const GlobalOpts& g, const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(g.out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

SystemKind parse_system(const std::string& s) {
  if (s == "rd") return SystemKind::ReactionDiffusion;
  if (s == "pt") return SystemKind::PrescribedTime;
  if (s == "traffic") return SystemKind::Traffic;
  throw CLI::ValidationError("--system", "expected rd, pt or traffic");
}

// nx,dt,nt with dx derived from the system's domain length.
Grid parse_grid(const std::string& s, double domain_length) {
  int nx = 0, nt = 0;
  double dt = 0.0;
  char tail = '\0';
  if (std::sscanf(s.c_str(), "%d,%lf,%d%c", &nx, &dt, &nt, &tail) != 3)
    throw CLI::ValidationError("--grid", "expected nx,dt,nt");
  if (nx < 2) throw CLI::ValidationError("--grid", "nx must be at least 2");
  return Grid(nx, domain_length / (nx - 1), nt, dt);
}

double param_or(const std::map<std::string, std::string>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stod(it->second);
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& kvs) {
  std::map<std::string, std::string> out;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--params", "expected key=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

json grid_json(const Grid& g) {
  return {{"nx", g.nx}, {"dx", g.dx}, {"nt", g.nt}, {"dt", g.dt}};
}

void emit(bool as_json, const json& doc, const std::string& human) {
  if (as_json)
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << human << "\n";
}

// Trajectory CSV per component; multi-component systems get a suffix per
// component so nothing is silently dropped.
std::vector<std::string> write_trajectory(const GlobalOpts& g, const std::string& out,
                                          const Trajectory& traj, SystemKind system) {
  std::vector<std::string> written;
  if (traj.components == 1) {
    const auto path = resolve_out(g, out);
    export_trajectory_csv(path, traj, 0);
    written.push_back(path);
    return written;
  }
  const fs::path p(out);
  const std::string stem = (p.parent_path() / p.stem()).string();
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  const bool traffic = system == SystemKind::Traffic;
  for (int c = 0; c < traj.components; ++c) {
    const std::string tag = traffic ? (c == 0 ? "_rho" : "_v") : "_c" + std::to_string(c);
    const auto path = resolve_out(g, stem + tag + ext);
    export_trajectory_csv(path, traj, c);
    written.push_back(path);
  }
  return written;
}

ReactionDiffusionParams rd_params_from(const std::map<std::string, std::string>& params,
                                       bool prescribed_time) {
  if (prescribed_time || params.count("lambda"))
    return ReactionDiffusionParams::constant(param_or(params, "epsilon", 1.0),
                                             param_or(params, "lambda", 12.0));
  return ReactionDiffusionParams::one_peak(param_or(params, "epsilon", 1.0),
                                           param_or(params, "alpha", 4.0),
                                           param_or(params, "beta", 2.0));
}

IcSpec ic_spec_from(const std::map<std::string, std::string>& params, std::uint64_t seed) {
  IcSpec ic;
  ic.seed = seed;
  ic.K = static_cast<int>(param_or(params, "K", ic.K));
  ic.decay = param_or(params, "decay", ic.decay);
  ic.amp_rho = param_or(params, "amp_rho", ic.amp_rho);
  ic.amp_v = param_or(params, "amp_v", ic.amp_v);
  return ic;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const GlobalOpts& g, const std::string& system_s, const std::string& grid_s,
                 const std::string& scheme_s, std::uint64_t record,
                 const std::vector<std::string>& param_kvs, const std::string& out,
                 bool as_json) {
  const SystemKind system = parse_system(system_s);
  const auto params = parse_params(param_kvs);
  const bool traffic = system == SystemKind::Traffic;
  const double domain = traffic ? param_or(params, "L", 500.0) : 1.0;
  const std::string grid_default = traffic ? "101,0.1,1200"
                                 : system == SystemKind::PrescribedTime ? "51,0.006,99"
                                                                        : "51,1e-4,1250";
  const Grid grid = parse_grid(grid_s.empty() ? grid_default : grid_s, domain);

  Trajectory traj;
  if (system == SystemKind::Traffic) {
    ArzParams p = ArzParams::reference(param_or(params, "rho_star", 0.12),
                                       param_or(params, "v_star", 10.0));
    p.tau = param_or(params, "tau", p.tau);
    p.rho_max = param_or(params, "rho_max", p.rho_max);
    p.v_free = param_or(params, "v_free", p.v_free);
    p.L_r = domain;
    const auto [ic_rho, ic_v] = sample_ic_traffic(ic_spec_from(params, g.seed), record, p, grid);
    const std::vector<double> inflow(grid.n_levels(), p.q_star);
    const std::vector<double> outflow(grid.n_levels(), p.v_star);
    traj = simulate_arz(ic_rho, ic_v, p, grid, inflow, outflow);
  } else {
    const bool pt = system == SystemKind::PrescribedTime;
    ReactionDiffusionParams p = rd_params_from(params, pt);
    if (pt) p.right_bc = RightBc::DirichletZero;
    const RdScheme scheme = scheme_s == "explicit" ? RdScheme::Explicit : RdScheme::ImplicitEuler;
    const IcSpec ic = ic_spec_from(params, g.seed);
    const auto u0 = pt ? sample_ic_sine_dirichlet(ic, record, grid)
                       : sample_ic_sine(ic, record, grid);
    traj = simulate_reaction_diffusion(u0, p, grid, scheme);
  }

  std::vector<std::string> files;
  if (!out.empty()) files = write_trajectory(g, out, traj, system);

  json doc;
  doc["command"] = "simulate";
  doc["system"] = system_s;
  doc["grid"] = grid_json(grid);
  doc["record"] = record;
  json norms = json::array();
  for (int c = 0; c < traj.components; ++c)
    norms.push_back({{"initial", spatial_l2(&traj.at(c, 0, 0), grid.nx, grid.dx)},
                     {"final", spatial_l2(&traj.at(c, grid.nt, 0), grid.nx, grid.dx)}});
  doc["spatial_l2"] = std::move(norms);
  doc["files"] = files;

  std::string human = "simulated " + system_s + " on " + std::to_string(grid.nx) + " x " +
                      std::to_string(grid.n_levels()) + " levels";
  for (const auto& f : files) human += "\n  wrote " + f;
  emit(as_json, doc, human);
  return 0;
}

// -------------------------------------------------------------------- gain

int run_gain(const GlobalOpts& g, const std::string& kind, const std::string& grid_s,
             const std::vector<std::string>& param_kvs, std::vector<double> times,
             const std::string& out, const std::string& csv, bool as_json) {
  const auto params = parse_params(param_kvs);
  const Grid grid = parse_grid(grid_s.empty() ? "51,0.006,99" : grid_s, 1.0);

  std::map<std::string, std::vector<double>> arrays;
  std::vector<double> xs(grid.nx);
  for (int i = 0; i < grid.nx; ++i) xs[i] = grid.x(i);
  arrays["x"] = std::move(xs);
  json doc;
  doc["command"] = "gain";
  doc["kind"] = kind;
  doc["grid"] = grid_json(grid);

  if (kind == "exponential") {
    const auto gn = ExponentialGain::sample(param_or(params, "alpha", 4.0),
                                            param_or(params, "beta", 2.0),
                                            param_or(params, "epsilon", 1.0), grid);
    arrays["gain"] = gn.sampled;
    doc["alpha"] = gn.alpha;
    doc["beta"] = gn.beta;
    doc["epsilon"] = gn.epsilon;
  } else if (kind == "prescribed-time") {
    auto cfg = PrescribedTimeGain::with_grid(param_or(params, "T", 0.6),
                                             param_or(params, "mu", 1.0),
                                             static_cast<int>(param_or(params, "terms", 8)), grid);
    if (params.count("clamp")) cfg.clamp = param_or(params, "clamp", cfg.clamp);
    if (times.empty())
      times = {0.0, 0.25 * cfg.T_horizon, 0.5 * cfg.T_horizon, 0.75 * cfg.T_horizon};
    for (const double t : times) {
      std::vector<double> row(grid.nx);
      for (int i = 0; i < grid.nx; ++i) row[i] = gain_prescribed_time(grid.x(i), t, cfg);
      char name[48];
      std::snprintf(name, sizeof(name), "gain_t=%.6g", t);
      arrays[name] = std::move(row);
    }
    arrays["t"] = times;
    doc["T"] = cfg.T_horizon;
    doc["mu"] = cfg.mu;
    doc["terms"] = cfg.n_terms;
    doc["clamp"] = cfg.clamp;
    doc["times"] = times;
  } else {
    throw CLI::ValidationError("--kind", "expected exponential or prescribed-time");
  }

  std::vector<std::string> files;
  const auto bin_path = resolve_out(g, out);
  write_arrays(bin_path, arrays);
  files.push_back(bin_path);
  if (!csv.empty()) {
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (const auto& [name, vals] : arrays)
      if (name != "x" && name != "t") cols.emplace_back(name, vals);
    const auto csv_path = resolve_out(g, csv);
    export_multi_series_csv(csv_path, arrays["x"], cols);
    files.push_back(csv_path);
  }
  doc["files"] = files;

  std::string human = "sampled " + kind + " gain on " + std::to_string(grid.nx) + " points";
  for (const auto& f : files) human += "\n  wrote " + f;
  emit(as_json, doc, human);
  return 0;
}

// ----------------------------------------------------------------- datagen

int run_datagen(const GlobalOpts& g, const std::string& system_s, int n,
                const std::string& grid_s, const std::vector<std::string>& param_kvs,
                const std::string& out, bool as_json) {
  const auto params = parse_params(param_kvs);
  GenerateConfig cfg;
  cfg.system = parse_system(system_s);
  cfg.n = n;
  cfg.seed = g.seed;
  cfg.ic = ic_spec_from(params, g.seed);
  const bool traffic = cfg.system == SystemKind::Traffic;
  const bool pt = cfg.system == SystemKind::PrescribedTime;
  const double domain = traffic ? param_or(params, "L", 500.0) : 1.0;
  const std::string grid_default = traffic ? "101,0.1,1200" : pt ? "51,0.006,99" : "51,1e-4,1250";
  const Grid grid = parse_grid(grid_s.empty() ? grid_default : grid_s, domain);

  cfg.rd_params = rd_params_from(params, pt);
  if (pt)
    cfg.pt_gain = PrescribedTimeGain::with_grid(param_or(params, "T", 0.6),
                                                param_or(params, "mu", 1.0),
                                                static_cast<int>(param_or(params, "terms", 8)),
                                                grid);
  if (traffic) {
    cfg.arz_params.L_r = domain;
    cfg.arz_params.tau = param_or(params, "tau", cfg.arz_params.tau);
    cfg.arz_params.rho_max = param_or(params, "rho_max", cfg.arz_params.rho_max);
    cfg.arz_params.v_free = param_or(params, "v_free", cfg.arz_params.v_free);
    auto it = params.find("injection");
    if (it != params.end())
      cfg.arz_injection.kind =
          it->second == "none" ? InjectionKind::None : InjectionKind::OutletFluxError;
    cfg.arz_injection.scale = param_or(params, "scale", cfg.arz_injection.scale);
  }
  if (params.count("scheme"))
    cfg.rd_scheme = params.at("scheme") == "explicit" ? RdScheme::Explicit
                                                      : RdScheme::ImplicitEuler;

  const auto ds = generate_dataset(cfg, grid);
  const auto path = resolve_out(g, out);
  write_dataset(ds, path);

  json doc;
  doc["command"] = "datagen";
  doc["system"] = system_s;
  doc["n"] = n;
  doc["seed"] = g.seed;
  doc["grid"] = grid_json(grid);
  doc["file"] = path;
  doc["bytes"] = static_cast<std::uint64_t>(fs::file_size(path));
  emit(as_json, doc,
       "generated " + std::to_string(n) + " " + system_s + " records\n  wrote " + path);
  return 0;
}

// ------------------------------------------------------------------- train

int run_train(const GlobalOpts& g, const std::string& mode, const std::string& data,
              int epochs, double lr, const std::string& out, const FnoConfig& net,
              int batch, int halve_every, bool as_json) {
  const Dataset ds = read_dataset(data);
  const bool recurrent = mode == "recurrent";
  if (!recurrent && mode != "feedforward")
    throw CLI::ValidationError("--mode", "expected feedforward or recurrent");

  FnoModel model = recurrent ? make_recurrent_model(ds, net, g.seed)
                             : make_feedforward_model(ds, net, g.seed);
  TrainConfig tc;
  tc.epochs = epochs;
  tc.batch = batch;
  tc.adam.lr = lr;
  tc.lr_halve_every = halve_every;
  tc.seed = g.seed;
  if (as_json) tc.log_every = 0;  // keep stdout pure JSON
  const TrainResult res = recurrent ? train_recurrent(model, ds, tc)
                                    : train_feedforward(model, ds, tc);

  Checkpoint ck;
  ck.model = std::move(model);
  ck.meta["epochs"] = epochs;
  ck.meta["final_loss"] = res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back();
  ck.meta["lr"] = lr;
  ck.meta["seed"] = static_cast<double>(g.seed);
  ck.meta["train_seconds"] = res.wall_seconds;
  const auto path = resolve_out(g, out);
  write_checkpoint(path, ck);

  json doc;
  doc["command"] = "train";
  doc["mode"] = mode;
  doc["epochs"] = epochs;
  doc["final_loss"] = ck.meta["final_loss"];
  doc["wall_seconds"] = res.wall_seconds;
  doc["file"] = path;
  char line[160];
  std::snprintf(line, sizeof(line), "trained %s for %d epochs, final loss %.6e (%.1f s)",
                mode.c_str(), epochs, ck.meta["final_loss"], res.wall_seconds);
  emit(as_json, doc, std::string(line) + "\n  wrote " + path);
  return 0;
}

// -------------------------------------------------------------------- eval

int run_eval(const GlobalOpts& g, const std::string& ckpt, const std::string& data,
             const std::string& report, const std::string& out, bool as_json) {
  if (report != "json" && report != "csv")
    throw CLI::ValidationError("--report", "expected json or csv");
  const Checkpoint ck = read_checkpoint(ckpt);
  const Dataset ds = read_dataset(data);
  const EvalReport ev = evaluate(ck.model, ds);

  std::string body;
  if (report == "json") {
    json doc;
    doc["command"] = "eval";
    doc["checkpoint"] = ckpt;
    doc["data"] = data;
    doc["mean_rel_l2"] = ev.mean_rel_l2;
    doc["per_record"] = ev.per_record;
    body = doc.dump(2) + "\n";
  } else {
    body = "record,rel_l2\n";
    char line[64];
    for (std::size_t r = 0; r < ev.per_record.size(); ++r) {
      std::snprintf(line, sizeof(line), "%zu,%.9g\n", r, ev.per_record[r]);
      body += line;
    }
    std::snprintf(line, sizeof(line), "mean,%.9g\n", ev.mean_rel_l2);
    body += line;
  }

  if (!out.empty()) {
    const auto path = resolve_out(g, out);
    export_text(path, body);
    char line[96];
    std::snprintf(line, sizeof(line), "mean relative L2 %.6e over %zu records", ev.mean_rel_l2,
                  ev.per_record.size());
    json doc = {{"command", "eval"}, {"mean_rel_l2", ev.mean_rel_l2}, {"file", path}};
    emit(as_json, doc, std::string(line) + "\n  wrote " + path);
  } else {
    std::cout << body;  // the report itself is the machine-readable output
  }
  return 0;
}

// ------------------------------------------------------------------- bench

int run_bench(const GlobalOpts& g, const std::string& data, const std::string& ff,
              const std::string& rec, int warmup, int reps, const std::string& report,
              const std::string& out, bool as_json) {
  if (report != "json" && report != "csv")
    throw CLI::ValidationError("--report", "expected json or csv");
  const Dataset ds = read_dataset(data);

  BenchReport rep;
  rep.fingerprint = bench_fingerprint();
  rep.methods.push_back(bench_method(BenchMethod::Conventional, ds, nullptr, warmup, reps));
  const double baseline = rep.methods[0].seconds_per_instance;
  if (!ff.empty()) {
    const Checkpoint ck = read_checkpoint(ff);
    rep.methods.push_back(bench_method(BenchMethod::Feedforward, ds, &ck.model, warmup, reps));
  }
  if (!rec.empty()) {
    const Checkpoint ck = read_checkpoint(rec);
    rep.methods.push_back(bench_method(BenchMethod::Recurrent, ds, &ck.model, warmup, reps));
  }
  for (auto& m : rep.methods)
    m.speedup_vs_baseline = baseline / m.seconds_per_instance;

  if (!out.empty()) {
    const auto path = resolve_out(g, out);
    export_report(rep, report, path);
    json doc;
    doc["command"] = "bench";
    doc["file"] = path;
    for (const auto& m : rep.methods)
      doc["methods"].push_back({{"method", m.method},
                                {"seconds_per_instance", m.seconds_per_instance},
                                {"speedup_vs_baseline", m.speedup_vs_baseline}});
    std::string human = "benchmarked " + std::to_string(rep.methods.size()) + " method(s)";
    for (const auto& m : rep.methods) {
      char line[128];
      std::snprintf(line, sizeof(line), "\n  %-12s %.3e s/instance  speedup %.2fx",
                    m.method.c_str(), m.seconds_per_instance, m.speedup_vs_baseline);
      human += line;
    }
    emit(as_json, doc, human + "\n  wrote " + path);
  } else {
    std::cout << (report == "json" ? bench_report_json(rep) + "\n" : bench_report_csv(rep));
  }
  return 0;
}

// ------------------------------------------------------------------ export

int run_export(const GlobalOpts& g, const std::string& what, const std::string& data,
               std::uint64_t record, int component, const std::vector<std::string>& ckpts,
               const std::string& out, bool as_json) {
  const Dataset ds = read_dataset(data);
  if (record >= ds.records.size())
    throw Error("record " + std::to_string(record) + " out of range (dataset has " +
                std::to_string(ds.records.size()) + ")");
  const DatasetRecord& rec = ds.records[record];

  auto predict = [&](const Checkpoint& ck) {
    return ck.model.kind == FnoKind::Feedforward ? feedforward_predict(ck.model, rec, ds.grid)
                                                 : recurrent_predict(ck.model, rec, ds.grid);
  };

  std::vector<std::string> files;
  json doc;
  doc["command"] = "export";
  doc["what"] = what;
  doc["record"] = record;

  if (what == "trajectory") {
    Trajectory traj = rec.target;
    if (!ckpts.empty()) traj = predict(read_checkpoint(ckpts.front()));
    if (component >= 0) {
      const auto path = resolve_out(g, out);
      export_trajectory_csv(path, traj, component);
      files.push_back(path);
    } else {
      files = write_trajectory(g, out, traj, ds.system);
    }
  } else if (what == "error-evolution") {
    // Per-level spatial L2 of (prediction - stored target), one column per
    // checkpoint; this is the plot of how the learned observers track the
    // conventional one over the horizon.
    if (ckpts.empty())
      throw Error("error-evolution needs at least one --ckpt to compare against the target");
    std::vector<double> t(ds.grid.n_levels());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = ds.grid.t(static_cast<int>(k));
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (const auto& c : ckpts) {
      const Checkpoint ck = read_checkpoint(c);
      cols.emplace_back(fs::path(c).stem().string(),
                        error_l2_series(predict(ck), rec.target));
    }
    const auto path = resolve_out(g, out);
    export_multi_series_csv(path, t, cols);
    files.push_back(path);
  } else {
    throw CLI::ValidationError("--what", "expected trajectory or error-evolution");
  }

  doc["files"] = files;
  std::string human = "exported " + what;
  for (const auto& f : files) human += "\n  wrote " + f;
  emit(as_json, doc, human);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE observer toolbox: simulation, gains, datasets, training, benchmarks"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed for sampling and initialization");
  app.add_option("--threads", g.threads, "worker threads (execution is single-threaded)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory for output files");

  std::string system = "rd", grid_s, scheme = "implicit", out, csv, kind = "exponential";
  std::string mode = "feedforward", data, ckpt, report = "json", what = "trajectory";
  std::string ff_ckpt, rec_ckpt;
  std::vector<std::string> params, ckpts;
  std::vector<double> times;
  std::uint64_t record = 0;
  int n = 10, epochs = 100, batch = 20, halve_every = 100, warmup = 3, reps = 10;
  int component = -1;
  double lr = 1e-3;
  FnoConfig net;
  bool as_json = false;

  auto* sim = app.add_subcommand("simulate", "integrate a plant and dump the trajectory");
  sim->fallthrough();
  sim->add_option("--system", system, "rd, pt or traffic");
  sim->add_option("--grid", grid_s, "nx,dt,nt (dx follows from the domain length)");
  sim->add_option("--scheme", scheme, "explicit or implicit (diffusion systems)");
  sim->add_option("--record", record, "initial-condition index under the seed");
  sim->add_option("--params", params, "key=value physics overrides");
  sim->add_option("--out", out, "trajectory CSV path");
  sim->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* gn = app.add_subcommand("gain", "sample observer gains into a container dump");
  gn->fallthrough();
  gn->add_option("--kind", kind, "exponential or prescribed-time");
  gn->add_option("--grid", grid_s, "nx,dt,nt sampling grid");
  gn->add_option("--params", params, "key=value gain parameters");
  gn->add_option("--times", times, "evaluation times (prescribed-time kind)")->delimiter(',');
  gn->add_option("--out", out, "container output path")->required();
  gn->add_option("--csv", csv, "optional CSV twin");
  gn->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* dg = app.add_subcommand("datagen", "generate a supervised observer dataset");
  dg->fallthrough();
  dg->add_option("--system", system, "rd, pt or traffic");
  dg->add_option("--n", n, "number of records")->check(CLI::PositiveNumber);
  dg->add_option("--grid", grid_s, "nx,dt,nt (dx follows from the domain length)");
  dg->add_option("--params", params, "key=value physics/sampling overrides");
  dg->add_option("--out", out, "dataset output path")->required();
  dg->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* tr = app.add_subcommand("train", "train a neural observer on a dataset");
  tr->fallthrough();
  tr->add_option("--mode", mode, "feedforward or recurrent");
  tr->add_option("--data", data, "training dataset")->required();
  tr->add_option("--epochs", epochs, "training epochs")->check(CLI::PositiveNumber);
  tr->add_option("--lr", lr, "Adam learning rate");
  tr->add_option("--batch", batch, "minibatch size")->check(CLI::PositiveNumber);
  tr->add_option("--lr-halve-every", halve_every, "epochs between halving (0 disables)");
  tr->add_option("--layers", net.n_layers, "spectral layers");
  tr->add_option("--width", net.width, "channel width");
  tr->add_option("--modes-x", net.modes_x, "kept spatial modes");
  tr->add_option("--modes-t", net.modes_t, "kept temporal modes (feedforward)");
  tr->add_option("--out", out, "checkpoint output path")->required();
  tr->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint against a dataset");
  ev->fallthrough();
  ev->add_option("--ckpt", ckpt, "checkpoint path")->required();
  ev->add_option("--data", data, "evaluation dataset")->required();
  ev->add_option("--report", report, "json or csv");
  ev->add_option("--out", out, "report path (stdout when omitted)");
  ev->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* bn = app.add_subcommand("bench", "time methods and report accuracy/speedups");
  bn->fallthrough();
  bn->add_option("--data", data, "benchmark dataset")->required();
  bn->add_option("--ff", ff_ckpt, "feedforward checkpoint to include");
  bn->add_option("--rec", rec_ckpt, "recurrent checkpoint to include");
  bn->add_option("--warmup", warmup, "warmup repetitions");
  bn->add_option("--reps", reps, "timed repetitions (at least 10)");
  bn->add_option("--report", report, "json or csv");
  bn->add_option("--out", out, "report path (stdout when omitted)");
  bn->add_flag("--json", as_json, "machine-readable summary on stdout");

  auto* ex = app.add_subcommand("export", "write plot-ready CSVs from stored artifacts");
  ex->fallthrough();
  ex->add_option("--what", what, "trajectory or error-evolution");
  ex->add_option("--data", data, "dataset path")->required();
  ex->add_option("--record", record, "record index");
  ex->add_option("--component", component, "component index (trajectory; default all)");
  ex->add_option("--ckpt", ckpts, "checkpoint(s): prediction source / comparison columns");
  ex->add_option("--out", out, "CSV output path")->required();
  ex->add_flag("--json", as_json, "machine-readable summary on stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g.threads != 1)
      std::cerr << "note: --threads " << g.threads << " requested; running single-threaded\n";
    if (sim->parsed())
      return run_simulate(g, system, grid_s, scheme, record, params, out, as_json);
    if (gn->parsed()) return run_gain(g, kind, grid_s, params, times, out, csv, as_json);
    if (dg->parsed()) return run_datagen(g, system, n, grid_s, params, out, as_json);
    if (tr->parsed())
      return run_train(g, mode, data, epochs, lr, out, net, batch, halve_every, as_json);
    if (ev->parsed()) return run_eval(g, ckpt, data, report, out, as_json);
    if (bn->parsed())
      return run_bench(g, data, ff_ckpt, rec_ckpt, warmup, reps, report, out, as_json);
    if (ex->parsed()) return run_export(g, what, data, record, component, ckpts, out, as_json);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
