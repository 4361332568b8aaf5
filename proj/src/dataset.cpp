#include "nobs/dataset.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "nobs/errors.hpp"
#include "nobs/gains.hpp"
#include "nobs/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian");

namespace nobs {

using nlohmann::json;

namespace {

// Raw counter base for per-record scalar draws; mode amplitudes live below.
constexpr std::uint64_t kScalarBase = 1ull << 20;

// Reference-state sampling ranges for traffic records.
constexpr double kRhoStarLo = 0.110, kRhoStarHi = 0.130;  // veh/m
constexpr double kVStarLo = 10.0, kVStarHi = 12.0;        // m/s

const char* system_name(SystemKind s) {
  switch (s) {
    case SystemKind::ReactionDiffusion: return "reaction_diffusion";
    case SystemKind::PrescribedTime: return "prescribed_time";
    case SystemKind::Traffic: return "traffic";
  }
  return "?";
}

SystemKind system_from(const std::string& s) {
  if (s == "reaction_diffusion") return SystemKind::ReactionDiffusion;
  if (s == "prescribed_time") return SystemKind::PrescribedTime;
  if (s == "traffic") return SystemKind::Traffic;
  throw HeaderMismatch("unknown system: " + s);
}

const char* kind_name(MeasurementKind k) {
  switch (k) {
    case MeasurementKind::DirichletAt1: return "dirichlet_at_1";
    case MeasurementKind::NeumannAt1: return "neumann_at_1";
    case MeasurementKind::TrafficTriple: return "traffic_triple";
  }
  return "?";
}

MeasurementKind kind_from(const std::string& s) {
  if (s == "dirichlet_at_1") return MeasurementKind::DirichletAt1;
  if (s == "neumann_at_1") return MeasurementKind::NeumannAt1;
  if (s == "traffic_triple") return MeasurementKind::TrafficTriple;
  throw HeaderMismatch("unknown measurement kind: " + s);
}

DatasetRecord make_rd_record(const GenerateConfig& cfg, const Grid& grid, std::uint64_t r) {
  const auto ic = sample_ic_sine(cfg.ic, r, grid);
  const auto plant = simulate_reaction_diffusion(ic, cfg.rd_params, grid, cfg.rd_scheme);
  DatasetRecord rec;
  rec.measurements = extract_measurements(plant, MeasurementKind::DirichletAt1);
  const auto gain = ExponentialGain::sample(cfg.rd_params.alpha, cfg.rd_params.beta,
                                            cfg.rd_params.epsilon, grid);
  rec.ic_hat = {std::vector<double>(grid.nx, 0.0)};
  rec.target = run_observer_reaction_diffusion(rec.measurements, gain, cfg.rd_params, grid,
                                               rec.ic_hat[0], cfg.rd_scheme);
  rec.meta["record"] = static_cast<double>(r);
  return rec;
}

DatasetRecord make_pt_record(const GenerateConfig& cfg, const Grid& grid, std::uint64_t r) {
  // The flux-driven design needs the right end pinned, both in the plant and
  // in the observer; a zero-flux right end would null the measurement.
  ReactionDiffusionParams p = cfg.rd_params;
  p.right_bc = RightBc::DirichletZero;
  const auto ic = sample_ic_sine_dirichlet(cfg.ic, r, grid);
  const auto plant = simulate_reaction_diffusion(ic, p, grid, RdScheme::ImplicitEuler);
  DatasetRecord rec;
  rec.measurements = extract_measurements(plant, MeasurementKind::NeumannAt1);
  rec.ic_hat = {std::vector<double>(grid.nx, 0.0)};
  rec.target = run_observer_prescribed_time(rec.measurements, cfg.pt_gain, p, grid,
                                            rec.ic_hat[0]);
  rec.meta["record"] = static_cast<double>(r);
  return rec;
}

DatasetRecord make_traffic_record(const GenerateConfig& cfg, const Grid& grid,
                                  std::uint64_t r) {
  ArzParams p = cfg.arz_params;
  p.rho_star = rng::uniform(cfg.ic.seed, 2 * r, kScalarBase, kRhoStarLo, kRhoStarHi);
  p.v_star = rng::uniform(cfg.ic.seed, 2 * r, kScalarBase + 1, kVStarLo, kVStarHi);
  p.q_star = p.rho_star * p.v_star;
  const auto [ic_rho, ic_v] = sample_ic_traffic(cfg.ic, r, p, grid);
  const std::vector<double> inflow(grid.n_levels(), p.q_star);
  const std::vector<double> outflow(grid.n_levels(), p.v_star);
  const auto plant = simulate_arz(ic_rho, ic_v, p, grid, inflow, outflow);
  DatasetRecord rec;
  rec.measurements = extract_measurements(plant, MeasurementKind::TrafficTriple);
  rec.ic_hat = {std::vector<double>(grid.nx, p.rho_star), std::vector<double>(grid.nx, p.v_star)};
  const auto gains = TrafficObserverGains::at_reference(p, cfg.arz_injection);
  rec.target = run_observer_arz(rec.measurements, gains, grid, rec.ic_hat[0], rec.ic_hat[1]);
  rec.meta["record"] = static_cast<double>(r);
  rec.meta["rho_star"] = p.rho_star;
  rec.meta["v_star"] = p.v_star;
  return rec;
}

}  // namespace

Dataset generate_dataset(const GenerateConfig& cfg, const Grid& grid) {
  Dataset ds;
  ds.system = cfg.system;
  ds.grid = grid;
  ds.records.reserve(cfg.n);
  IcSpec ic = cfg.ic;
  ic.seed = cfg.seed;
  GenerateConfig c = cfg;
  c.ic = ic;
  for (int r = 0; r < cfg.n; ++r) {
    switch (cfg.system) {
      case SystemKind::ReactionDiffusion:
        ds.records.push_back(make_rd_record(c, grid, r));
        break;
      case SystemKind::PrescribedTime:
        ds.records.push_back(make_pt_record(c, grid, r));
        break;
      case SystemKind::Traffic:
        ds.records.push_back(make_traffic_record(c, grid, r));
        break;
    }
  }
  compute_normalization(ds);
  return ds;
}

namespace {

ChannelStats finalize(double sum, double sq, std::size_t n) {
  ChannelStats s;
  s.mean = sum / n;
  const double var = std::max(sq / n - s.mean * s.mean, 0.0);
  s.stddev = std::sqrt(var);
  if (s.stddev < 1e-12) s.stddev = 1.0;
  return s;
}

}  // namespace

void compute_normalization(Dataset& ds) {
  if (ds.records.empty()) {
    ds.normalization = {};
    return;
  }
  const int C = ds.records[0].target.components;
  const int M = ds.records[0].measurements.channels();
  const int nx = ds.grid.nx;
  const std::size_t nl = ds.grid.n_levels();

  ds.normalization.ic_hat.resize(C);
  ds.normalization.measurement.resize(M);
  ds.normalization.target.resize(C);
  for (int c = 0; c < C; ++c) {
    double s = 0, q = 0;
    for (const auto& rec : ds.records)
      for (int i = 0; i < nx; ++i) {
        const double v = rec.ic_hat[c][i];
        s += v;
        q += v * v;
      }
    ds.normalization.ic_hat[c] = finalize(s, q, ds.records.size() * nx);
  }
  for (int m = 0; m < M; ++m) {
    double s = 0, q = 0;
    for (const auto& rec : ds.records)
      for (std::size_t k = 0; k < nl; ++k) {
        const double v = rec.measurements.at(m, static_cast<int>(k));
        s += v;
        q += v * v;
      }
    ds.normalization.measurement[m] = finalize(s, q, ds.records.size() * nl);
  }
  for (int c = 0; c < C; ++c) {
    double s = 0, q = 0;
    for (const auto& rec : ds.records)
      for (std::size_t k = 0; k < nl; ++k)
        for (int i = 0; i < nx; ++i) {
          const double v = rec.target.at(c, static_cast<int>(k), i);
          s += v;
          q += v * v;
        }
    ds.normalization.target[c] = finalize(s, q, ds.records.size() * nl * nx);
  }
}

namespace {

constexpr char kMagic[8] = {'N', 'O', 'B', 'S', 'D', 'S', '0', '1'};

json stats_to_json(const std::vector<ChannelStats>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back({{"mean", s.mean}, {"std", s.stddev}});
  return a;
}

std::vector<ChannelStats> stats_from_json(const json& a) {
  std::vector<ChannelStats> v;
  for (const auto& e : a) v.push_back({e.at("mean").get<double>(), e.at("std").get<double>()});
  return v;
}

void put_doubles(std::ofstream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
  const int C = ds.records.empty() ? 1 : ds.records[0].target.components;
  const int M = ds.records.empty()
                    ? 1
                    : ds.records[0].measurements.channels();
  const MeasurementKind mk = ds.records.empty() ? MeasurementKind::DirichletAt1
                                                : ds.records[0].measurements.kind;
  json h;
  h["system"] = system_name(ds.system);
  h["grid"] = {{"nx", ds.grid.nx}, {"dx", ds.grid.dx}, {"nt", ds.grid.nt}, {"dt", ds.grid.dt}};
  h["records"] = ds.records.size();
  h["components"] = C;
  h["measurement_kind"] = kind_name(mk);
  h["normalization"] = {{"ic_hat", stats_to_json(ds.normalization.ic_hat)},
                        {"measurement", stats_to_json(ds.normalization.measurement)},
                        {"target", stats_to_json(ds.normalization.target)}};
  json meta = json::array();
  for (const auto& rec : ds.records) {
    json m = json::object();
    for (const auto& [k, v] : rec.meta) m[k] = v;
    meta.push_back(std::move(m));
  }
  h["meta"] = std::move(meta);
  const std::string header = h.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 8);
  const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
  os.write(reinterpret_cast<const char*>(&hlen), 4);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& rec : ds.records) {
    for (const auto& comp : rec.ic_hat) put_doubles(os, comp.data(), comp.size());
    put_doubles(os, rec.measurements.values.data(), rec.measurements.values.size());
    put_doubles(os, rec.target.values.data(), rec.target.values.size());
  }
  if (!os) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (is.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
    throw BadMagic("not a dataset container: " + path);
  std::uint32_t hlen = 0;
  is.read(reinterpret_cast<char*>(&hlen), 4);
  if (is.gcount() != 4) throw TruncatedPayload("header length missing");
  std::string header(hlen, '\0');
  is.read(header.data(), hlen);
  if (is.gcount() != static_cast<std::streamsize>(hlen))
    throw TruncatedPayload("header truncated");

  json h;
  try {
    h = json::parse(header);
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header is not valid JSON: ") + e.what());
  }

  Dataset ds;
  try {
    ds.system = system_from(h.at("system").get<std::string>());
    const auto& g = h.at("grid");
    ds.grid = Grid(g.at("nx").get<int>(), g.at("dx").get<double>(), g.at("nt").get<int>(),
                   g.at("dt").get<double>());
    const std::size_t n = h.at("records").get<std::size_t>();
    const int C = h.at("components").get<int>();
    const MeasurementKind mk = kind_from(h.at("measurement_kind").get<std::string>());
    const auto& nz = h.at("normalization");
    ds.normalization.ic_hat = stats_from_json(nz.at("ic_hat"));
    ds.normalization.measurement = stats_from_json(nz.at("measurement"));
    ds.normalization.target = stats_from_json(nz.at("target"));
    const auto& meta = h.at("meta");
    if (meta.size() != n) throw HeaderMismatch("meta entries do not match record count");
    if (C < 1 || C > 2) throw HeaderMismatch("unsupported component count");

    const int nx = ds.grid.nx;
    const std::size_t nl = ds.grid.n_levels();
    const int M = mk == MeasurementKind::TrafficTriple ? 3 : 1;
    ds.records.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      DatasetRecord& rec = ds.records[r];
      rec.ic_hat.assign(C, std::vector<double>(nx));
      for (int c = 0; c < C; ++c) {
        is.read(reinterpret_cast<char*>(rec.ic_hat[c].data()), nx * sizeof(double));
        if (is.gcount() != static_cast<std::streamsize>(nx * sizeof(double)))
          throw TruncatedPayload("payload ends inside record " + std::to_string(r));
      }
      rec.measurements.kind = mk;
      rec.measurements.grid = ds.grid;
      rec.measurements.values.resize(M * nl);
      is.read(reinterpret_cast<char*>(rec.measurements.values.data()),
              static_cast<std::streamsize>(M * nl * sizeof(double)));
      if (is.gcount() != static_cast<std::streamsize>(M * nl * sizeof(double)))
        throw TruncatedPayload("payload ends inside record " + std::to_string(r));
      rec.target = Trajectory(ds.grid, C);
      is.read(reinterpret_cast<char*>(rec.target.values.data()),
              static_cast<std::streamsize>(rec.target.values.size() * sizeof(double)));
      if (is.gcount() !=
          static_cast<std::streamsize>(rec.target.values.size() * sizeof(double)))
        throw TruncatedPayload("payload ends inside record " + std::to_string(r));
      for (auto it = meta[r].begin(); it != meta[r].end(); ++it)
        rec.meta[it.key()] = it.value().get<double>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header field error: ") + e.what());
  }

  // Trailing bytes mean the header undercounts the payload.
  char extra;
  is.read(&extra, 1);
  if (is.gcount() == 1) throw HeaderMismatch("payload longer than header declares");
  return ds;
}

void write_arrays(const std::string& path,
                  const std::map<std::string, std::vector<double>>& arrays) {
  json h;
  h["kind"] = "arrays";
  json list = json::array();
  for (const auto& [name, vals] : arrays)
    list.push_back({{"name", name}, {"len", vals.size()}});
  h["arrays"] = std::move(list);
  const std::string header = h.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 8);
  const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
  os.write(reinterpret_cast<const char*>(&hlen), 4);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& [name, vals] : arrays) put_doubles(os, vals.data(), vals.size());
  if (!os) throw IoError("write failed: " + path);
}

std::map<std::string, std::vector<double>> read_arrays(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (is.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
    throw BadMagic("not a container file: " + path);
  std::uint32_t hlen = 0;
  is.read(reinterpret_cast<char*>(&hlen), 4);
  if (is.gcount() != 4) throw TruncatedPayload("header length missing");
  std::string header(hlen, '\0');
  is.read(header.data(), hlen);
  if (is.gcount() != static_cast<std::streamsize>(hlen))
    throw TruncatedPayload("header truncated");

  json h;
  try {
    h = json::parse(header);
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header is not valid JSON: ") + e.what());
  }
  if (!h.contains("kind") || h.at("kind").get<std::string>() != "arrays")
    throw HeaderMismatch("not an arrays container: " + path);

  std::map<std::string, std::vector<double>> out;
  try {
    for (const auto& e : h.at("arrays")) {
      const std::string name = e.at("name").get<std::string>();
      const std::size_t len = e.at("len").get<std::size_t>();
      std::vector<double> vals(len);
      is.read(reinterpret_cast<char*>(vals.data()),
              static_cast<std::streamsize>(len * sizeof(double)));
      if (is.gcount() != static_cast<std::streamsize>(len * sizeof(double)))
        throw TruncatedPayload("payload ends inside array " + name);
      out.emplace(name, std::move(vals));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw HeaderMismatch(std::string("header field error: ") + e.what());
  }

  char extra;
  is.read(&extra, 1);
  if (is.gcount() == 1) throw HeaderMismatch("payload longer than header declares");
  return out;
}

}  // namespace nobs
