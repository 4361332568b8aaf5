#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nobs/dataset.hpp"
#include "nobs/errors.hpp"

using namespace nobs;

namespace {

Grid rd_grid() { return Grid(31, 1.0 / 30, 25, 0.125 / 25); }

GenerateConfig rd_config(int n, std::uint64_t seed) {
  GenerateConfig cfg;
  cfg.system = SystemKind::ReactionDiffusion;
  cfg.n = n;
  cfg.seed = seed;
  cfg.rd_params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  return cfg;
}

GenerateConfig traffic_config(int n, std::uint64_t seed) {
  GenerateConfig cfg;
  cfg.system = SystemKind::Traffic;
  cfg.n = n;
  cfg.seed = seed;
  cfg.ic.family = IcFamily::TrafficPerturbation;
  cfg.arz_injection.kind = InjectionKind::None;
  return cfg;
}

Grid traffic_grid() {
  const int nx = 51;
  const double dx = 500.0 / (nx - 1);
  const double dt = 0.2;  // CFL 0.8 against 40 m/s
  return Grid(nx, dx, 150, dt);
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("generation is deterministic in the seed and shaped by the grid") {
  Grid g = rd_grid();
  auto ds1 = generate_dataset(rd_config(3, 7), g);
  auto ds2 = generate_dataset(rd_config(3, 7), g);
  auto ds3 = generate_dataset(rd_config(3, 8), g);

  REQUIRE(ds1.records.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto& rec = ds1.records[r];
    REQUIRE(rec.ic_hat.size() == 1);
    CHECK(rec.ic_hat[0].size() == static_cast<std::size_t>(g.nx));
    CHECK(rec.measurements.values.size() == g.n_levels());
    CHECK(rec.target.values.size() == g.n_levels() * g.nx);
    CHECK(rec.target.values == ds2.records[r].target.values);
    CHECK(rec.measurements.values == ds2.records[r].measurements.values);
  }
  CHECK(ds1.records[0].measurements.values != ds3.records[0].measurements.values);
  // Distinct records come from distinct draws.
  CHECK(ds1.records[0].measurements.values != ds1.records[1].measurements.values);
}

TEST_CASE("stored targets replay exactly through the observer") {
  Grid g = rd_grid();
  auto cfg = rd_config(2, 19);
  auto ds = generate_dataset(cfg, g);
  auto gain = ExponentialGain::sample(cfg.rd_params.alpha, cfg.rd_params.beta,
                                      cfg.rd_params.epsilon, g);
  for (const auto& rec : ds.records) {
    auto replay = run_observer_reaction_diffusion(rec.measurements, gain, cfg.rd_params, g,
                                                  rec.ic_hat[0], cfg.rd_scheme);
    CHECK(replay.values == rec.target.values);
  }
}

TEST_CASE("scalar records start the observer at zero") {
  Grid g = rd_grid();
  auto ds = generate_dataset(rd_config(1, 3), g);
  for (double v : ds.records[0].ic_hat[0]) CHECK(v == 0.0);
  for (int i = 0; i < g.nx; ++i) CHECK(ds.records[0].target.at(0, 0, i) == 0.0);
}

TEST_CASE("traffic records carry their sampled reference state in meta") {
  Grid g = traffic_grid();
  auto ds = generate_dataset(traffic_config(4, 5), g);
  REQUIRE(ds.records.size() == 4);
  double prev_rho = -1.0;
  for (const auto& rec : ds.records) {
    REQUIRE(rec.ic_hat.size() == 2);
    REQUIRE(rec.meta.count("rho_star") == 1);
    REQUIRE(rec.meta.count("v_star") == 1);
    const double rs = rec.meta.at("rho_star"), vs = rec.meta.at("v_star");
    CHECK(rs >= 0.110);
    CHECK(rs <= 0.130);
    CHECK(vs >= 10.0);
    CHECK(vs <= 12.0);
    CHECK(rs != prev_rho);  // fresh draw per record
    prev_rho = rs;
    // The observer starts at the sampled reference state.
    for (double v : rec.ic_hat[0]) CHECK(v == rs);
    for (double v : rec.ic_hat[1]) CHECK(v == vs);
    CHECK(rec.measurements.channels() == 3);
  }
}

TEST_CASE("normalization keeps constant channels harmless") {
  Grid g = rd_grid();
  auto ds = generate_dataset(rd_config(3, 2), g);
  REQUIRE(ds.normalization.ic_hat.size() == 1);
  REQUIRE(ds.normalization.measurement.size() == 1);
  REQUIRE(ds.normalization.target.size() == 1);
  // ic_hat is identically zero: mean 0, stddev defaulted to 1.
  CHECK(ds.normalization.ic_hat[0].mean == 0.0);
  CHECK(ds.normalization.ic_hat[0].stddev == 1.0);
  CHECK(ds.normalization.measurement[0].stddev > 1e-12);
  CHECK(ds.normalization.target[0].stddev > 1e-12);
}

TEST_CASE("the container round-trips bit-exactly") {
  for (int which = 0; which < 2; ++which) {
    Grid g = which == 0 ? rd_grid() : traffic_grid();
    auto ds = which == 0 ? generate_dataset(rd_config(3, 11), g)
                         : generate_dataset(traffic_config(2, 13), g);
    const std::string path = temp_path("nobs_roundtrip.bin");
    write_dataset(ds, path);
    auto back = read_dataset(path);

    CHECK(back.system == ds.system);
    CHECK(back.grid == ds.grid);
    REQUIRE(back.records.size() == ds.records.size());
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
      CHECK(back.records[r].ic_hat == ds.records[r].ic_hat);
      CHECK(back.records[r].measurements.values == ds.records[r].measurements.values);
      CHECK(back.records[r].measurements.kind == ds.records[r].measurements.kind);
      CHECK(back.records[r].target.values == ds.records[r].target.values);
      CHECK(back.records[r].meta == ds.records[r].meta);
    }
    REQUIRE(back.normalization.measurement.size() == ds.normalization.measurement.size());
    for (std::size_t c = 0; c < ds.normalization.measurement.size(); ++c) {
      CHECK(back.normalization.measurement[c].mean == ds.normalization.measurement[c].mean);
      CHECK(back.normalization.measurement[c].stddev ==
            ds.normalization.measurement[c].stddev);
    }
    std::remove(path.c_str());
  }
}

TEST_CASE("corrupted containers fail loudly and specifically") {
  Grid g = rd_grid();
  auto ds = generate_dataset(rd_config(1, 1), g);
  const std::string path = temp_path("nobs_corrupt.bin");
  write_dataset(ds, path);
  const auto good = slurp(path);
  REQUIRE(good.size() > 64);

  SUBCASE("wrong magic") {
    auto bad = good;
    bad[0] = 'X';
    spit(path, bad);
    CHECK_THROWS_AS(read_dataset(path), BadMagic);
  }
  SUBCASE("truncated payload") {
    auto bad = good;
    bad.resize(bad.size() - 9);
    spit(path, bad);
    CHECK_THROWS_AS(read_dataset(path), TruncatedPayload);
  }
  SUBCASE("trailing garbage") {
    auto bad = good;
    bad.push_back('\0');
    spit(path, bad);
    CHECK_THROWS_AS(read_dataset(path), HeaderMismatch);
  }
  SUBCASE("mangled header json") {
    auto bad = good;
    // First byte after magic+length is '{'; smash it.
    bad[12] = '?';
    spit(path, bad);
    CHECK_THROWS_AS(read_dataset(path), HeaderMismatch);
  }
  std::remove(path.c_str());
}

TEST_CASE("flux-measured records honor the gain clamp on a shortened grid") {
  GenerateConfig cfg;
  cfg.system = SystemKind::PrescribedTime;
  cfg.n = 2;
  cfg.seed = 23;
  cfg.rd_params = ReactionDiffusionParams::constant(1.0, 12.0);
  Grid g(26, 0.04, 99, 0.006);  // nt*dt = 0.594 = clamp
  auto ds = generate_dataset(cfg, g);
  REQUIRE(ds.records.size() == 2);
  CHECK(ds.records[0].measurements.kind == MeasurementKind::NeumannAt1);
  // The target is the observer trajectory (cold start), not the plant.
  CHECK(ds.records[0].target.at(0, 0, 13) == 0.0);
  // And the estimate ends up tracking something nonzero.
  double peak = 0.0;
  for (int i = 0; i < g.nx; ++i)
    peak = std::max(peak, std::abs(ds.records[0].target.at(0, g.nt, i)));
  CHECK(peak > 1e-4);
}

TEST_CASE("named-array dumps round trip and refuse to cross-read") {
  const std::string path = "arrays_io_test.bin";
  std::map<std::string, std::vector<double>> arrays;
  arrays["gain"] = {0.0, 1.5, -2.25, 1e-300, 3.141592653589793};
  arrays["x"] = {0.0, 0.5, 1.0};
  write_arrays(path, arrays);

  auto back = read_arrays(path);
  REQUIRE(back.size() == 2);
  REQUIRE(back.count("gain") == 1);
  REQUIRE(back.at("x").size() == 3);
  for (std::size_t i = 0; i < arrays["gain"].size(); ++i)
    CHECK(back.at("gain")[i] == arrays["gain"][i]);

  // A dataset reader must not accept an arrays file, and vice versa.
  CHECK_THROWS_AS(read_dataset(path), HeaderMismatch);
  std::remove(path.c_str());

  GenerateConfig cfg;
  cfg.n = 1;
  cfg.seed = 3;
  auto ds = generate_dataset(cfg, Grid(11, 0.1, 4, 0.125 / 4));
  write_dataset(ds, path);
  CHECK_THROWS_AS(read_arrays(path), HeaderMismatch);
  std::remove(path.c_str());
}
