#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nobs/dataset.hpp"
#include "nobs/fno.hpp"
#include "nobs/rng.hpp"

using namespace nobs;

namespace {

Grid small_grid() { return Grid(17, 1.0 / 16, 7, 0.125 / 7); }

Dataset small_dataset(int n, std::uint64_t seed) {
  GenerateConfig cfg;
  cfg.system = SystemKind::ReactionDiffusion;
  cfg.n = n;
  cfg.seed = seed;
  cfg.rd_params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  return generate_dataset(cfg, small_grid());
}

FnoConfig tiny_cfg() {
  FnoConfig cfg;
  cfg.n_layers = 2;
  cfg.width = 6;
  cfg.modes_x = 3;
  cfg.modes_t = 2;
  return cfg;
}

}  // namespace

TEST_CASE("feedforward mode set pairs low x bins with both t frequency corners") {
  FnoConfig cfg = tiny_cfg();  // modes_x = 3, modes_t = 2
  const long T = 8, Fx = 9;    // x_len 16 -> 9 one-sided bins
  auto idx = feedforward_mode_set(cfg, T, 16);
  // 2 low + 2 high t rows, 3 x bins each.
  REQUIRE(idx.size() == 4 * 3);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  for (long t : {0L, 1L, 6L, 7L})
    for (long k = 0; k < 3; ++k)
      CHECK(std::count(idx.begin(), idx.end(), t * Fx + k) == 1);
}

TEST_CASE("mode set covers every t row when modes_t reaches half the length") {
  FnoConfig cfg;
  cfg.modes_x = 16;
  cfg.modes_t = 16;
  auto idx = feedforward_mode_set(cfg, 32, 51);
  CHECK(idx.size() == 32 * 16);  // onesided(51) = 26 bins, 16 kept, all 32 rows
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());  // no duplicates
}

TEST_CASE("parameter registration is stable and complete") {
  FnoConfig cfg = tiny_cfg();
  cfg.in_channels = 4;
  auto p = init_feedforward_params(cfg, 8, 17, 0);
  // lift pair + 2 spectral layers (kernel, skip, bias) + projection pair.
  REQUIRE(p.names.size() == 4 + 3 * 2 + 4);
  CHECK(p.names.front() == "p1_w");
  CHECK(p.names[4] == "k0");
  CHECK(p.names[5] == "w0");
  CHECK(p.names[6] == "b0");
  CHECK(p.names.back() == "q2_b");
  // Same seed, same bytes; different seed, different bytes.
  auto q = init_feedforward_params(cfg, 8, 17, 0);
  for (std::size_t i = 0; i < p.tensors.size(); ++i)
    CHECK(p.tensors[i].data == q.tensors[i].data);
  auto r = init_feedforward_params(cfg, 8, 17, 1);
  CHECK(p.tensors[0].data != r.tensors[0].data);

  const auto& k0 = p.tensors[4];
  REQUIRE(k0.complex);
  const long kept = static_cast<long>(feedforward_mode_set(cfg, 8, 17).size());
  CHECK(k0.shape == std::vector<long>{kept, cfg.width, cfg.width});
}

TEST_CASE("feedforward apply maps batches through to output channels") {
  FnoConfig cfg = tiny_cfg();
  const long B = 2, T = 8, X = 17;
  cfg.in_channels = 4;
  auto params = init_feedforward_params(cfg, T, X, 3);
  Tape tape;
  std::vector<int> ids;
  for (auto& t : params.tensors) ids.push_back(tape.leaf(t, false));
  Tensor in = Tensor::zeros({B, T, X, cfg.in_channels});
  for (long i = 0; i < in.numel(); ++i) in.data[i] = rng::normal(5, 0, i);
  const int y = feedforward_apply(tape, cfg, ids, tape.leaf(in), T, X);
  CHECK(tape.value(y).shape == std::vector<long>{B, T, X, cfg.out_channels});
  // Deterministic.
  Tape tape2;
  std::vector<int> ids2;
  for (auto& t : params.tensors) ids2.push_back(tape2.leaf(t, false));
  const int y2 = feedforward_apply(tape2, cfg, ids2, tape2.leaf(in), T, X);
  CHECK(tape.value(y).data == tape2.value(y2).data);
}

TEST_CASE("model assembly sizes channels from the dataset") {
  auto ds = small_dataset(3, 41);
  auto m = make_feedforward_model(ds, tiny_cfg(), 7);
  // state component + measurement channel + x + t coordinates
  CHECK(m.cfg.in_channels == 1 + 1 + 2);
  CHECK(m.t_len == ds.grid.n_levels());
  CHECK(m.x_len == ds.grid.nx);
  CHECK(m.state_components == 1);
  CHECK(m.measurement_channels == 1);

  auto r = make_recurrent_model(ds, tiny_cfg(), 7);
  CHECK(r.cfg.in_channels == 1 + 1 + 1);
  CHECK(r.kind == FnoKind::Recurrent);
}

TEST_CASE("feedforward input stacks normalized channels with coordinates") {
  auto ds = small_dataset(2, 55);
  auto m = make_feedforward_model(ds, tiny_cfg(), 1);
  const auto& rec = ds.records[0];
  Tensor in = feedforward_input(m, rec, ds.grid);
  const long T = m.t_len, X = m.x_len, C = m.cfg.in_channels;
  REQUIRE(in.shape == std::vector<long>{T, X, C});  // batch axis added by callers

  const auto& mn = m.norm;
  for (long k = 0; k < T; ++k)
    for (long i = 0; i < X; ++i) {
      const double* row = in.data.data() + (k * X + i) * C;
      const double want_ic =
          (rec.ic_hat[0][i] - mn.ic_hat[0].mean) / mn.ic_hat[0].stddev;
      const double want_ms =
          (rec.measurements.values[k] - mn.measurement[0].mean) / mn.measurement[0].stddev;
      CHECK(row[0] == doctest::Approx(want_ic).epsilon(1e-15));
      CHECK(row[1] == doctest::Approx(want_ms).epsilon(1e-15));
      CHECK(row[2] == doctest::Approx(ds.grid.x(static_cast<int>(i)) / ds.grid.x_max()));
      CHECK(row[3] == doctest::Approx(ds.grid.t(static_cast<int>(k)) /
                                      (ds.grid.nt * ds.grid.dt)));
    }
}

TEST_CASE("prediction pins level zero to the record's initial estimate") {
  auto ds = small_dataset(2, 77);
  auto m = make_feedforward_model(ds, tiny_cfg(), 2);
  auto pred = feedforward_predict(m, ds.records[1], ds.grid);
  for (int i = 0; i < ds.grid.nx; ++i)
    CHECK(pred.at(0, 0, i) == ds.records[1].ic_hat[0][i]);
  // Later levels are actual (denormalized) network output: finite values.
  for (int i = 0; i < ds.grid.nx; ++i) CHECK(std::isfinite(pred.at(0, ds.grid.nt, i)));

  auto mr = make_recurrent_model(ds, tiny_cfg(), 2);
  auto pr = recurrent_predict(mr, ds.records[1], ds.grid);
  for (int i = 0; i < ds.grid.nx; ++i)
    CHECK(pr.at(0, 0, i) == ds.records[1].ic_hat[0][i]);
  for (int i = 0; i < ds.grid.nx; ++i) CHECK(std::isfinite(pr.at(0, ds.grid.nt, i)));
}

TEST_CASE("gradients flow through the assembled network") {
  // Small end-to-end finite-difference probe on a few parameter slots.
  FnoConfig cfg;
  cfg.n_layers = 1;
  cfg.width = 4;
  cfg.modes_x = 2;
  cfg.modes_t = 2;
  cfg.in_channels = 3;
  const long B = 1, T = 4, X = 9;
  auto params = init_feedforward_params(cfg, T, X, 9);

  Tensor in = Tensor::zeros({B, T, X, cfg.in_channels});
  for (long i = 0; i < in.numel(); ++i) in.data[i] = 0.3 * rng::normal(6, 1, i);
  Tensor target = Tensor::zeros({B, T, X, cfg.out_channels});
  for (long i = 0; i < target.numel(); ++i) target.data[i] = rng::normal(6, 2, i);

  auto loss_value = [&](const std::vector<Tensor>& ps) {
    Tape t;
    std::vector<int> ids;
    for (const auto& p : ps) ids.push_back(t.leaf(p, false));
    const int y = feedforward_apply(t, cfg, ids, t.leaf(in), T, X);
    const int l = t.rel_l2_batched(y, t.leaf(target));
    return t.value(l).data[0];
  };

  Tape tape;
  std::vector<int> ids;
  for (const auto& p : params.tensors) ids.push_back(tape.leaf(p, true));
  const int y = feedforward_apply(tape, cfg, ids, tape.leaf(in), T, X);
  tape.backward(tape.rel_l2_batched(y, tape.leaf(target)));

  const double h = 1e-5;
  int checked = 0;
  for (std::size_t pi = 0; pi < params.tensors.size(); pi += 2) {
    const long slot = static_cast<long>(pi) % std::max(1L, params.tensors[pi].storage());
    auto plus = params.tensors, minus = params.tensors;
    plus[pi].data[slot] += h;
    minus[pi].data[slot] -= h;
    const double fd = (loss_value(plus) - loss_value(minus)) / (2.0 * h);
    const double an = tape.grad(ids[pi]).data[slot];
    const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
    CHECK(std::abs(fd - an) / denom < 1e-5);
    ++checked;
  }
  CHECK(checked >= 4);
}
