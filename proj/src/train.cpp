#include "nobs/train.hpp"

#include <malloc.h>

#include <chrono>
#include <climits>
#include <cstdio>
#include <cstring>

#include "nobs/errors.hpp"
#include "nobs/rng.hpp"

namespace nobs {

namespace {

double znorm(double v, const ChannelStats& s) { return (v - s.mean) / s.stddev; }

// Deterministic Fisher-Yates keyed by (seed, epoch).
std::vector<int> shuffled(int n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const double u = rng::uniform01(seed, epoch, static_cast<std::uint64_t>(i));
    const int j = std::min(i, static_cast<int>(u * (i + 1)));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

Tensor stack(const std::vector<Tensor>& items, const std::vector<int>& order, int begin,
             int count) {
  std::vector<long> shape = items[order[begin]].shape;
  shape.insert(shape.begin(), count);
  Tensor out = Tensor::zeros(shape);
  const long per = items[order[begin]].numel();
  for (int r = 0; r < count; ++r)
    std::memcpy(out.data.data() + r * per, items[order[begin + r]].data.data(),
                sizeof(double) * per);
  return out;
}

struct Optimizer {
  std::vector<AdamState> states;
  AdamConfig base;

  explicit Optimizer(const FnoModel& m, const AdamConfig& cfg) : base(cfg) {
    for (const auto& p : m.params.tensors) states.push_back(AdamState::for_param(p));
  }

  void step(FnoModel& m, Tape& tape, const std::vector<int>& ids, double lr) {
    AdamConfig c = base;
    c.lr = lr;
    for (std::size_t i = 0; i < m.params.tensors.size(); ++i)
      adam_step(m.params.tensors[i], tape.grad(ids[i]), states[i], c);
  }
};

double schedule(const TrainConfig& cfg, int epoch) {
  if (cfg.lr_halve_every <= 0) return cfg.adam.lr;
  double lr = cfg.adam.lr;
  for (int e = cfg.lr_halve_every; e <= epoch; e += cfg.lr_halve_every) lr *= 0.5;
  return lr;
}

TrainResult run_epochs(FnoModel& m, const TrainConfig& cfg, int n_items,
                       const std::vector<Tensor>& inputs, const std::vector<Tensor>& labels,
                       const std::function<int(Tape&, const std::vector<int>&, int)>& apply,
                       const std::function<void(int, double)>& on_epoch) {
  Optimizer opt(m, cfg.adam);
  TrainResult res;
  const auto t0 = std::chrono::steady_clock::now();
  for (int e = 0; e < cfg.epochs; ++e) {
    const double lr = schedule(cfg, e);
    const auto order = shuffled(n_items, cfg.seed, static_cast<std::uint64_t>(e));
    double loss_sum = 0.0;
    for (int b = 0; b < n_items; b += cfg.batch) {
      const int count = std::min(cfg.batch, n_items - b);
      Tape tape;
      std::vector<int> ids;
      ids.reserve(m.params.tensors.size());
      for (const auto& p : m.params.tensors) ids.push_back(tape.leaf(p, true));
      const int in = tape.leaf(stack(inputs, order, b, count));
      const int pred = apply(tape, ids, in);
      const int lab = tape.leaf(stack(labels, order, b, count));
      const int loss = tape.rel_l2_batched(pred, lab);
      tape.backward(loss);
      opt.step(m, tape, ids, lr);
      loss_sum += tape.value(loss).data[0] * count;
    }
    const double epoch_loss = loss_sum / n_items;
    res.epoch_loss.push_back(epoch_loss);
    if (cfg.log_every > 0 && ((e + 1) % cfg.log_every == 0 || e == 0))
      std::printf("epoch %4d  loss %.6e  lr %.3e\n", e + 1, epoch_loss, lr);
    if (on_epoch) on_epoch(e, epoch_loss);
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

void retain_freed_buffers() {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, INT_MAX);
  mallopt(M_TRIM_THRESHOLD, INT_MAX);
#endif
}

TrainResult train_feedforward(FnoModel& m, const Dataset& train, const TrainConfig& cfg,
                              const std::function<void(int, double)>& on_epoch) {
  if (m.kind != FnoKind::Feedforward) throw KindMismatch("feedforward model expected");
  if (train.records.empty()) return {};
  retain_freed_buffers();
  if (m.x_len != train.grid.nx || m.t_len != static_cast<long>(train.grid.n_levels()))
    throw GridMismatch("dataset grid does not match the model");

  const int n = static_cast<int>(train.records.size());
  const long T = m.t_len, X = m.x_len;
  const int C = m.state_components;
  std::vector<Tensor> inputs, labels;
  inputs.reserve(n);
  labels.reserve(n);
  for (const auto& rec : train.records) {
    inputs.push_back(feedforward_input(m, rec, train.grid));
    Tensor lab = Tensor::zeros({T, X, C});
    for (int c = 0; c < C; ++c)
      for (long k = 0; k < T; ++k)
        for (long i = 0; i < X; ++i)
          lab.data[(k * X + i) * C + c] = znorm(
              rec.target.at(c, static_cast<int>(k), static_cast<int>(i)), m.norm.target[c]);
    labels.push_back(std::move(lab));
  }

  auto apply = [&m](Tape& tape, const std::vector<int>& ids, int in) {
    return feedforward_apply(tape, m.cfg, ids, in, m.t_len, m.x_len);
  };
  return run_epochs(m, cfg, n, inputs, labels, apply, on_epoch);
}

TrainResult train_recurrent(FnoModel& m, const Dataset& train, const TrainConfig& cfg,
                            const std::function<void(int, double)>& on_epoch) {
  if (m.kind != FnoKind::Recurrent) throw KindMismatch("recurrent model expected");
  if (train.records.empty()) return {};
  retain_freed_buffers();
  if (m.x_len != train.grid.nx) throw GridMismatch("dataset grid does not match the model");

  // Teacher forcing: every time-level transition of every record becomes one
  // training row; a batch is all transitions of `batch` records.
  const int n = static_cast<int>(train.records.size());
  const int nt = train.grid.nt;
  const long X = m.x_len;
  const int C = m.state_components;
  std::vector<Tensor> inputs, labels;
  inputs.reserve(static_cast<std::size_t>(n));
  labels.reserve(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> prev(C, std::vector<double>(X));
  for (const auto& rec : train.records) {
    // One tensor per record holding its nt transitions, stacked on axis 0;
    // records stay the shuffling unit.
    Tensor in = Tensor::zeros({nt, X, m.cfg.in_channels});
    Tensor lab = Tensor::zeros({nt, X, C});
    for (int k = 0; k < nt; ++k) {
      for (int c = 0; c < C; ++c)
        std::memcpy(prev[c].data(), rec.target.level(c, k), sizeof(double) * X);
      Tensor row = recurrent_input(m, prev, rec.measurements, k);
      std::memcpy(in.data.data() + static_cast<long>(k) * row.numel(), row.data.data(),
                  sizeof(double) * row.numel());
      for (int c = 0; c < C; ++c)
        for (long i = 0; i < X; ++i)
          lab.data[(static_cast<long>(k) * X + i) * C + c] =
              znorm(rec.target.at(c, k + 1, static_cast<int>(i)), m.norm.target[c]);
    }
    inputs.push_back(std::move(in));
    labels.push_back(std::move(lab));
  }

  auto apply = [&m, nt, X](Tape& tape, const std::vector<int>& ids, int in) {
    // Stacked record tensors arrive as [b, nt, x, c]; fold transitions into
    // the batch axis for the 1-d spatial net.
    const Tensor& t = tape.value(in);
    const long rows = t.dim(0) * nt;
    const int flat = tape.reshape(in, {rows, X, t.dim(3)});
    const int out = recurrent_apply(tape, m.cfg, ids, flat, X);
    return tape.reshape(out, {t.dim(0), static_cast<long>(nt), X,
                              static_cast<long>(m.cfg.out_channels)});
  };
  return run_epochs(m, cfg, n, inputs, labels, apply, on_epoch);
}

}  // namespace nobs
