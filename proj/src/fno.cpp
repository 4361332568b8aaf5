#include "nobs/fno.hpp"

#include <cmath>
#include <cstring>

#include "nobs/errors.hpp"
#include "nobs/fft.hpp"
#include "nobs/rng.hpp"

namespace nobs {

int FnoParams::add(const std::string& name, Tensor t) {
  names.push_back(name);
  tensors.push_back(std::move(t));
  return static_cast<int>(tensors.size()) - 1;
}

long FnoParams::total_storage() const {
  long s = 0;
  for (const auto& t : tensors) s += t.storage();
  return s;
}

std::vector<long> feedforward_mode_set(const FnoConfig& cfg, long t_len, long x_len) {
  const long fx = fft::onesided(static_cast<int>(x_len));
  const long kx = std::min<long>(cfg.modes_x, fx);
  // Low and high time frequencies (the two corner blocks of the half-plane
  // spectrum); at small t_len the blocks merge into the full range.
  const long lo_end = std::min<long>(cfg.modes_t, t_len);
  const long hi_begin = std::max<long>(t_len - cfg.modes_t, lo_end);
  std::vector<long> rows;
  for (long kt = 0; kt < lo_end; ++kt)
    for (long i = 0; i < kx; ++i) rows.push_back(kt * fx + i);
  for (long kt = hi_begin; kt < t_len; ++kt)
    for (long i = 0; i < kx; ++i) rows.push_back(kt * fx + i);
  return rows;
}

long recurrent_modes_kept(const FnoConfig& cfg, long x_len) {
  return std::min<long>(cfg.modes_x, fft::onesided(static_cast<int>(x_len)));
}

namespace {

Tensor init_normal(std::vector<long> shape, bool complex, double sd, std::uint64_t seed,
                   std::uint64_t stream) {
  Tensor t = Tensor::zeros(std::move(shape), complex);
  for (long i = 0; i < t.storage(); ++i)
    t.data[i] = sd * rng::normal(seed, stream, static_cast<std::uint64_t>(i));
  return t;
}

// Registration order is the checkpoint layout: lift pair, per-layer
// (spectral, mix, bias), projection pair.
FnoParams init_params(const FnoConfig& cfg, long kept, std::uint64_t seed) {
  if (cfg.in_channels <= 0 || cfg.out_channels <= 0 || cfg.width <= 0)
    throw ShapeMismatch("config needs positive channel counts and width");
  FnoParams p;
  const long w = cfg.width, cin = cfg.in_channels, cout = cfg.out_channels;
  std::uint64_t s = 0;
  p.add("p1_w", init_normal({cin, w}, false, std::sqrt(2.0 / cin), seed, s++));
  p.add("p1_b", Tensor::zeros({w}));
  s++;
  p.add("p2_w", init_normal({w, w}, false, std::sqrt(2.0 / w), seed, s++));
  p.add("p2_b", Tensor::zeros({w}));
  s++;
  for (int l = 0; l < cfg.n_layers; ++l) {
    p.add("k" + std::to_string(l),
          init_normal({kept, w, w}, true, 1.0 / static_cast<double>(w), seed, s++));
    p.add("w" + std::to_string(l), init_normal({w, w}, false, std::sqrt(2.0 / w), seed, s++));
    p.add("b" + std::to_string(l), Tensor::zeros({w}));
    s++;
  }
  p.add("q1_w", init_normal({w, w}, false, std::sqrt(2.0 / w), seed, s++));
  p.add("q1_b", Tensor::zeros({w}));
  s++;
  p.add("q2_w", init_normal({w, cout}, false, std::sqrt(2.0 / w), seed, s++));
  p.add("q2_b", Tensor::zeros({cout}));
  return p;
}

}  // namespace

FnoParams init_feedforward_params(const FnoConfig& cfg, long t_len, long x_len,
                                  std::uint64_t seed) {
  return init_params(cfg, static_cast<long>(feedforward_mode_set(cfg, t_len, x_len).size()),
                     seed);
}

FnoParams init_recurrent_params(const FnoConfig& cfg, long x_len, std::uint64_t seed) {
  return init_params(cfg, recurrent_modes_kept(cfg, x_len), seed);
}

namespace {

// ids layout mirrors init_params: 4 lift, 3 per layer, 4 projection.
struct Ids {
  int p1w, p1b, p2w, p2b, q1w, q1b, q2w, q2b;
  std::vector<int> k, w, b;
};

Ids split_ids(const FnoConfig& cfg, const std::vector<int>& ids) {
  if (static_cast<int>(ids.size()) != 8 + 3 * cfg.n_layers)
    throw ShapeMismatch("parameter id count does not match config");
  Ids s;
  int i = 0;
  s.p1w = ids[i++];
  s.p1b = ids[i++];
  s.p2w = ids[i++];
  s.p2b = ids[i++];
  for (int l = 0; l < cfg.n_layers; ++l) {
    s.k.push_back(ids[i++]);
    s.w.push_back(ids[i++]);
    s.b.push_back(ids[i++]);
  }
  s.q1w = ids[i++];
  s.q1b = ids[i++];
  s.q2w = ids[i++];
  s.q2b = ids[i++];
  return s;
}

int lift(Tape& t, const Ids& s, int x) {
  int h = t.relu(t.bias_add(t.channel_mix(x, s.p1w), s.p1b));
  return t.bias_add(t.channel_mix(h, s.p2w), s.p2b);
}

int project(Tape& t, const Ids& s, int h) {
  int q = t.relu(t.bias_add(t.channel_mix(h, s.q1w), s.q1b));
  return t.bias_add(t.channel_mix(q, s.q2w), s.q2b);
}

}  // namespace

int feedforward_apply(Tape& t, const FnoConfig& cfg, const std::vector<int>& param_ids,
                      int input, long t_len, long x_len) {
  const Ids s = split_ids(cfg, param_ids);
  const Tensor& in = t.value(input);
  if (in.rank() != 4 || in.dim(1) != t_len || in.dim(2) != x_len ||
      in.dim(3) != cfg.in_channels)
    throw ShapeMismatch("feedforward input must be [b, t, x, c]");
  const long B = in.dim(0);
  const long fx = fft::onesided(static_cast<int>(x_len));
  const auto rows = feedforward_mode_set(cfg, t_len, x_len);
  const long kept = static_cast<long>(rows.size());

  int h = lift(t, s, input);
  for (int l = 0; l < cfg.n_layers; ++l) {
    int spec = t.rfft_axis(h, 2);
    spec = t.cfft_axis(spec, 1, false);
    int flat = t.reshape(spec, {B, t_len * fx, cfg.width});
    int sel = t.gather_modes(flat, rows);
    int mixed = t.mode_mix(sel, s.k[l], kept);
    int scat = t.scatter_modes(mixed, t_len * fx, rows);
    int unflat = t.reshape(scat, {B, t_len, fx, cfg.width});
    unflat = t.cfft_axis(unflat, 1, true);
    int sp = t.irfft_axis(unflat, 2, x_len);
    int wp = t.bias_add(t.channel_mix(h, s.w[l]), s.b[l]);
    h = t.add(sp, wp);
    if (l + 1 < cfg.n_layers) h = t.relu(h);
  }
  return project(t, s, h);
}

int recurrent_apply(Tape& t, const FnoConfig& cfg, const std::vector<int>& param_ids,
                    int input, long x_len) {
  const Ids s = split_ids(cfg, param_ids);
  const Tensor& in = t.value(input);
  if (in.rank() != 3 || in.dim(1) != x_len || in.dim(2) != cfg.in_channels)
    throw ShapeMismatch("recurrent input must be [b, x, c]");
  const long kept = recurrent_modes_kept(cfg, x_len);

  int h = lift(t, s, input);
  for (int l = 0; l < cfg.n_layers; ++l) {
    int spec = t.rfft_axis(h, 1);
    int mixed = t.mode_mix(spec, s.k[l], kept);
    int sp = t.irfft_axis(mixed, 1, x_len);
    int wp = t.bias_add(t.channel_mix(h, s.w[l]), s.b[l]);
    h = t.add(sp, wp);
    if (l + 1 < cfg.n_layers) h = t.relu(h);
  }
  return project(t, s, h);
}

namespace {

int state_components(const Dataset& d) {
  return d.records.empty() ? 1 : d.records[0].target.components;
}

int measurement_channels(const Dataset& d) {
  return d.records.empty() ? 1 : d.records[0].measurements.channels();
}

double znorm(double v, const ChannelStats& s) { return (v - s.mean) / s.stddev; }

}  // namespace

FnoModel make_feedforward_model(const Dataset& train, const FnoConfig& cfg,
                                std::uint64_t seed) {
  FnoModel m;
  m.kind = FnoKind::Feedforward;
  m.system = train.system;
  m.t_len = static_cast<long>(train.grid.n_levels());
  m.x_len = train.grid.nx;
  m.state_components = state_components(train);
  m.measurement_channels = measurement_channels(train);
  m.cfg = cfg;
  m.cfg.in_channels = m.state_components + m.measurement_channels + 2;
  m.cfg.out_channels = m.state_components;
  m.norm = train.normalization;
  m.params = init_feedforward_params(m.cfg, m.t_len, m.x_len, seed);
  return m;
}

FnoModel make_recurrent_model(const Dataset& train, const FnoConfig& cfg, std::uint64_t seed) {
  FnoModel m;
  m.kind = FnoKind::Recurrent;
  m.system = train.system;
  m.t_len = static_cast<long>(train.grid.n_levels());
  m.x_len = train.grid.nx;
  m.state_components = state_components(train);
  m.measurement_channels = measurement_channels(train);
  m.cfg = cfg;
  m.cfg.in_channels = m.state_components + m.measurement_channels + 1;
  m.cfg.out_channels = m.state_components;
  m.norm = train.normalization;
  m.params = init_recurrent_params(m.cfg, m.x_len, seed);
  return m;
}

Tensor feedforward_input(const FnoModel& m, const DatasetRecord& rec, const Grid& grid) {
  const long T = m.t_len, X = m.x_len;
  const int C = m.state_components, M = m.measurement_channels;
  if (grid.nx != X || static_cast<long>(grid.n_levels()) != T)
    throw GridMismatch("record grid does not match the model");
  Tensor in = Tensor::zeros({T, X, m.cfg.in_channels});
  const double x_span = grid.x_max();
  const double t_span = grid.nt * grid.dt;
  for (long k = 0; k < T; ++k)
    for (long i = 0; i < X; ++i) {
      double* row = in.data.data() + (k * X + i) * m.cfg.in_channels;
      int ch = 0;
      for (int c = 0; c < C; ++c)
        row[ch++] = znorm(rec.ic_hat[c][i], m.norm.ic_hat[c]);
      for (int mc = 0; mc < M; ++mc)
        row[ch++] = znorm(rec.measurements.at(mc, static_cast<int>(k)),
                          m.norm.measurement[mc]);
      row[ch++] = grid.x(static_cast<int>(i)) / x_span;
      row[ch++] = grid.t(static_cast<int>(k)) / t_span;
    }
  return in;
}

Tensor recurrent_input(const FnoModel& m, const std::vector<std::vector<double>>& prev,
                       const MeasurementSeries& ms, int level) {
  const long X = m.x_len;
  const int C = m.state_components, M = m.measurement_channels;
  Tensor in = Tensor::zeros({X, m.cfg.in_channels});
  const double x_span = ms.grid.x_max();
  for (long i = 0; i < X; ++i) {
    double* row = in.data.data() + i * m.cfg.in_channels;
    int ch = 0;
    // Estimates live in target space, so they share the target statistics.
    for (int c = 0; c < C; ++c) row[ch++] = znorm(prev[c][i], m.norm.target[c]);
    for (int mc = 0; mc < M; ++mc) row[ch++] = znorm(ms.at(mc, level), m.norm.measurement[mc]);
    row[ch++] = ms.grid.x(static_cast<int>(i)) / x_span;
  }
  return in;
}

namespace {

std::vector<int> leaf_params(Tape& t, const FnoModel& m, bool requires_grad) {
  std::vector<int> ids;
  ids.reserve(m.params.tensors.size());
  for (const auto& p : m.params.tensors) ids.push_back(t.leaf(p, requires_grad));
  return ids;
}

}  // namespace

Trajectory feedforward_predict(const FnoModel& m, const DatasetRecord& rec, const Grid& grid) {
  if (m.kind != FnoKind::Feedforward) throw KindMismatch("feedforward model expected");
  Tape t;
  const std::vector<int> ids = leaf_params(t, m, false);
  Tensor in = feedforward_input(m, rec, grid);
  in.shape.insert(in.shape.begin(), 1);
  const int out = feedforward_apply(t, m.cfg, ids, t.leaf(std::move(in)), m.t_len, m.x_len);
  const Tensor& o = t.value(out);

  Trajectory traj(grid, m.state_components);
  const long T = m.t_len, X = m.x_len;
  for (int c = 0; c < m.state_components; ++c) {
    const ChannelStats& s = m.norm.target[c];
    for (long k = 0; k < T; ++k)
      for (long i = 0; i < X; ++i)
        traj.at(c, static_cast<int>(k), static_cast<int>(i)) =
            o.data[(k * X + i) * m.state_components + c] * s.stddev + s.mean;
  }
  // The initial level is known exactly; the net only predicts forward.
  for (int c = 0; c < m.state_components; ++c)
    std::memcpy(traj.level(c, 0), rec.ic_hat[c].data(), sizeof(double) * X);
  return traj;
}

Trajectory recurrent_predict(const FnoModel& m, const DatasetRecord& rec, const Grid& grid) {
  if (m.kind != FnoKind::Recurrent) throw KindMismatch("recurrent model expected");
  Trajectory traj(grid, m.state_components);
  std::vector<std::vector<double>> state = rec.ic_hat;
  for (int c = 0; c < m.state_components; ++c)
    std::memcpy(traj.level(c, 0), state[c].data(), sizeof(double) * m.x_len);

  for (int k = 0; k < grid.nt; ++k) {
    Tape t;
    const std::vector<int> ids = leaf_params(t, m, false);
    Tensor in = recurrent_input(m, state, rec.measurements, k);
    in.shape.insert(in.shape.begin(), 1);
    const int out = recurrent_apply(t, m.cfg, ids, t.leaf(std::move(in)), m.x_len);
    const Tensor& o = t.value(out);
    for (int c = 0; c < m.state_components; ++c) {
      const ChannelStats& s = m.norm.target[c];
      for (long i = 0; i < m.x_len; ++i)
        state[c][i] = o.data[i * m.state_components + c] * s.stddev + s.mean;
      std::memcpy(traj.level(c, k + 1), state[c].data(), sizeof(double) * m.x_len);
    }
  }
  return traj;
}

}  // namespace nobs
