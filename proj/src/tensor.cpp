#include "nobs/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstring>
#include <sstream>
#include <utility>

#include "nobs/errors.hpp"
#include "nobs/fft.hpp"

namespace nobs {

namespace {

using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RMc = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RM>;
using MapCRM = Eigen::Map<const RM>;
using MapRMc = Eigen::Map<RMc>;
using MapCRMc = Eigen::Map<const RMc>;
using StrideRM = Eigen::Map<RMc, 0, Eigen::OuterStride<>>;
using StrideCRM = Eigen::Map<const RMc, 0, Eigen::OuterStride<>>;

long product(const std::vector<long>& shape) {
  long p = 1;
  for (long d : shape) p *= d;
  return p;
}

struct AxisView {
  long outer = 1, n = 1, inner = 1;
};

AxisView axis_view(const std::vector<long>& shape, int axis) {
  if (axis < 0 || axis >= static_cast<int>(shape.size()))
    throw ShapeMismatch("axis out of range");
  AxisView v;
  for (int i = 0; i < axis; ++i) v.outer *= shape[i];
  v.n = shape[axis];
  for (int i = axis + 1; i < static_cast<int>(shape.size()); ++i) v.inner *= shape[i];
  return v;
}

// Repack [outer, n, inner] so the transform axis becomes contiguous:
// dst[(o*inner + j)*n + i] = src[(o*n + i)*inner + j]. Element unit is one
// double, or an interleaved pair when cplx.
void lines_from(const double* src, double* dst, const AxisView& v, bool cplx) {
  const long w = cplx ? 2 : 1;
  for (long o = 0; o < v.outer; ++o)
    for (long i = 0; i < v.n; ++i) {
      const double* s = src + ((o * v.n + i) * v.inner) * w;
      for (long j = 0; j < v.inner; ++j)
        std::memcpy(dst + ((o * v.inner + j) * v.n + i) * w, s + j * w,
                    sizeof(double) * w);
    }
}

// Inverse repack; add accumulates instead of overwriting.
void lines_to(const double* src, double* dst, const AxisView& v, bool cplx, bool add) {
  const long w = cplx ? 2 : 1;
  for (long o = 0; o < v.outer; ++o)
    for (long i = 0; i < v.n; ++i) {
      double* d = dst + ((o * v.n + i) * v.inner) * w;
      for (long j = 0; j < v.inner; ++j) {
        const double* s = src + ((o * v.inner + j) * v.n + i) * w;
        if (add)
          for (long u = 0; u < w; ++u) d[j * w + u] += s[u];
        else
          std::memcpy(d + j * w, s, sizeof(double) * w);
      }
    }
}

std::complex<double>* as_cplx(std::vector<double>& d) {
  return reinterpret_cast<std::complex<double>*>(d.data());
}
const std::complex<double>* as_cplx(const std::vector<double>& d) {
  return reinterpret_cast<const std::complex<double>*>(d.data());
}

void require_real(const Tensor& t, const char* what) {
  if (t.complex) throw ShapeMismatch(std::string(what) + ": real tensor expected");
}

}  // namespace

Tensor Tensor::zeros(std::vector<long> shape, bool complex) {
  Tensor t;
  t.shape = std::move(shape);
  t.complex = complex;
  t.data.assign(t.storage(), 0.0);
  return t;
}

Tensor Tensor::full(std::vector<long> shape, double value) {
  Tensor t = zeros(std::move(shape));
  for (double& d : t.data) d = value;
  return t;
}

Tensor Tensor::scalar(double value) { return full({1}, value); }

long Tensor::numel() const { return product(shape); }

long Tensor::dim(int axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank()) throw ShapeMismatch("dim: axis out of range");
  return shape[axis];
}

bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && a.complex == b.complex;
}

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << (t.complex ? "c[" : "[");
  for (std::size_t i = 0; i < t.shape.size(); ++i) os << (i ? "," : "") << t.shape[i];
  os << "]";
  return os.str();
}

int Tape::record(Tensor value, std::vector<int> parents, std::function<void(Tape&, int)> back) {
  Node node;
  node.back = std::move(back);
  for (int p : parents) node.needs_grad = node.needs_grad || nodes_[p].needs_grad;
  values_.push_back(std::move(value));
  parents_.push_back(std::move(parents));
  nodes_.push_back(std::move(node));
  return static_cast<int>(values_.size()) - 1;
}

void Tape::accumulate(int id, const double* g, long n) {
  if (!nodes_[id].needs_grad) return;
  Tensor& dst = grads_[id];
  if (dst.data.empty()) {
    dst.shape = values_[id].shape;
    dst.complex = values_[id].complex;
    dst.data.assign(values_[id].storage(), 0.0);
  }
  for (long i = 0; i < n; ++i) dst.data[i] += g[i];
}

int Tape::leaf(Tensor t, bool requires_grad) {
  Node node;
  node.needs_grad = requires_grad;
  values_.push_back(std::move(t));
  parents_.push_back({});
  nodes_.push_back(std::move(node));
  return static_cast<int>(values_.size()) - 1;
}

int Tape::add(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  if (!same_shape(ta, tb))
    throw ShapeMismatch("add: " + shape_str(ta) + " vs " + shape_str(tb));
  Tensor out = ta;
  for (long i = 0; i < out.storage(); ++i) out.data[i] += tb.data[i];
  return record(std::move(out), {a, b}, [a, b](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    t.accumulate(a, g.data.data(), g.storage());
    t.accumulate(b, g.data.data(), g.storage());
  });
}

int Tape::sub(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  if (!same_shape(ta, tb))
    throw ShapeMismatch("sub: " + shape_str(ta) + " vs " + shape_str(tb));
  Tensor out = ta;
  for (long i = 0; i < out.storage(); ++i) out.data[i] -= tb.data[i];
  return record(std::move(out), {a, b}, [a, b](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    t.accumulate(a, g.data.data(), g.storage());
    std::vector<double> neg(g.data.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -g.data[i];
    t.accumulate(b, neg.data(), g.storage());
  });
}

int Tape::mul_scalar(int a, double s) {
  Tensor out = values_[a];
  for (double& d : out.data) d *= s;
  return record(std::move(out), {a}, [a, s](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    std::vector<double> sg(g.data.size());
    for (std::size_t i = 0; i < sg.size(); ++i) sg[i] = s * g.data[i];
    t.accumulate(a, sg.data(), g.storage());
  });
}

int Tape::pointwise_mul(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  require_real(ta, "pointwise_mul");
  if (!same_shape(ta, tb))
    throw ShapeMismatch("pointwise_mul: " + shape_str(ta) + " vs " + shape_str(tb));
  Tensor out = ta;
  for (long i = 0; i < out.storage(); ++i) out.data[i] *= tb.data[i];
  return record(std::move(out), {a, b}, [a, b](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    const Tensor &va = t.values_[a], &vb = t.values_[b];
    std::vector<double> buf(g.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = g.data[i] * vb.data[i];
    t.accumulate(a, buf.data(), g.storage());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = g.data[i] * va.data[i];
    t.accumulate(b, buf.data(), g.storage());
  });
}

int Tape::channel_mix(int x, int w) {
  const Tensor &tx = values_[x], &tw = values_[w];
  require_real(tx, "channel_mix");
  require_real(tw, "channel_mix");
  if (tw.rank() != 2 || tx.rank() < 1 || tx.shape.back() != tw.shape[0])
    throw ShapeMismatch("channel_mix: " + shape_str(tx) + " vs " + shape_str(tw));
  const long cin = tw.shape[0], cout = tw.shape[1];
  const long n = tx.numel() / cin;
  Tensor out;
  out.shape = tx.shape;
  out.shape.back() = cout;
  out.data.resize(n * cout);
  MapCRM X(tx.data.data(), n, cin);
  MapCRM W(tw.data.data(), cin, cout);
  MapRM(out.data.data(), n, cout) = X * W;
  return record(std::move(out), {x, w}, [x, w, n, cin, cout](Tape& t, int id) {
    MapCRM G(t.grads_[id].data.data(), n, cout);
    MapCRM X(t.values_[x].data.data(), n, cin);
    MapCRM W(t.values_[w].data.data(), cin, cout);
    Tensor gx = Tensor::zeros(t.values_[x].shape);
    MapRM(gx.data.data(), n, cin) = G * W.transpose();
    t.accumulate(x, gx.data.data(), gx.storage());
    Tensor gw = Tensor::zeros(t.values_[w].shape);
    MapRM(gw.data.data(), cin, cout) = X.transpose() * G;
    t.accumulate(w, gw.data.data(), gw.storage());
  });
}

int Tape::bias_add(int x, int b) {
  const Tensor &tx = values_[x], &tb = values_[b];
  require_real(tx, "bias_add");
  require_real(tb, "bias_add");
  if (tb.rank() != 1 || tb.shape[0] != tx.shape.back())
    throw ShapeMismatch("bias_add: " + shape_str(tx) + " vs " + shape_str(tb));
  const long c = tb.shape[0];
  const long n = tx.numel() / c;
  Tensor out = tx;
  for (long r = 0; r < n; ++r)
    for (long i = 0; i < c; ++i) out.data[r * c + i] += tb.data[i];
  return record(std::move(out), {x, b}, [x, b, n, c](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    t.accumulate(x, g.data.data(), g.storage());
    std::vector<double> gb(c, 0.0);
    for (long r = 0; r < n; ++r)
      for (long i = 0; i < c; ++i) gb[i] += g.data[r * c + i];
    t.accumulate(b, gb.data(), c);
  });
}

int Tape::relu(int x) {
  const Tensor& tx = values_[x];
  require_real(tx, "relu");
  Tensor out = tx;
  for (double& d : out.data)
    if (d <= 0.0) d = 0.0;
  return record(std::move(out), {x}, [x](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    const Tensor& v = t.values_[x];
    std::vector<double> gx(g.data.size());
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = v.data[i] > 0.0 ? g.data[i] : 0.0;
    t.accumulate(x, gx.data(), g.storage());
  });
}

int Tape::mean(int x) {
  const Tensor& tx = values_[x];
  require_real(tx, "mean");
  const long n = tx.numel();
  double s = 0.0;
  for (double d : tx.data) s += d;
  return record(Tensor::scalar(s / n), {x}, [x, n](Tape& t, int id) {
    const double g = t.grads_[id].data[0] / n;
    std::vector<double> gx(n, g);
    t.accumulate(x, gx.data(), n);
  });
}

int Tape::mse(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  require_real(ta, "mse");
  if (!same_shape(ta, tb))
    throw ShapeMismatch("mse: " + shape_str(ta) + " vs " + shape_str(tb));
  const long n = ta.numel();
  double s = 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = ta.data[i] - tb.data[i];
    s += d * d;
  }
  return record(Tensor::scalar(s / n), {a, b}, [a, b, n](Tape& t, int id) {
    const double g = t.grads_[id].data[0] * 2.0 / n;
    const Tensor &va = t.values_[a], &vb = t.values_[b];
    std::vector<double> buf(n);
    for (long i = 0; i < n; ++i) buf[i] = g * (va.data[i] - vb.data[i]);
    t.accumulate(a, buf.data(), n);
    for (long i = 0; i < n; ++i) buf[i] = -buf[i];
    t.accumulate(b, buf.data(), n);
  });
}

namespace {

// Shared core for rel_l2 over flat ranges; returns the ratio and writes the
// two gradient contributions scaled by g0.
double rel_l2_value(const double* a, const double* b, long n, double* na_out, double* nb_out) {
  double sa = 0.0, sb = 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sa += d * d;
    sb += b[i] * b[i];
  }
  const double na = std::sqrt(sa), nb = std::sqrt(sb);
  if (nb < 1e-300) throw ZeroReference("rel_l2: reference norm is zero");
  *na_out = na;
  *nb_out = nb;
  return na / nb;
}

void rel_l2_grads(const double* a, const double* b, long n, double na, double nb, double g0,
                  double* ga, double* gb) {
  const double r = na / nb;
  const double inv = na > 0.0 ? g0 / (na * nb) : 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    ga[i] += inv * d;
    gb[i] += -inv * d - g0 * r * b[i] / (nb * nb);
  }
}

}  // namespace

int Tape::rel_l2(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  require_real(ta, "rel_l2");
  if (!same_shape(ta, tb))
    throw ShapeMismatch("rel_l2: " + shape_str(ta) + " vs " + shape_str(tb));
  const long n = ta.numel();
  double na, nb;
  const double r = rel_l2_value(ta.data.data(), tb.data.data(), n, &na, &nb);
  return record(Tensor::scalar(r), {a, b}, [a, b, n, na, nb](Tape& t, int id) {
    const double g0 = t.grads_[id].data[0];
    std::vector<double> ga(n, 0.0), gb(n, 0.0);
    rel_l2_grads(t.values_[a].data.data(), t.values_[b].data.data(), n, na, nb, g0, ga.data(),
                 gb.data());
    t.accumulate(a, ga.data(), n);
    t.accumulate(b, gb.data(), n);
  });
}

int Tape::rel_l2_batched(int a, int b) {
  const Tensor &ta = values_[a], &tb = values_[b];
  require_real(ta, "rel_l2_batched");
  if (!same_shape(ta, tb))
    throw ShapeMismatch("rel_l2_batched: " + shape_str(ta) + " vs " + shape_str(tb));
  if (ta.rank() < 2) throw ShapeMismatch("rel_l2_batched: needs a batch axis");
  const long nb_records = ta.shape[0];
  const long per = ta.numel() / nb_records;
  std::vector<double> nas(nb_records), nbs(nb_records);
  double sum = 0.0;
  for (long r = 0; r < nb_records; ++r)
    sum += rel_l2_value(ta.data.data() + r * per, tb.data.data() + r * per, per, &nas[r],
                        &nbs[r]);
  return record(Tensor::scalar(sum / nb_records), {a, b},
                [a, b, nb_records, per, nas, nbs](Tape& t, int id) {
                  const double g0 = t.grads_[id].data[0] / nb_records;
                  const long n = nb_records * per;
                  std::vector<double> ga(n, 0.0), gb(n, 0.0);
                  for (long r = 0; r < nb_records; ++r)
                    rel_l2_grads(t.values_[a].data.data() + r * per,
                                 t.values_[b].data.data() + r * per, per, nas[r], nbs[r], g0,
                                 ga.data() + r * per, gb.data() + r * per);
                  t.accumulate(a, ga.data(), n);
                  t.accumulate(b, gb.data(), n);
                });
}

int Tape::rfft_axis(int x, int axis) {
  const Tensor& tx = values_[x];
  require_real(tx, "rfft_axis");
  const AxisView v = axis_view(tx.shape, axis);
  const long n = v.n, m = fft::onesided(static_cast<int>(n));
  Tensor out;
  out.complex = true;
  out.shape = tx.shape;
  out.shape[axis] = m;
  out.data.assign(out.storage(), 0.0);

  std::vector<double> lines(v.outer * v.inner * n);
  lines_from(tx.data.data(), lines.data(), v, false);
  std::vector<std::complex<double>> spec(v.outer * v.inner * m);
  fft::forward_r2c(lines.data(), spec.data(), static_cast<int>(n),
                   static_cast<int>(v.outer * v.inner));
  AxisView vo = v;
  vo.n = m;
  lines_to(reinterpret_cast<const double*>(spec.data()), out.data.data(), vo, true, false);

  return record(std::move(out), {x}, [x, axis, v, m](Tape& t, int id) {
    // Adjoint of the one-sided unnormalized forward transform: zero-pad the
    // one-sided grad to n bins (no conjugate mirror), unnormalized inverse,
    // keep the real part.
    const Tensor& g = t.grads_[id];
    AxisView vo = v;
    vo.n = m;
    const long batch = v.outer * v.inner;
    std::vector<std::complex<double>> glines(batch * m);
    lines_from(g.data.data(), reinterpret_cast<double*>(glines.data()), vo, true);
    std::vector<std::complex<double>> full(batch * v.n, 0.0);
    for (long r = 0; r < batch; ++r)
      for (long i = 0; i < m; ++i) full[r * v.n + i] = glines[r * m + i];
    std::vector<std::complex<double>> inv(batch * v.n);
    fft::inverse_c2c(full.data(), inv.data(), static_cast<int>(v.n),
                     static_cast<int>(batch));
    std::vector<double> gx_lines(batch * v.n);
    for (long i = 0; i < batch * v.n; ++i)
      gx_lines[i] = inv[i].real() * static_cast<double>(v.n);
    Tensor gx = Tensor::zeros(t.values_[x].shape);
    lines_to(gx_lines.data(), gx.data.data(), v, false, false);
    t.accumulate(x, gx.data.data(), gx.storage());
  });
}

int Tape::irfft_axis(int x, int axis, long n) {
  const Tensor& tx = values_[x];
  if (!tx.complex) throw ShapeMismatch("irfft_axis: complex tensor expected");
  const AxisView v = axis_view(tx.shape, axis);
  const long m = fft::onesided(static_cast<int>(n));
  if (v.n != m) throw ShapeMismatch("irfft_axis: bin count does not match target length");
  Tensor out;
  out.shape = tx.shape;
  out.shape[axis] = n;
  out.data.assign(out.storage(), 0.0);

  const long batch = v.outer * v.inner;
  std::vector<std::complex<double>> lines(batch * m);
  lines_from(tx.data.data(), reinterpret_cast<double*>(lines.data()), v, true);
  std::vector<double> real_lines(batch * n);
  fft::inverse_c2r(lines.data(), real_lines.data(), static_cast<int>(n),
                   static_cast<int>(batch));
  AxisView vo = v;
  vo.n = n;
  lines_to(real_lines.data(), out.data.data(), vo, false, false);

  return record(std::move(out), {x}, [x, axis, v, n, m](Tape& t, int id) {
    // Adjoint of the normalized one-sided inverse: forward r2c of the grad,
    // scaled 2/n, with the self-conjugate bins (0 and Nyquist) halved.
    const Tensor& g = t.grads_[id];
    AxisView vo = v;
    vo.n = n;
    const long batch = v.outer * v.inner;
    std::vector<double> glines(batch * n);
    lines_from(g.data.data(), glines.data(), vo, false);
    std::vector<std::complex<double>> spec(batch * m);
    fft::forward_r2c(glines.data(), spec.data(), static_cast<int>(n),
                     static_cast<int>(batch));
    const double s = 2.0 / static_cast<double>(n);
    const bool even = (n % 2) == 0;
    for (long r = 0; r < batch; ++r)
      for (long i = 0; i < m; ++i) {
        double w = s;
        if (i == 0 || (even && i == m - 1)) w *= 0.5;
        spec[r * m + i] *= w;
      }
    Tensor gx = Tensor::zeros(t.values_[x].shape, true);
    lines_to(reinterpret_cast<const double*>(spec.data()), gx.data.data(), v, true, false);
    t.accumulate(x, gx.data.data(), gx.storage());
  });
}

int Tape::cfft_axis(int x, int axis, bool inverse) {
  const Tensor& tx = values_[x];
  if (!tx.complex) throw ShapeMismatch("cfft_axis: complex tensor expected");
  const AxisView v = axis_view(tx.shape, axis);
  const long batch = v.outer * v.inner;
  Tensor out = Tensor::zeros(tx.shape, true);

  std::vector<std::complex<double>> lines(batch * v.n), spec(batch * v.n);
  lines_from(tx.data.data(), reinterpret_cast<double*>(lines.data()), v, true);
  if (inverse)
    fft::inverse_c2c(lines.data(), spec.data(), static_cast<int>(v.n),
                     static_cast<int>(batch));
  else
    fft::forward_c2c(lines.data(), spec.data(), static_cast<int>(v.n),
                     static_cast<int>(batch));
  lines_to(reinterpret_cast<const double*>(spec.data()), out.data.data(), v, true, false);

  return record(std::move(out), {x}, [x, v, inverse](Tape& t, int id) {
    // DFT matrix is symmetric, so the pair-adjoint of the forward transform
    // is the unnormalized inverse and vice versa.
    const Tensor& g = t.grads_[id];
    const long batch = v.outer * v.inner;
    std::vector<std::complex<double>> glines(batch * v.n), res(batch * v.n);
    lines_from(g.data.data(), reinterpret_cast<double*>(glines.data()), v, true);
    if (inverse) {
      fft::forward_c2c(glines.data(), res.data(), static_cast<int>(v.n),
                       static_cast<int>(batch));
      const double s = 1.0 / static_cast<double>(v.n);
      for (auto& c : res) c *= s;
    } else {
      fft::inverse_c2c(glines.data(), res.data(), static_cast<int>(v.n),
                       static_cast<int>(batch));
      for (auto& c : res) c *= static_cast<double>(v.n);
    }
    Tensor gx = Tensor::zeros(t.values_[x].shape, true);
    lines_to(reinterpret_cast<const double*>(res.data()), gx.data.data(), v, true, false);
    t.accumulate(x, gx.data.data(), gx.storage());
  });
}

int Tape::mode_mix(int ct, int k, long modes_keep) {
  const Tensor &tc = values_[ct], &tk = values_[k];
  if (!tc.complex || !tk.complex) throw ShapeMismatch("mode_mix: complex tensors expected");
  if (tc.rank() != 3 || tk.rank() != 3)
    throw ShapeMismatch("mode_mix: [b,m,cin] and [mk,cin,cout] expected");
  const long B = tc.shape[0], M = tc.shape[1], cin = tc.shape[2];
  const long mk = tk.shape[0], cout = tk.shape[2];
  if (tk.shape[1] != cin || modes_keep != mk || mk > M)
    throw ShapeMismatch("mode_mix: " + shape_str(tc) + " vs " + shape_str(tk));

  Tensor out = Tensor::zeros({B, M, cout}, true);
  const auto* cp = as_cplx(tc.data);
  const auto* kp = as_cplx(tk.data);
  auto* op = as_cplx(out.data);
  for (long j = 0; j < mk; ++j) {
    StrideCRM In(cp + j * cin, B, cin, Eigen::OuterStride<>(M * cin));
    MapCRMc K(kp + j * cin * cout, cin, cout);
    StrideRM Out(op + j * cout, B, cout, Eigen::OuterStride<>(M * cout));
    Out = In * K;
  }
  return record(std::move(out), {ct, k}, [ct, k, B, M, cin, cout, mk](Tape& t, int id) {
    const auto* gp = as_cplx(t.grads_[id].data);
    const auto* cp = as_cplx(t.values_[ct].data);
    const auto* kp = as_cplx(t.values_[k].data);
    Tensor gc = Tensor::zeros(t.values_[ct].shape, true);
    Tensor gk = Tensor::zeros(t.values_[k].shape, true);
    auto* gcp = as_cplx(gc.data);
    auto* gkp = as_cplx(gk.data);
    for (long j = 0; j < mk; ++j) {
      StrideCRM G(gp + j * cout, B, cout, Eigen::OuterStride<>(M * cout));
      StrideCRM In(cp + j * cin, B, cin, Eigen::OuterStride<>(M * cin));
      MapCRMc K(kp + j * cin * cout, cin, cout);
      StrideRM Gc(gcp + j * cin, B, cin, Eigen::OuterStride<>(M * cin));
      Gc = G * K.adjoint();
      MapRMc Gk(gkp + j * cin * cout, cin, cout);
      Gk = In.adjoint() * G;
    }
    t.accumulate(ct, gc.data.data(), gc.storage());
    t.accumulate(k, gk.data.data(), gk.storage());
  });
}

int Tape::gather_modes(int x, std::vector<long> idx) {
  const Tensor& tx = values_[x];
  if (tx.rank() != 3) throw ShapeMismatch("gather_modes: [b,m,c] expected");
  const long B = tx.shape[0], M = tx.shape[1], C = tx.shape[2];
  for (long j : idx)
    if (j < 0 || j >= M) throw ShapeMismatch("gather_modes: index out of range");
  const long K = static_cast<long>(idx.size());
  const long w = tx.complex ? 2 : 1;
  Tensor out = Tensor::zeros({B, K, C}, tx.complex);
  for (long b = 0; b < B; ++b)
    for (long r = 0; r < K; ++r)
      std::memcpy(out.data.data() + ((b * K + r) * C) * w,
                  tx.data.data() + ((b * M + idx[r]) * C) * w, sizeof(double) * C * w);
  return record(std::move(out), {x}, [x, idx, B, M, C, K, w](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    Tensor gx = Tensor::zeros(t.values_[x].shape, t.values_[x].complex);
    for (long b = 0; b < B; ++b)
      for (long r = 0; r < K; ++r) {
        double* d = gx.data.data() + ((b * M + idx[r]) * C) * w;
        const double* s = g.data.data() + ((b * K + r) * C) * w;
        for (long i = 0; i < C * w; ++i) d[i] += s[i];
      }
    t.accumulate(x, gx.data.data(), gx.storage());
  });
}

int Tape::scatter_modes(int x, long m, std::vector<long> idx) {
  const Tensor& tx = values_[x];
  if (tx.rank() != 3) throw ShapeMismatch("scatter_modes: [b,k,c] expected");
  const long B = tx.shape[0], K = tx.shape[1], C = tx.shape[2];
  if (K != static_cast<long>(idx.size()))
    throw ShapeMismatch("scatter_modes: index count does not match rows");
  for (long j : idx)
    if (j < 0 || j >= m) throw ShapeMismatch("scatter_modes: index out of range");
  const long w = tx.complex ? 2 : 1;
  Tensor out = Tensor::zeros({B, m, C}, tx.complex);
  for (long b = 0; b < B; ++b)
    for (long r = 0; r < K; ++r)
      std::memcpy(out.data.data() + ((b * m + idx[r]) * C) * w,
                  tx.data.data() + ((b * K + r) * C) * w, sizeof(double) * C * w);
  return record(std::move(out), {x}, [x, idx, B, m, C, K, w](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    Tensor gx = Tensor::zeros(t.values_[x].shape, t.values_[x].complex);
    for (long b = 0; b < B; ++b)
      for (long r = 0; r < K; ++r)
        std::memcpy(gx.data.data() + ((b * K + r) * C) * w,
                    g.data.data() + ((b * m + idx[r]) * C) * w, sizeof(double) * C * w);
    t.accumulate(x, gx.data.data(), gx.storage());
  });
}

int Tape::reshape(int x, std::vector<long> shape) {
  const Tensor& tx = values_[x];
  if (product(shape) != tx.numel())
    throw ShapeMismatch("reshape: element count mismatch");
  Tensor out = tx;
  out.shape = std::move(shape);
  return record(std::move(out), {x}, [x](Tape& t, int id) {
    const Tensor& g = t.grads_[id];
    t.accumulate(x, g.data.data(), g.storage());
  });
}

void Tape::backward(int loss) {
  const Tensor& tl = values_[loss];
  if (tl.complex || tl.numel() != 1) throw NotScalarLoss("backward: loss must be a real scalar");
  grads_.assign(values_.size(), Tensor{});
  if (!nodes_[loss].needs_grad) return;  // nothing requires grad
  grads_[loss] = Tensor::scalar(1.0);
  for (int id = loss; id >= 0; --id) {
    if (grads_[id].data.empty() || !nodes_[id].back) continue;
    nodes_[id].back(*this, id);
  }
  // Leaves that require grad but were never reached read as zeros.
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (nodes_[i].needs_grad && grads_[i].data.empty()) {
      grads_[i].shape = values_[i].shape;
      grads_[i].complex = values_[i].complex;
      grads_[i].data.assign(values_[i].storage(), 0.0);
    }
}

}  // namespace nobs
