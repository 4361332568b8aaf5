#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nobs {

// Dense f64 tensor. Complex tensors store interleaved (re, im) pairs and
// report their logical element count through numel(); storage() is what the
// flat buffer actually holds.
struct Tensor {
  std::vector<long> shape;
  bool complex = false;
  std::vector<double> data;

  Tensor() = default;
  static Tensor zeros(std::vector<long> shape, bool complex = false);
  static Tensor full(std::vector<long> shape, double value);
  static Tensor scalar(double value);

  long numel() const;
  long storage() const { return complex ? 2 * numel() : numel(); }
  long dim(int axis) const;
  int rank() const { return static_cast<int>(shape.size()); }

  double& at(long flat) { return data[flat]; }
  double at(long flat) const { return data[flat]; }
  std::complex<double> cplx(long flat) const {
    return {data[2 * flat], data[2 * flat + 1]};
  }
};

bool same_shape(const Tensor& a, const Tensor& b);
std::string shape_str(const Tensor& t);

// Reverse-mode tape. Values are immutable once recorded; backward() seeds
// the scalar loss with 1 and walks the nodes in reverse. Gradients share the
// storage convention of their tensors (complex grads are interleaved pairs,
// i.e. plain partials with respect to each real slot).
class Tape {
 public:
  int leaf(Tensor t, bool requires_grad = false);

  int add(int a, int b);
  int sub(int a, int b);
  int mul_scalar(int a, double s);
  int pointwise_mul(int a, int b);
  // x[..., cin] times w[cin, cout] -> [..., cout]; real tensors.
  int channel_mix(int x, int w);
  // x[..., c] plus b[c] broadcast over leading axes.
  int bias_add(int x, int b);
  int relu(int x);  // subgradient at 0 is 0
  int mean(int x);
  int mse(int a, int b);
  // sqrt(sum (a-b)^2) / sqrt(sum b^2); ZeroReference if the denominator
  // vanishes. rel_l2 reduces the whole tensor; the batched variant treats
  // axis 0 as records and averages the per-record ratios.
  int rel_l2(int a, int b);
  int rel_l2_batched(int a, int b);

  // Unnormalized forward DFT of a real tensor along `axis`; one-sided
  // output, dim(axis) -> dim(axis)/2+1.
  int rfft_axis(int x, int axis);
  // One-sided inverse along `axis` back to n real samples, carries 1/n.
  int irfft_axis(int x, int axis, long n);
  // Complex-to-complex along `axis`; inverse carries 1/n.
  int cfft_axis(int x, int axis, bool inverse);

  // ct[b, m, cin] (complex) with weights k[mk, cin, cout] (complex):
  // out[b, j, :] = ct[b, j, :] * k[j] for j < mk, zero for j >= mk.
  int mode_mix(int ct, int k, long modes_keep);
  // Mode-set selection along axis 1: gather picks rows, scatter places them
  // back into a zero tensor of m rows. Both are linear, adjoint of each other.
  int gather_modes(int x, std::vector<long> idx);
  int scatter_modes(int x, long m, std::vector<long> idx);

  int reshape(int x, std::vector<long> shape);

  const Tensor& value(int id) const { return values_[id]; }
  // Valid after backward(); zero tensor for nodes the loss does not reach.
  const Tensor& grad(int id) const { return grads_[id]; }

  void backward(int loss);  // NotScalarLoss unless numel()==1 and real

  int size() const { return static_cast<int>(values_.size()); }

 private:
  struct Node {
    std::function<void(Tape&, int)> back;  // accumulate into parents
    bool needs_grad = false;
  };
  int record(Tensor value, std::vector<int> parents,
             std::function<void(Tape&, int)> back);
  void accumulate(int id, const double* g, long n);

  std::vector<Tensor> values_;
  std::vector<Tensor> grads_;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> parents_;
};

}  // namespace nobs
