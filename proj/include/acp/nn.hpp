#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "acp/rng.hpp"

namespace acp {

// Gradient (or moment) storage mirroring an Mlp's weight shapes.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  void set_zero();
};

// Fully connected net: rectified-linear hidden layers, linear output.
// Batched row-major interface (one sample per row). Backward is analytic;
// tests cross-check it against central finite differences.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);  // {in, hidden..., out}

  void init_uniform_fanin(Rng& rng);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(w_.size()); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  // Forward pass retaining per-layer inputs and pre-activations.
  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;  // activation entering each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  // Given dL/d(output), accumulates weight gradients into grads (which must
  // match shapes; see make_grads) and returns dL/d(input).
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                           MlpGrads& grads) const;

  MlpGrads make_grads() const;

  // target <- xi * primary + (1 - xi) * target, elementwise.
  void soft_update_from(const Mlp& primary, double xi);

  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }

  // Flat little-endian f64 serialization (row-major weight blocks, then the
  // bias, per layer). Shape information travels separately in the header.
  void write_params(std::ostream& out) const;
  void read_params(std::istream& in);
  std::size_t num_params() const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> w_;  // layer l: (sizes[l+1] x sizes[l])
  std::vector<Eigen::VectorXd> b_;
};

// First-order adaptive-moment optimizer (decoupled per network).
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(Mlp& net, const MlpGrads& grads);
  std::int64_t steps_taken() const { return t_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  MlpGrads m_, v_;
};

// Row-wise numerically stable softmax.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z);

// Backprop through row-wise softmax: given y = softmax(z) and dL/dy,
// returns dL/dz = (diag(y) - y y^T) dL/dy per row.
Eigen::MatrixXd softmax_backward_rows(const Eigen::MatrixXd& y,
                                      const Eigen::MatrixXd& grad_y);

}  // namespace acp
