#include "acp/nn.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "acp/errors.hpp"

namespace acp {

void MlpGrads::set_zero() {
  for (auto& m : w) m.setZero();
  for (auto& v : b) v.setZero();
}

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw DomainError("mlp: need at least input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw DomainError("mlp: layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_.emplace_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    b_.emplace_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

void Mlp::init_uniform_fanin(Rng& rng) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w_[l].cols()));
    for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
        w_[l](i, j) = rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index i = 0; i < b_[l].size(); ++i) b_[l](i) = rng.uniform(-bound, bound);
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Tape tape;
  return forward(x, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  if (x.cols() != sizes_.front()) {
    throw DomainError("mlp: input has " + std::to_string(x.cols()) + " columns, expected " +
                      std::to_string(sizes_.front()));
  }
  tape.inputs.clear();
  tape.pre.clear();
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    tape.inputs.push_back(a);
    Eigen::MatrixXd z = a * w_[l].transpose();
    z.rowwise() += b_[l].transpose();
    tape.pre.push_back(z);
    if (l + 1 < w_.size()) {
      a = z.cwiseMax(0.0);  // ReLU on hidden layers
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                              MlpGrads& grads) const {
  if (tape.inputs.size() != w_.size()) throw DomainError("mlp: tape does not match net");
  Eigen::MatrixXd g = grad_out;
  for (int l = static_cast<int>(w_.size()) - 1; l >= 0; --l) {
    if (l + 1 < static_cast<int>(w_.size())) {
      g = g.cwiseProduct((tape.pre[l].array() > 0.0).cast<double>().matrix());
    }
    grads.w[l].noalias() += g.transpose() * tape.inputs[l];
    grads.b[l] += g.colwise().sum().transpose();
    g = g * w_[l];
  }
  return g;
}

MlpGrads Mlp::make_grads() const {
  MlpGrads g;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    g.w.emplace_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
    g.b.emplace_back(Eigen::VectorXd::Zero(b_[l].size()));
  }
  return g;
}

void Mlp::soft_update_from(const Mlp& primary, double xi) {
  if (primary.sizes_ != sizes_) throw DomainError("soft update: shape mismatch");
  for (std::size_t l = 0; l < w_.size(); ++l) {
    w_[l] = xi * primary.w_[l] + (1.0 - xi) * w_[l];
    b_[l] = xi * primary.b_[l] + (1.0 - xi) * b_[l];
  }
}

void Mlp::write_params(std::ostream& out) const {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
        const double v = w_[l](i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
    for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
      const double v = b_[l](i);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

void Mlp::read_params(std::istream& in) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
        double v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        w_[l](i, j) = v;
      }
    }
    for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      b_[l](i) = v;
    }
  }
  if (!in) throw ParseError("checkpoint truncated while reading network parameters");
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    n += static_cast<std::size_t>(w_[l].size()) + static_cast<std::size_t>(b_[l].size());
  }
  return n;
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.make_grads()), v_(net.make_grads()) {}

void Adam::step(Mlp& net, const MlpGrads& grads) {
  if (m_.w.size() != grads.w.size()) throw DomainError("adam: gradient shape mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t l = 0; l < grads.w.size(); ++l) {
    m_.w[l] = beta1_ * m_.w[l] + (1.0 - beta1_) * grads.w[l];
    v_.w[l] = beta2_ * v_.w[l] + (1.0 - beta2_) * grads.w[l].cwiseProduct(grads.w[l]);
    net.weights()[l].array() -=
        lr_ * (m_.w[l].array() / bc1) / ((v_.w[l].array() / bc2).sqrt() + eps_);
    m_.b[l] = beta1_ * m_.b[l] + (1.0 - beta1_) * grads.b[l];
    v_.b[l] = beta2_ * v_.b[l] + (1.0 - beta2_) * grads.b[l].cwiseProduct(grads.b[l]);
    net.biases()[l].array() -=
        lr_ * (m_.b[l].array() / bc1) / ((v_.b[l].array() / bc2).sqrt() + eps_);
  }
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd y(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    Eigen::ArrayXd e = (z.row(i).array() - m).exp();
    y.row(i) = (e / e.sum()).matrix();
  }
  return y;
}

Eigen::MatrixXd softmax_backward_rows(const Eigen::MatrixXd& y,
                                      const Eigen::MatrixXd& grad_y) {
  Eigen::MatrixXd g(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double dot = y.row(i).dot(grad_y.row(i));
    g.row(i) = y.row(i).cwiseProduct(grad_y.row(i) - Eigen::RowVectorXd::Constant(y.cols(), dot));
  }
  return g;
}

}  // namespace acp
