#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "acp/errors.hpp"
#include "acp/nn.hpp"
#include "acp/replay.hpp"

using namespace acp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int r, int c, Rng& rng) {
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

// scalar probe loss: L = sum(output .* probe)
double probe_loss(const Mlp& net, const MatrixXd& x, const MatrixXd& probe) {
  return (net.forward(x).array() * probe.array()).sum();
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("analytic weight gradients match central differences") {
  Rng rng(11);
  Mlp net({4, 8, 8, 3});
  net.init_uniform_fanin(rng);
  const MatrixXd x = random_matrix(5, 4, rng);
  const MatrixXd probe = random_matrix(5, 3, rng);

  Mlp::Tape tape;
  net.forward(x, tape);
  MlpGrads grads = net.make_grads();
  const MatrixXd dx = net.backward(tape, probe, grads);

  const double h = 1e-6;
  double worst = 0;
  for (int layer = 0; layer < net.num_layers(); ++layer) {
    MatrixXd& w = net.weights()[layer];
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) {
        const double keep = w(i, j);
        w(i, j) = keep + h;
        const double up = probe_loss(net, x, probe);
        w(i, j) = keep - h;
        const double dn = probe_loss(net, x, probe);
        w(i, j) = keep;
        const double fd = (up - dn) / (2 * h);
        const double err = std::abs(grads.w[layer](i, j) - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
      }
    }
    VectorXd& b = net.biases()[layer];
    for (int i = 0; i < b.size(); ++i) {
      const double keep = b(i);
      b(i) = keep + h;
      const double up = probe_loss(net, x, probe);
      b(i) = keep - h;
      const double dn = probe_loss(net, x, probe);
      b(i) = keep;
      const double fd = (up - dn) / (2 * h);
      worst = std::max(worst, std::abs(grads.b[layer](i) - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  CHECK(worst < 1e-6);

  // input gradients too (the actor update differentiates the critic's input)
  double worst_in = 0;
  MatrixXd xp = x;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double keep = xp(i, j);
      xp(i, j) = keep + h;
      const double up = probe_loss(net, xp, probe);
      xp(i, j) = keep - h;
      const double dn = probe_loss(net, xp, probe);
      xp(i, j) = keep;
      const double fd = (up - dn) / (2 * h);
      worst_in = std::max(worst_in, std::abs(dx(i, j) - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  CHECK(worst_in < 1e-6);
}

TEST_CASE("softmax rows: simplex output and exact backward") {
  Rng rng(23);
  const MatrixXd z = 10.0 * random_matrix(6, 4, rng);
  const MatrixXd y = softmax_rows(z);
  for (int i = 0; i < y.rows(); ++i) {
    CHECK(y.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < y.cols(); ++j) CHECK(y(i, j) > 0);
  }
  // invariance to per-row shifts
  const MatrixXd zs = z.colwise() - z.rowwise().maxCoeff();
  CHECK((softmax_rows(zs) - y).cwiseAbs().maxCoeff() < 1e-14);

  const MatrixXd gy = random_matrix(6, 4, rng);
  const MatrixXd gz = softmax_backward_rows(y, gy);
  const double h = 1e-6;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 4; ++j) {
      MatrixXd zp = z;
      zp(i, j) += h;
      const double up = (softmax_rows(zp).array() * gy.array()).sum();
      zp(i, j) -= 2 * h;
      const double dn = (softmax_rows(zp).array() * gy.array()).sum();
      const double fd = (up - dn) / (2 * h);
      CHECK(gz(i, j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("adam fits a linear map") {
  Rng rng(7);
  Mlp net({2, 1});
  net.init_uniform_fanin(rng);
  Adam opt(net, 1e-2);
  const MatrixXd x = random_matrix(64, 2, rng);
  MatrixXd target = 3.0 * x.col(0) - 2.0 * x.col(1);
  target.array() += 1.0;

  double first_loss = -1;
  double loss = 0;
  for (int it = 0; it < 2000; ++it) {
    Mlp::Tape tape;
    const MatrixXd out = net.forward(x, tape);
    const MatrixXd diff = out - target;
    loss = diff.squaredNorm() / x.rows();
    if (first_loss < 0) first_loss = loss;
    MlpGrads g = net.make_grads();
    net.backward(tape, 2.0 * diff / x.rows(), g);
    opt.step(net, g);
  }
  CHECK(loss < first_loss / 1e4);
  CHECK(net.weights()[0](0, 0) == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(net.weights()[0](0, 1) == doctest::Approx(-2.0).epsilon(1e-2));
  CHECK(net.biases()[0](0) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(opt.steps_taken() == 2000);
}

TEST_CASE("soft updates converge geometrically") {
  Rng rng(3);
  Mlp primary({3, 4, 2});
  primary.init_uniform_fanin(rng);
  Mlp target({3, 4, 2});
  for (auto& w : target.weights()) w.setZero();
  for (auto& b : target.biases()) b.setZero();

  const double xi = 0.01;
  const int n = 50;
  for (int i = 0; i < n; ++i) target.soft_update_from(primary, xi);
  const double blend = 1.0 - std::pow(1.0 - xi, n);
  for (int l = 0; l < primary.num_layers(); ++l) {
    const MatrixXd expect = blend * primary.weights()[l];
    CHECK((target.weights()[l] - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("parameter serialization round trips bit-for-bit") {
  Rng rng(19);
  Mlp net({5, 16, 16, 4});
  net.init_uniform_fanin(rng);
  std::stringstream buf;
  net.write_params(buf);

  Mlp copy({5, 16, 16, 4});
  copy.read_params(buf);
  const MatrixXd x = random_matrix(3, 5, rng);
  const MatrixXd a = net.forward(x);
  const MatrixXd b = copy.forward(x);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(net.num_params() == 5 * 16 + 16 + 16 * 16 + 16 + 16 * 4 + 4);
}

TEST_CASE("fan-in initialization stays in its envelope and is seeded") {
  Rng a(4), b(4), c(5);
  Mlp m1({10, 20, 3}), m2({10, 20, 3}), m3({10, 20, 3});
  m1.init_uniform_fanin(a);
  m2.init_uniform_fanin(b);
  m3.init_uniform_fanin(c);
  CHECK((m1.weights()[0] - m2.weights()[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m1.weights()[0] - m3.weights()[0]).cwiseAbs().maxCoeff() > 0.0);
  CHECK(m1.weights()[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(10.0));
  CHECK(m1.weights()[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(20.0));
}

TEST_CASE("replay buffer is a FIFO ring with uniform sampling") {
  ReplayBuffer buf(4, 2, 1);
  Rng rng(2);
  for (int i = 0; i < 6; ++i) {
    VectorXd s(2), a(1), ns(2);
    s << i, i;
    a << i;
    ns << i + 1, i + 1;
    buf.add(s, a, i, ns);
  }
  CHECK(buf.size() == 4);
  CHECK(buf.capacity() == 4);
  // the two oldest transitions were evicted
  CHECK(buf.state_at(0)(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(buf.state_at(3)(0) == doctest::Approx(5.0).epsilon(1e-15));

  const auto batch = buf.sample(4, rng);
  CHECK(batch.states.rows() == 4);
  CHECK(batch.states.cols() == 2);
  CHECK(batch.actions.cols() == 1);
  CHECK(batch.next_states.cols() == 2);
  CHECK(batch.rewards.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(batch.next_states(i, 0) == batch.states(i, 0) + 1);  // pairing preserved
    CHECK(batch.rewards(i) == batch.actions(i, 0));
  }

  // sampling hits every stored index roughly uniformly
  std::vector<int> hits(4, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto b = buf.sample(4, rng);
    for (int i = 0; i < 4; ++i) hits[static_cast<int>(b.states(i, 0)) - 2] += 1;
  }
  for (int k = 0; k < 4; ++k) CHECK(std::abs(hits[k] - 2000) < 300);  // ~7 sigma

  ReplayBuffer small(8, 2, 1);
  CHECK_THROWS_AS(small.sample(1, rng), DomainError);
  VectorXd bad(3);
  bad.setZero();
  VectorXd s2(2), a1(1);
  s2.setZero();
  a1.setZero();
  CHECK_THROWS_AS(small.add(bad, a1, 0.0, s2), DomainError);
}

}  // TEST_SUITE
