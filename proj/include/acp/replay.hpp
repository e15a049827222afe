#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "acp/rng.hpp"

namespace acp {

// FIFO ring over flat matrices: row i holds one transition
// (state, joint action, reward, next state). Uniform sampling with
// replacement.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void add(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
           double reward, const Eigen::VectorXd& next_state);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  struct Batch {
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::VectorXd rewards;
    Eigen::MatrixXd next_states;
  };
  // Throws DomainError if fewer than n transitions are stored.
  Batch sample(std::size_t n, Rng& rng) const;

  // Oldest-first access for inspection/tests.
  Eigen::VectorXd state_at(std::size_t i) const;

 private:
  std::size_t capacity_, head_ = 0, size_ = 0;
  int state_dim_, action_dim_;
  Eigen::MatrixXd states_, actions_, next_states_;
  Eigen::VectorXd rewards_;
};

}  // namespace acp
