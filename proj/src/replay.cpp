#include "acp/replay.hpp"

#include "acp/errors.hpp"

namespace acp {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0 || state_dim <= 0 || action_dim <= 0) {
    throw DomainError("replay buffer: bad dimensions");
  }
  states_.resize(capacity, state_dim);
  actions_.resize(capacity, action_dim);
  next_states_.resize(capacity, state_dim);
  rewards_.resize(capacity);
}

void ReplayBuffer::add(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                       double reward, const Eigen::VectorXd& next_state) {
  if (state.size() != state_dim_ || next_state.size() != state_dim_ ||
      action.size() != action_dim_) {
    throw DomainError("replay buffer: transition dimension mismatch");
  }
  states_.row(head_) = state.transpose();
  actions_.row(head_) = action.transpose();
  next_states_.row(head_) = next_state.transpose();
  rewards_(head_) = reward;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (size_ < n) throw DomainError("replay buffer: not enough transitions to sample");
  Batch b;
  b.states.resize(n, state_dim_);
  b.actions.resize(n, action_dim_);
  b.next_states.resize(n, state_dim_);
  b.rewards.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(size_) - 1));
    b.states.row(i) = states_.row(idx);
    b.actions.row(i) = actions_.row(idx);
    b.next_states.row(i) = next_states_.row(idx);
    b.rewards(i) = rewards_(idx);
  }
  return b;
}

Eigen::VectorXd ReplayBuffer::state_at(std::size_t i) const {
  if (i >= size_) throw DomainError("replay buffer: index out of range");
  const std::size_t idx = size_ < capacity_ ? i : (head_ + i) % capacity_;
  return states_.row(idx).transpose();
}

}  // namespace acp
