#include "smve/planning/replay.hpp"

#include <stdexcept>

namespace smve::planning {

TransitionBatch TransitionBatch::from(const std::vector<Transition>& transitions) {
  const auto n = static_cast<Eigen::Index>(transitions.size());
  TransitionBatch b;
  b.s.resize(n, envs::kObservationSize);
  b.s_next.resize(n, envs::kObservationSize);
  b.r.resize(n);
  b.a.reserve(n);
  b.terminal.reserve(n);
  b.truncated.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[i];
    if (t.terminal && t.truncated) throw std::invalid_argument("transition cannot be both terminal and truncated");
    b.s.row(i) = t.s;
    b.s_next.row(i) = t.s_next;
    b.r(i) = t.r;
    b.a.push_back(t.a);
    b.terminal.push_back(t.terminal);
    b.truncated.push_back(t.truncated);
  }
  return b;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("replay capacity must be positive");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (t.terminal && t.truncated) throw std::invalid_argument("transition cannot be both terminal and truncated");
  if (size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[next_] = t;
  }
  next_ = (next_ + 1) % capacity_;
}

TransitionBatch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (storage_.empty()) throw std::invalid_argument("cannot sample from an empty replay buffer");
  std::vector<Transition> picked;
  picked.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) picked.push_back(storage_[rng.index(size())]);
  return TransitionBatch::from(picked);
}

}  // namespace smve::planning
