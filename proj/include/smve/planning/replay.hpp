#pragma once

#include <vector>

#include "smve/envs/acrobot.hpp"
#include "smve/nn/types.hpp"
#include "smve/rng.hpp"

namespace smve::planning {

using nn::Matrix;
using nn::Vector;

struct Transition {
  envs::Observation s;
  envs::Action a = 0;
  double r = 0.0;
  envs::Observation s_next;
  bool terminal = false;
  /// Cut by the episode time limit; bootstraps like a non-terminal step.
  bool truncated = false;
};

/// Sampled transitions stacked one per row.
struct TransitionBatch {
  Matrix s;
  std::vector<int> a;
  Vector r;
  Matrix s_next;
  std::vector<char> terminal;
  std::vector<char> truncated;

  int size() const { return static_cast<int>(a.size()); }
  static TransitionBatch from(const std::vector<Transition>& transitions);
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(const Transition& t);
  TransitionBatch sample(int batch_size, Rng& rng) const;

  int size() const { return static_cast<int>(storage_.size()); }
  int capacity() const { return capacity_; }
  const Transition& at(int i) const { return storage_.at(i); }

 private:
  int capacity_;
  int next_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace smve::planning
