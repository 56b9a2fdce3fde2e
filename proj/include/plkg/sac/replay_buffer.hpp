#pragma once

#include <vector>

#include "plkg/env.hpp"
#include "plkg/nn/tensor.hpp"

namespace plkg::sac {

struct Transition {
  Observation obs;
  std::vector<double> action;  // joint, 4N reals
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
};

// Column-stacked minibatch.
struct Batch {
  nn::Tensor obs;       // B x 5
  nn::Tensor action;    // B x 4N
  nn::Tensor next_obs;  // B x 5
  std::vector<double> reward;
  std::vector<double> done;

  std::size_t size() const { return reward.size(); }
};

// Fixed-capacity ring; once full, the oldest record is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_.at(i); }

  // Uniform with replacement over stored records.
  std::vector<std::size_t> sample_indices(std::size_t batch, RngStream& rng) const;
  Batch sample(std::size_t batch, RngStream& rng) const;
  Batch gather(std::span<const std::size_t> indices) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> data_;
};

}  // namespace plkg::sac
