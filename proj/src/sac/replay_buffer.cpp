#include "plkg/sac/replay_buffer.hpp"

#include <algorithm>

#include "plkg/error.hpp"

namespace plkg::sac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ParameterError("ReplayBuffer: capacity must be >= 1");
  data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, RngStream& rng) const {
  if (data_.empty()) throw ContractError("ReplayBuffer: sampling from an empty buffer");
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = rng.index(data_.size());
  return idx;
}

Batch ReplayBuffer::gather(std::span<const std::size_t> indices) const {
  const std::size_t b = indices.size();
  const std::size_t adim = data_.at(indices.front()).action.size();
  Batch out{nn::Tensor(b, Observation::kDim), nn::Tensor(b, adim),
            nn::Tensor(b, Observation::kDim), std::vector<double>(b), std::vector<double>(b)};
  for (std::size_t r = 0; r < b; ++r) {
    const Transition& t = data_.at(indices[r]);
    std::copy(t.obs.values.begin(), t.obs.values.end(), out.obs.row(r).begin());
    std::copy(t.next_obs.values.begin(), t.next_obs.values.end(), out.next_obs.row(r).begin());
    std::copy(t.action.begin(), t.action.end(), out.action.row(r).begin());
    out.reward[r] = t.reward;
    out.done[r] = t.done ? 1.0 : 0.0;
  }
  return out;
}

Batch ReplayBuffer::sample(std::size_t batch, RngStream& rng) const {
  const auto idx = sample_indices(batch, rng);
  return gather(idx);
}

}  // namespace plkg::sac
