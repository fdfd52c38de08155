#pragma once

// FIFO experience replay: fixed-capacity ring over joint transitions with
// uniform with-replacement minibatch sampling.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "d2dmarl/rng.hpp"

namespace d2dmarl {

// One joint experience tuple. States are the normalized observation vectors
// fed to the networks; actions are one-hot RB choices.
struct Transition {
  std::vector<std::vector<double>> states;       // N x obs_dim
  std::vector<std::vector<double>> actions;      // N x K, one-hot
  std::vector<double> rewards;                   // N
  std::vector<std::vector<double>> next_states;  // N x obs_dim
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }
  bool ready(std::size_t batch) const { return size() >= batch; }

  // FIFO push: once full, the oldest transition is overwritten.
  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  // Logical indexing, oldest first.
  const Transition& at(std::size_t i) const {
    if (i >= storage_.size()) throw std::out_of_range("ReplayBuffer::at");
    return storage_[(head_ + i) % storage_.size()];
  }

  // Uniform with replacement. Empty optional = not ready (fewer stored
  // transitions than the requested batch); the caller skips its update.
  std::optional<std::vector<std::size_t>> sample_indices(std::size_t batch,
                                                         rng::SplitMix64& gen) const {
    if (!ready(batch)) return std::nullopt;
    std::vector<std::size_t> idx(batch);
    for (std::size_t j = 0; j < batch; ++j)
      idx[j] = static_cast<std::size_t>(gen.next_below(storage_.size()));
    return idx;
  }

  std::optional<std::vector<Transition>> sample(std::size_t batch, rng::SplitMix64& gen) const {
    auto idx = sample_indices(batch, gen);
    if (!idx) return std::nullopt;
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t i : *idx) out.push_back(at(i));
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest element once full
  std::vector<Transition> storage_;
};

}  // namespace d2dmarl
