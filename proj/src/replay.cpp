#include "dualight/replay.hpp"

#include "dualight/errors.hpp"

namespace dualight::trainer {

ReplayBuffer::ReplayBuffer(int num_scenarios, int capacity_per_scenario)
    : capacity_(capacity_per_scenario),
      rings_(num_scenarios),
      heads_(num_scenarios, 0) {
  if (capacity_ <= 0) throw ValidationError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  auto& ring = rings_.at(t.scenario);
  if (static_cast<int>(ring.size()) < capacity_) {
    ring.push_back(std::move(t));
    return;
  }
  int& head = heads_[t.scenario];
  ring[head] = std::move(t);
  head = (head + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample_m1(int scenario, int batch,
                                                       Rng& rng) const {
  const auto& ring = rings_.at(scenario);
  if (ring.empty()) {
    throw EmptyBuffer("scenario " + std::to_string(scenario) + " buffer is empty");
  }
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (int b = 0; b < batch; ++b) {
    out.push_back(&ring[rng.uniform_int(static_cast<int>(ring.size()))]);
  }
  return out;
}

std::vector<const Transition*> ReplayBuffer::sample_m2(int batch, Rng& rng) const {
  std::vector<int> non_empty;
  for (size_t k = 0; k < rings_.size(); ++k) {
    if (!rings_[k].empty()) non_empty.push_back(static_cast<int>(k));
  }
  if (non_empty.empty()) throw EmptyBuffer("all scenario buffers are empty");
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (int b = 0; b < batch; ++b) {
    const auto& ring = rings_[non_empty[rng.uniform_int(
        static_cast<int>(non_empty.size()))]];
    out.push_back(&ring[rng.uniform_int(static_cast<int>(ring.size()))]);
  }
  return out;
}

int ReplayBuffer::size(int scenario) const {
  return static_cast<int>(rings_.at(scenario).size());
}

long ReplayBuffer::total_size() const {
  long n = 0;
  for (const auto& ring : rings_) n += static_cast<long>(ring.size());
  return n;
}

}  // namespace dualight::trainer
