#include "sentishape/replay.hpp"

#include <cmath>
#include <numeric>

#include "sentishape/error.hpp"

namespace sshape {

namespace {

void draw(const std::deque<ReplayEntry>& pool, std::size_t count, Rng& rng,
          std::vector<ReplayEntry>& out) {
  if (count == 0) return;
  if (pool.size() < count) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(pool[uniform_index(rng, pool.size())]);
    return;
  }
  // partial Fisher-Yates over indices
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(pool[idx[i]]);
  }
}

}  // namespace

PriorityClass priority_class(const ReplayEntry& entry) {
  return entry.reward > 0.0 ? PriorityClass::Positive : PriorityClass::Ordinary;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(ReplayEntry entry) {
  if (priority_class(entry) == PriorityClass::Positive) {
    positive_.push_back(std::move(entry));
  } else {
    ordinary_.push_back(std::move(entry));
  }
  while (size() > capacity_) {
    if (positive_.size() > ordinary_.size()) {
      positive_.pop_front();
    } else {
      ordinary_.pop_front();
    }
  }
}

std::vector<ReplayEntry> ReplayBuffer::sample(std::size_t batch_size, double rho, Rng& rng) const {
  if (empty()) throw UsageError("cannot sample from an empty replay buffer");
  std::size_t quota = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(batch_size)));
  if (quota > batch_size) quota = batch_size;
  if (positive_.empty()) quota = 0;
  if (ordinary_.empty()) quota = batch_size;
  std::vector<ReplayEntry> out;
  out.reserve(batch_size);
  draw(positive_, quota, rng, out);
  draw(ordinary_, batch_size - quota, rng, out);
  return out;
}

}  // namespace sshape
