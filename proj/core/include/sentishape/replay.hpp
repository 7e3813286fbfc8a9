#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "sentishape/qnetwork.hpp"
#include "sentishape/random.hpp"

namespace sshape {

enum class PriorityClass { Positive, Ordinary };

// Positive iff the shaped reward is strictly positive.
PriorityClass priority_class(const ReplayEntry& entry);

// Two-bucket prioritized replay: successful (positive-reward) experience is
// kept apart and sampled at a fixed fraction of every batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Appends to the entry's class. When the total exceeds capacity the oldest
  // entry of the larger class is evicted (ordinary on a tie).
  void push(ReplayEntry entry);

  // ceil(rho * batch_size) entries from the positive class, the rest from
  // the ordinary class; a class smaller than its quota is sampled with
  // replacement, otherwise without. An empty class hands its quota to the
  // other. Throws UsageError on an empty buffer.
  std::vector<ReplayEntry> sample(std::size_t batch_size, double rho, Rng& rng) const;

  std::size_t size() const noexcept { return positive_.size() + ordinary_.size(); }
  bool empty() const noexcept { return size() == 0; }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::deque<ReplayEntry>& positive() const noexcept { return positive_; }
  const std::deque<ReplayEntry>& ordinary() const noexcept { return ordinary_; }

 private:
  std::size_t capacity_;
  std::deque<ReplayEntry> positive_;
  std::deque<ReplayEntry> ordinary_;
};

}  // namespace sshape
