#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "sentishape/error.hpp"
#include "sentishape/replay.hpp"

using namespace sshape;

namespace {

ReplayEntry entry(double reward, int tag = 0) { return {{1}, tag, reward, {1}, false}; }

}  // namespace

TEST(Replay, ClassifiesByRewardSign) {
  EXPECT_EQ(priority_class(entry(1.08)), PriorityClass::Positive);
  EXPECT_EQ(priority_class(entry(0.0)), PriorityClass::Ordinary);
  EXPECT_EQ(priority_class(entry(-0.1)), PriorityClass::Ordinary);
}

TEST(Replay, FifoEvictionWithinAClass) {
  ReplayBuffer b(2);
  for (int i = 0; i < 3; ++i) b.push(entry(0.0, i));
  ASSERT_EQ(b.ordinary().size(), 2u);
  EXPECT_EQ(b.ordinary()[0].action, 1);
  EXPECT_EQ(b.ordinary()[1].action, 2);
}

TEST(Replay, EvictsFromTheLargerClass) {
  ReplayBuffer b(3);
  b.push(entry(1.0, 0));
  b.push(entry(0.0, 1));
  b.push(entry(0.0, 2));
  b.push(entry(1.0, 3));  // two each: a tie evicts ordinary
  ASSERT_EQ(b.positive().size(), 2u);
  ASSERT_EQ(b.ordinary().size(), 1u);
  EXPECT_EQ(b.ordinary()[0].action, 2);
  b.push(entry(1.0, 4));  // positive is the larger class now
  ASSERT_EQ(b.positive().size(), 2u);
  EXPECT_EQ(b.positive()[0].action, 3);
  EXPECT_EQ(b.positive()[1].action, 4);
  EXPECT_EQ(b.ordinary()[0].action, 2);
  EXPECT_EQ(b.size(), 3u);
}

TEST(Replay, SizesAlwaysSumToLength) {
  ReplayBuffer b(17);
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    b.push(entry(uniform_unit(rng) < 0.4 ? 1.0 : 0.0));
    EXPECT_EQ(b.positive().size() + b.ordinary().size(), b.size());
    EXPECT_LE(b.size(), 17u);
  }
}

TEST(Replay, QuotaFractionMatchesRho) {
  ReplayBuffer b(100);
  for (int i = 0; i < 3; ++i) b.push(entry(1.0));
  for (int i = 0; i < 7; ++i) b.push(entry(0.0));
  Rng rng(2);
  std::size_t pos = 0, all = 0;
  for (int i = 0; i < 5000; ++i) {
    for (const auto& e : b.sample(10, 0.5, rng)) {
      pos += e.reward > 0;
      ++all;
    }
  }
  EXPECT_NEAR(static_cast<double>(pos) / static_cast<double>(all), 0.5, 0.02);
}

TEST(Replay, EmptyClassHandsOverItsQuota) {
  ReplayBuffer b(10);
  for (int i = 0; i < 4; ++i) b.push(entry(0.0, i));
  Rng rng(3);
  const auto batch = b.sample(8, 0.25, rng);
  EXPECT_EQ(batch.size(), 8u);
  for (const auto& e : batch) EXPECT_EQ(e.reward, 0.0);
}

TEST(Replay, SmallClassIsSampledWithReplacement) {
  ReplayBuffer b(100);
  b.push(entry(1.0, 42));
  for (int i = 0; i < 50; ++i) b.push(entry(0.0, i));
  Rng rng(4);
  const auto batch = b.sample(10, 0.5, rng);
  int repeats = 0;
  for (const auto& e : batch) repeats += e.action == 42 && e.reward > 0;
  EXPECT_EQ(repeats, 5);
}

TEST(Replay, LargeClassIsSampledWithoutReplacement) {
  ReplayBuffer b(100);
  for (int i = 0; i < 40; ++i) b.push(entry(0.0, i));
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto batch = b.sample(32, 0.25, rng);
    std::set<int> seen;
    for (const auto& e : batch) seen.insert(e.action);
    EXPECT_EQ(seen.size(), 32u);
  }
}

TEST(Replay, EmptyBufferCannotSample) {
  ReplayBuffer b(4);
  Rng rng(6);
  EXPECT_THROW(b.sample(2, 0.25, rng), UsageError);
}
