#pragma once

// Exact and tabular references for the corridor game: positions 0..L-1,
// a wall at 0, the goal at L-1, actions 0 = left and 1 = right.

#include <array>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Probability that a uniform random walk started at 0 reaches L-1 within
// `steps` moves, by propagating the position distribution.
inline double random_walk_win_probability(int length, int steps) {
  std::vector<double> p(static_cast<std::size_t>(length), 0.0);
  p[0] = 1.0;
  double won = 0.0;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> q(p.size(), 0.0);
    for (int x = 0; x < length - 1; ++x) {
      const double m = p[static_cast<std::size_t>(x)];
      q[static_cast<std::size_t>(x > 0 ? x - 1 : 0)] += 0.5 * m;
      q[static_cast<std::size_t>(x + 1)] += 0.5 * m;
    }
    won += q[static_cast<std::size_t>(length - 1)];
    q[static_cast<std::size_t>(length - 1)] = 0.0;
    p = q;
  }
  return won;
}

struct TabularChainConfig {
  int length = 7;
  int max_steps = 12;
  int max_episodes = 200;
  double epsilon = 0.8;
  double alpha = 0.5;
  double gamma = 0.9;
  // added to rightward moves, subtracted from leftward ones
  double bonus = 0.0;
};

// Q-learning from a zero table with lowest-index greedy ties. Returns the
// 1-based episode of the first win, or max_episodes + 1.
inline int tabular_first_win(const TabularChainConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 2>> q(static_cast<std::size_t>(c.length), {0.0, 0.0});
  for (int ep = 1; ep <= c.max_episodes; ++ep) {
    int pos = 0;
    for (int t = 0; t < c.max_steps; ++t) {
      int a;
      if (unit(rng) < c.epsilon) {
        a = unit(rng) < 0.5 ? 0 : 1;
      } else {
        auto& row = q[static_cast<std::size_t>(pos)];
        a = row[0] >= row[1] ? 0 : 1;
      }
      const int next = a == 0 ? (pos > 0 ? pos - 1 : 0) : pos + 1;
      double r = a == 1 ? c.bonus : -c.bonus;
      const bool goal = next == c.length - 1;
      if (goal) r += 1.0;
      const auto& nrow = q[static_cast<std::size_t>(next)];
      const double target = goal ? r : r + c.gamma * std::max(nrow[0], nrow[1]);
      auto& cell = q[static_cast<std::size_t>(pos)][static_cast<std::size_t>(a)];
      cell += c.alpha * (target - cell);
      pos = next;
      if (goal) return ep;
    }
  }
  return c.max_episodes + 1;
}

}  // namespace oracle
