#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "sentishape/qnetwork.hpp"
#include "sentishape/replay.hpp"

namespace sshape {

enum class Optimizer { GradientDescent, Adam };

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;  // of the total step budget

  // Linear from start to end over the first decay_fraction * total steps.
  double at(std::int64_t step, std::int64_t total_steps) const;
};

struct AgentConfig {
  double gamma = 0.9;
  EpsilonSchedule epsilon;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 10000;
  double rho = 0.25;
  int embed_dim = 32;
  int hidden_dim = 64;
  int mlp_dim = 64;
  int target_update = 500;  // train steps between target syncs
  int train_every = 1;      // env steps per train step
  int max_tokens = 64;
  Optimizer optimizer = Optimizer::GradientDescent;
  // Start the output layer at zero so every action ties (greedy picks the
  // lowest index) until rewards move it.
  bool zero_output_layer = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws ConfigError.
  void validate() const;
};

// Tokenizes, encodes and clips an observation to `max_tokens` ids.
IdSequence encode_observation(const Vocabulary& vocab, std::string_view text, int max_tokens);

// Owns the online network, the periodically synced target copy, the replay
// buffer and the optimizer state. Single-owner; not thread-safe.
class Learner {
 public:
  Learner(const NetworkShape& shape, const AgentConfig& config, std::uint64_t seed);

  // Epsilon-greedy action from the online network.
  int act(std::span<const int> obs, double epsilon);
  Eigen::VectorXd q(std::span<const int> obs) const { return q_values_for(params_, obs); }

  // Stores a transition and runs a train step when one is due. Returns true
  // when a train step ran.
  bool observe(ReplayEntry entry);

  const QParams& params() const noexcept { return params_; }
  const QParams& target_params() const noexcept { return target_; }
  const ReplayBuffer& buffer() const noexcept { return buffer_; }
  const AgentConfig& config() const noexcept { return config_; }
  std::int64_t env_steps() const noexcept { return env_steps_; }
  std::int64_t train_steps() const noexcept { return train_steps_; }
  double last_loss() const noexcept { return last_loss_; }

  void set_params(QParams params);

 private:
  void train_once();
  void apply_adam(const QParams& grad);

  AgentConfig config_;
  QParams params_;
  QParams target_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::int64_t env_steps_ = 0;
  std::int64_t train_steps_ = 0;
  double last_loss_ = 0.0;
  QParams adam_m_;
  QParams adam_v_;
};

}  // namespace sshape
