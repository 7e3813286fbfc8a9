#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentishape/random.hpp"
#include "sentishape/textcore.hpp"

namespace sshape {

struct NetworkShape {
  int vocab_size = 2;
  int embed_dim = 32;
  int hidden_dim = 64;
  int mlp_dim = 64;
  int action_count = 1;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Learnable parameters of the embedding + LSTM encoder + two-layer Q head.
// Gate blocks are stacked [input; forget; cell; output] along the rows of
// the LSTM matrices. The same type doubles as a gradient container.
struct QParams {
  Eigen::MatrixXd embedding;    // vocab x embed
  Eigen::MatrixXd w_input;      // 4H x embed
  Eigen::MatrixXd w_recurrent;  // 4H x H
  Eigen::VectorXd b_gates;      // 4H
  Eigen::MatrixXd w_hidden;     // mlp x H
  Eigen::VectorXd b_hidden;     // mlp
  Eigen::MatrixXd w_out;        // actions x mlp
  Eigen::VectorXd b_out;        // actions

  static QParams zeros(const NetworkShape& shape);
  // Uniform in [-scale, scale] from `seed`.
  static QParams random(const NetworkShape& shape, std::uint64_t seed, double scale = 0.08);

  NetworkShape shape() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  // Calls f(name, group) for every parameter group, in a fixed order.
  template <typename F>
  void for_each_group(F&& f) {
    f("embedding", embedding);
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("b_gates", b_gates);
    f("w_hidden", w_hidden);
    f("b_hidden", b_hidden);
    f("w_out", w_out);
    f("b_out", b_out);
  }
  template <typename F>
  void for_each_group(F&& f) const {
    f("embedding", embedding);
    f("w_input", w_input);
    f("w_recurrent", w_recurrent);
    f("b_gates", b_gates);
    f("w_hidden", w_hidden);
    f("b_hidden", b_hidden);
    f("w_out", w_out);
    f("b_out", b_out);
  }

  friend bool operator==(const QParams& a, const QParams& b);
};

// Mean of the LSTM outputs over all timesteps. Throws UsageError on an
// empty sequence or an id outside the embedding table.
Eigen::VectorXd encode_state(const QParams& params, std::span<const int> ids);

// Two affine layers with a rectifier between; no output nonlinearity.
Eigen::VectorXd q_values(const QParams& params, const Eigen::VectorXd& state);

inline Eigen::VectorXd q_values_for(const QParams& params, std::span<const int> ids) {
  return q_values(params, encode_state(params, ids));
}

// r + gamma * max_next_q, or r alone on terminal transitions (max_next_q is
// then never read).
double td_target(double r_total, bool done, double gamma, double max_next_q);

// Epsilon-greedy; greedy ties go to the lowest index.
int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng);
int argmax_lowest(const Eigen::VectorXd& q);

struct ReplayEntry {
  IdSequence obs;
  int action = 0;
  double reward = 0.0;  // shaped r_total
  IdSequence next_obs;
  bool done = false;

  friend bool operator==(const ReplayEntry&, const ReplayEntry&) = default;
};

struct LossAndGradient {
  double loss = 0.0;
  QParams gradient;
};

// Mean squared TD error over `batch` and its exact gradient with respect to
// `params`. Targets come from `target_params` and are held constant.
LossAndGradient loss_and_gradient(const QParams& params, const QParams& target_params,
                                  std::span<const ReplayEntry> batch, double gamma);

// Loss only; used by finite-difference checks.
double td_loss(const QParams& params, const QParams& target_params,
               std::span<const ReplayEntry> batch, double gamma);

struct TrainStepResult {
  QParams params;
  double loss = 0.0;
};

// One plain gradient-descent step. Throws NumericalError when the loss or
// any gradient entry is not finite.
TrainStepResult train_step(const QParams& params, const QParams& target_params,
                           std::span<const ReplayEntry> batch, double gamma,
                           double learning_rate);

// Throws NumericalError naming the first non-finite group.
void check_finite(const LossAndGradient& lg);

inline constexpr int kCheckpointFormatVersion = 1;

std::string params_to_json(const QParams& params);
QParams params_from_json(std::string_view text);
void save_params(const std::filesystem::path& path, const QParams& params);
QParams load_params(const std::filesystem::path& path);

}  // namespace sshape
