#include "sentishape/learner.hpp"

#include <algorithm>
#include <cmath>

#include "sentishape/error.hpp"

namespace sshape {

double EpsilonSchedule::at(std::int64_t step, std::int64_t total_steps) const {
  const double horizon = decay_fraction * static_cast<double>(std::max<std::int64_t>(total_steps, 1));
  if (horizon <= 0.0) return end;
  const double frac = static_cast<double>(step) / horizon;
  return frac >= 1.0 ? end : start + (end - start) * frac;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must be in (0, 1)");
  for (double e : {epsilon.start, epsilon.end}) {
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
  }
  if (!(epsilon.decay_fraction >= 0.0 && epsilon.decay_fraction <= 1.0)) {
    throw ConfigError("epsilon decay fraction must be in [0, 1]");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and >= 0");
  }
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (replay_capacity == 0) throw ConfigError("replay capacity must be positive");
  if (embed_dim <= 0 || hidden_dim <= 0 || mlp_dim <= 0) {
    throw ConfigError("network sizes must be positive");
  }
  if (target_update <= 0 || train_every <= 0 || max_tokens <= 0) {
    throw ConfigError("target_update, train_every and max_tokens must be positive");
  }
}

IdSequence encode_observation(const Vocabulary& vocab, std::string_view text, int max_tokens) {
  TokenList toks = tokenize(text);
  if (static_cast<int>(toks.size()) > max_tokens) toks.resize(static_cast<std::size_t>(max_tokens));
  return vocab.encode(toks);
}

Learner::Learner(const NetworkShape& shape, const AgentConfig& config, std::uint64_t seed)
    : config_(config),
      params_(QParams::random(shape, mix_seed(seed, 1))),
      target_(params_),
      buffer_(config.replay_capacity),
      rng_(mix_seed(seed, 2)) {
  config_.validate();
  if (config_.zero_output_layer) {
    params_.w_out.setZero();
    params_.b_out.setZero();
    target_ = params_;
  }
  if (config_.optimizer == Optimizer::Adam) {
    adam_m_ = QParams::zeros(shape);
    adam_v_ = QParams::zeros(shape);
  }
}

int Learner::act(std::span<const int> obs, double epsilon) {
  return select_action(q(obs), epsilon, rng_);
}

void Learner::set_params(QParams params) {
  params_ = std::move(params);
  target_ = params_;
}

bool Learner::observe(ReplayEntry entry) {
  buffer_.push(std::move(entry));
  ++env_steps_;
  if (buffer_.size() < config_.batch_size || env_steps_ % config_.train_every != 0) return false;
  train_once();
  return true;
}

void Learner::train_once() {
  const std::vector<ReplayEntry> batch = buffer_.sample(config_.batch_size, config_.rho, rng_);
  if (config_.optimizer == Optimizer::GradientDescent) {
    TrainStepResult r = train_step(params_, target_, batch, config_.gamma, config_.learning_rate);
    params_ = std::move(r.params);
    last_loss_ = r.loss;
  } else {
    LossAndGradient lg = loss_and_gradient(params_, target_, batch, config_.gamma);
    check_finite(lg);
    apply_adam(lg.gradient);
    last_loss_ = lg.loss;
  }
  ++train_steps_;
  if (train_steps_ % config_.target_update == 0) target_ = params_;
}

void Learner::apply_adam(const QParams& grad) {
  const double b1 = config_.adam_beta1, b2 = config_.adam_beta2;
  const double t = static_cast<double>(train_steps_ + 1);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  const double lr = config_.learning_rate;
  const double eps = config_.adam_epsilon;
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  update(params_.embedding, adam_m_.embedding, adam_v_.embedding, grad.embedding);
  update(params_.w_input, adam_m_.w_input, adam_v_.w_input, grad.w_input);
  update(params_.w_recurrent, adam_m_.w_recurrent, adam_v_.w_recurrent, grad.w_recurrent);
  update(params_.b_gates, adam_m_.b_gates, adam_v_.b_gates, grad.b_gates);
  update(params_.w_hidden, adam_m_.w_hidden, adam_v_.w_hidden, grad.w_hidden);
  update(params_.b_hidden, adam_m_.b_hidden, adam_v_.b_hidden, grad.b_hidden);
  update(params_.w_out, adam_m_.w_out, adam_v_.w_out, grad.w_out);
  update(params_.b_out, adam_m_.b_out, adam_v_.b_out, grad.b_out);
}

}  // namespace sshape
