#include "sentishape/qnetwork.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentishape/error.hpp"

namespace sshape {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Everything the backward pass needs from one forward pass.
struct SequenceCache {
  std::vector<int> ids;
  Eigen::MatrixXd gates;  // 4H x T, post-activation
  Eigen::MatrixXd cells;  // H x T
  Eigen::MatrixXd tanh_cells;
  Eigen::MatrixXd outputs;  // H x T
  Eigen::VectorXd state;
  Eigen::VectorXd hidden_pre;  // mlp
  Eigen::VectorXd hidden;
  Eigen::VectorXd q;
};

void check_ids(const QParams& p, std::span<const int> ids) {
  if (ids.empty()) throw UsageError("cannot encode an empty id sequence");
  const auto vocab = p.embedding.rows();
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      throw UsageError("token id " + std::to_string(id) + " outside embedding table of " +
                       std::to_string(vocab) + " rows");
    }
  }
}

void run_lstm(const QParams& p, std::span<const int> ids, SequenceCache& c) {
  check_ids(p, ids);
  const Eigen::Index H = p.w_recurrent.cols();
  const Eigen::Index T = static_cast<Eigen::Index>(ids.size());
  c.ids.assign(ids.begin(), ids.end());

  Eigen::MatrixXd x(p.embedding.cols(), T);
  for (Eigen::Index t = 0; t < T; ++t) x.col(t) = p.embedding.row(ids[static_cast<std::size_t>(t)]).transpose();
  c.gates.noalias() = p.w_input * x;
  c.gates.colwise() += p.b_gates;
  c.cells.resize(H, T);
  c.tanh_cells.resize(H, T);
  c.outputs.resize(H, T);

  Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd cell = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = 0; t < T; ++t) {
    auto z = c.gates.col(t);
    z.noalias() += p.w_recurrent * h;
    for (Eigen::Index k = 0; k < H; ++k) {
      z(k) = sigmoid(z(k));
      z(H + k) = sigmoid(z(H + k));
      z(2 * H + k) = std::tanh(z(2 * H + k));
      z(3 * H + k) = sigmoid(z(3 * H + k));
    }
    cell = z.segment(H, H).cwiseProduct(cell) + z.head(H).cwiseProduct(z.segment(2 * H, H));
    c.cells.col(t) = cell;
    c.tanh_cells.col(t) = cell.array().tanh();
    h = z.tail(H).cwiseProduct(c.tanh_cells.col(t));
    c.outputs.col(t) = h;
  }
  c.state = c.outputs.rowwise().mean();
}

void run_head(const QParams& p, SequenceCache& c) {
  c.hidden_pre.noalias() = p.w_hidden * c.state;
  c.hidden_pre += p.b_hidden;
  c.hidden = c.hidden_pre.cwiseMax(0.0);
  c.q.noalias() = p.w_out * c.hidden;
  c.q += p.b_out;
}

void backward(const QParams& p, const SequenceCache& c, const Eigen::VectorXd& dq, QParams& g) {
  const Eigen::Index H = p.w_recurrent.cols();
  const Eigen::Index T = static_cast<Eigen::Index>(c.ids.size());

  g.w_out.noalias() += dq * c.hidden.transpose();
  g.b_out += dq;
  Eigen::VectorXd dz1 = p.w_out.transpose() * dq;
  for (Eigen::Index k = 0; k < dz1.size(); ++k) {
    if (c.hidden_pre(k) <= 0.0) dz1(k) = 0.0;
  }
  g.w_hidden.noalias() += dz1 * c.state.transpose();
  g.b_hidden += dz1;
  const Eigen::VectorXd ds = (p.w_hidden.transpose() * dz1) / static_cast<double>(T);

  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dz(4 * H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gates = c.gates.col(t);
    const auto in = gates.head(H);
    const auto forget = gates.segment(H, H);
    const auto cand = gates.segment(2 * H, H);
    const auto out = gates.tail(H);
    const auto tc = c.tanh_cells.col(t);

    const Eigen::VectorXd dh = ds + dh_next;
    const Eigen::VectorXd dc =
        dh.cwiseProduct(out).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;
    for (Eigen::Index k = 0; k < H; ++k) {
      const double c_prev = t > 0 ? c.cells(k, t - 1) : 0.0;
      dz(k) = dc(k) * cand(k) * in(k) * (1.0 - in(k));
      dz(H + k) = dc(k) * c_prev * forget(k) * (1.0 - forget(k));
      dz(2 * H + k) = dc(k) * in(k) * (1.0 - cand(k) * cand(k));
      dz(3 * H + k) = dh(k) * tc(k) * out(k) * (1.0 - out(k));
    }
    dc_next = dc.cwiseProduct(forget);

    const int id = c.ids[static_cast<std::size_t>(t)];
    g.w_input.noalias() += dz * p.embedding.row(id);
    if (t > 0) g.w_recurrent.noalias() += dz * c.outputs.col(t - 1).transpose();
    g.b_gates += dz;
    g.embedding.row(id).noalias() += (p.w_input.transpose() * dz).transpose();
    dh_next.noalias() = p.w_recurrent.transpose() * dz;
  }
}

std::vector<double> targets(const QParams& target_params, std::span<const ReplayEntry> batch,
                            double gamma) {
  std::vector<double> y;
  y.reserve(batch.size());
  for (const auto& e : batch) {
    if (e.done) {
      y.push_back(td_target(e.reward, true, gamma, 0.0));
    } else {
      const Eigen::VectorXd q_next = q_values_for(target_params, e.next_obs);
      y.push_back(td_target(e.reward, false, gamma, q_next.maxCoeff()));
    }
  }
  return y;
}

void check_action(const QParams& p, int action) {
  if (action < 0 || action >= p.b_out.size()) {
    throw UsageError("action index " + std::to_string(action) + " outside Q head of " +
                     std::to_string(p.b_out.size()) + " actions");
  }
}

}  // namespace

QParams QParams::zeros(const NetworkShape& s) {
  QParams p;
  p.embedding = Eigen::MatrixXd::Zero(s.vocab_size, s.embed_dim);
  p.w_input = Eigen::MatrixXd::Zero(4 * s.hidden_dim, s.embed_dim);
  p.w_recurrent = Eigen::MatrixXd::Zero(4 * s.hidden_dim, s.hidden_dim);
  p.b_gates = Eigen::VectorXd::Zero(4 * s.hidden_dim);
  p.w_hidden = Eigen::MatrixXd::Zero(s.mlp_dim, s.hidden_dim);
  p.b_hidden = Eigen::VectorXd::Zero(s.mlp_dim);
  p.w_out = Eigen::MatrixXd::Zero(s.action_count, s.mlp_dim);
  p.b_out = Eigen::VectorXd::Zero(s.action_count);
  return p;
}

QParams QParams::random(const NetworkShape& s, std::uint64_t seed, double scale) {
  QParams p = zeros(s);
  Rng rng(seed);
  p.for_each_group([&](const char*, auto& g) {
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = uniform_real(rng, -scale, scale);
  });
  return p;
}

NetworkShape QParams::shape() const {
  return {static_cast<int>(embedding.rows()), static_cast<int>(embedding.cols()),
          static_cast<int>(w_recurrent.cols()), static_cast<int>(w_hidden.rows()),
          static_cast<int>(w_out.rows())};
}

std::size_t QParams::parameter_count() const {
  std::size_t n = 0;
  for_each_group([&](const char*, const auto& g) { n += static_cast<std::size_t>(g.size()); });
  return n;
}

bool QParams::all_finite() const {
  bool ok = true;
  for_each_group([&](const char*, const auto& g) { ok = ok && g.allFinite(); });
  return ok;
}

bool operator==(const QParams& a, const QParams& b) {
  return a.embedding == b.embedding && a.w_input == b.w_input &&
         a.w_recurrent == b.w_recurrent && a.b_gates == b.b_gates &&
         a.w_hidden == b.w_hidden && a.b_hidden == b.b_hidden && a.w_out == b.w_out &&
         a.b_out == b.b_out;
}

Eigen::VectorXd encode_state(const QParams& params, std::span<const int> ids) {
  SequenceCache c;
  run_lstm(params, ids, c);
  return c.state;
}

Eigen::VectorXd q_values(const QParams& params, const Eigen::VectorXd& state) {
  if (state.size() != params.w_hidden.cols()) {
    throw UsageError("state vector of size " + std::to_string(state.size()) +
                     " does not match hidden size " + std::to_string(params.w_hidden.cols()));
  }
  Eigen::VectorXd hidden = (params.w_hidden * state + params.b_hidden).cwiseMax(0.0);
  return params.w_out * hidden + params.b_out;
}

double td_target(double r_total, bool done, double gamma, double max_next_q) {
  if (done) return r_total;
  return r_total + gamma * max_next_q;
}

int argmax_lowest(const Eigen::VectorXd& q) {
  int best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = static_cast<int>(i);
  }
  return best;
}

int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng) {
  if (q.size() == 0) throw UsageError("select_action needs a non-empty Q vector");
  if (epsilon > 0.0 && uniform_unit(rng) < epsilon) {
    return static_cast<int>(uniform_index(rng, static_cast<std::size_t>(q.size())));
  }
  return argmax_lowest(q);
}

LossAndGradient loss_and_gradient(const QParams& params, const QParams& target_params,
                                  std::span<const ReplayEntry> batch, double gamma) {
  LossAndGradient out{0.0, QParams::zeros(params.shape())};
  if (batch.empty()) return out;
  const std::vector<double> y = targets(target_params, batch, gamma);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  SequenceCache c;
  Eigen::VectorXd dq = Eigen::VectorXd::Zero(params.b_out.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const ReplayEntry& e = batch[b];
    check_action(params, e.action);
    run_lstm(params, e.obs, c);
    run_head(params, c);
    const double err = c.q(e.action) - y[b];
    out.loss += err * err * inv_b;
    dq.setZero();
    dq(e.action) = 2.0 * err * inv_b;
    backward(params, c, dq, out.gradient);
  }
  return out;
}

double td_loss(const QParams& params, const QParams& target_params,
               std::span<const ReplayEntry> batch, double gamma) {
  if (batch.empty()) return 0.0;
  const std::vector<double> y = targets(target_params, batch, gamma);
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    check_action(params, batch[b].action);
    const double err = q_values_for(params, batch[b].obs)(batch[b].action) - y[b];
    loss += err * err;
  }
  return loss / static_cast<double>(batch.size());
}

void check_finite(const LossAndGradient& lg) {
  if (!std::isfinite(lg.loss)) {
    throw NumericalError("TD loss is not finite (" + std::to_string(lg.loss) + ")");
  }
  lg.gradient.for_each_group([](const char* name, const auto& g) {
    if (!g.allFinite()) {
      throw NumericalError(std::string("gradient of ") + name + " has non-finite entries");
    }
  });
}

TrainStepResult train_step(const QParams& params, const QParams& target_params,
                           std::span<const ReplayEntry> batch, double gamma,
                           double learning_rate) {
  LossAndGradient lg = loss_and_gradient(params, target_params, batch, gamma);
  check_finite(lg);
  TrainStepResult r{params, lg.loss};
  if (learning_rate != 0.0) {
    r.params.embedding -= learning_rate * lg.gradient.embedding;
    r.params.w_input -= learning_rate * lg.gradient.w_input;
    r.params.w_recurrent -= learning_rate * lg.gradient.w_recurrent;
    r.params.b_gates -= learning_rate * lg.gradient.b_gates;
    r.params.w_hidden -= learning_rate * lg.gradient.w_hidden;
    r.params.b_hidden -= learning_rate * lg.gradient.b_hidden;
    r.params.w_out -= learning_rate * lg.gradient.w_out;
    r.params.b_out -= learning_rate * lg.gradient.b_out;
  }
  return r;
}

std::string params_to_json(const QParams& params) {
  nlohmann::ordered_json j;
  j["version"] = kCheckpointFormatVersion;
  const NetworkShape s = params.shape();
  j["shape"] = {{"vocab_size", s.vocab_size},
                {"embed_dim", s.embed_dim},
                {"hidden_dim", s.hidden_dim},
                {"mlp_dim", s.mlp_dim},
                {"action_count", s.action_count}};
  nlohmann::ordered_json groups;
  params.for_each_group([&](const char* name, const auto& g) {
    // column-major, as Eigen stores it
    groups[name] = std::vector<double>(g.data(), g.data() + g.size());
  });
  j["groups"] = std::move(groups);
  return j.dump() + "\n";
}

QParams params_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kCheckpointFormatVersion) {
      throw FormatError("unsupported checkpoint version");
    }
    const auto& sj = j.at("shape");
    NetworkShape s{sj.at("vocab_size").get<int>(), sj.at("embed_dim").get<int>(),
                   sj.at("hidden_dim").get<int>(), sj.at("mlp_dim").get<int>(),
                   sj.at("action_count").get<int>()};
    QParams p = QParams::zeros(s);
    const auto& groups = j.at("groups");
    p.for_each_group([&](const char* name, auto& g) {
      const auto v = groups.at(name).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(v.size()) != g.size()) {
        throw FormatError(std::string("checkpoint group ") + name + " has the wrong size");
      }
      std::copy(v.begin(), v.end(), g.data());
    });
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_params(const std::filesystem::path& path, const QParams& params) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << params_to_json(params);
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

QParams load_params(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return params_from_json(ss.str());
}

}  // namespace sshape
