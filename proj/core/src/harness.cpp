#include "sentishape/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sentishape/error.hpp"
#include "sentishape/scorer_client.hpp"

namespace sshape {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string_view optimizer_name(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }

}  // namespace

// ------------------------------------------------------------------ config

void RunConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (episodes_per_game < 1) throw ConfigError("episodes per game must be >= 1");
  if (games.spec_paths.empty() && games.count < 1) throw ConfigError("game count must be >= 1");
  if (scorer_timeout_ms <= 0) throw ConfigError("scorer timeout must be positive");
  shaping.validate();
  agent.validate();
}

RunConfig RunConfig::from_json(std::string_view json_text, RunConfig c) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    auto on_off = [](const json& v) {
      if (v.is_boolean()) return v.get<bool>();
      const auto s = v.get<std::string>();
      if (s == "on") return true;
      if (s == "off") return false;
      throw ConfigError("expected on/off, got '" + s + "'");
    };
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("episodes")) c.episodes_per_game = j["episodes"].get<int>();
    if (j.contains("scale")) c.shaping.scale = j["scale"].get<double>();
    if (j.contains("threshold")) c.shaping.tau = j["threshold"].get<double>();
    if (j.contains("gate")) c.shaping.gate_enabled = on_off(j["gate"]);
    if (j.contains("scorer")) c.shaping = ShapingConfig::parse_scorer(j["scorer"].get<std::string>(), c.shaping);
    if (j.contains("intermediate")) c.intermediate_rewards = on_off(j["intermediate"]);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("scorer_timeout_ms")) c.scorer_timeout_ms = j["scorer_timeout_ms"].get<int>();
    if (j.contains("scorer_fallback")) {
      const auto f = j["scorer_fallback"].get<std::string>();
      if (f == "zero") c.scorer_fallback = ScorerFallback::Zero;
      else if (f == "abort") c.scorer_fallback = ScorerFallback::Abort;
      else throw ConfigError("scorer_fallback must be zero or abort");
    }
    if (j.contains("games")) {
      c.games.spec_paths.clear();
      for (const auto& p : j["games"]) c.games.spec_paths.emplace_back(p.get<std::string>());
    }
    if (j.contains("gen")) {
      const auto& g = j["gen"];
      if (g.contains("kind")) {
        const auto k = parse_game_kind(g["kind"].get<std::string>());
        if (!k) throw ConfigError("unknown game kind in config");
        c.games.kind = *k;
      }
      if (g.contains("count")) c.games.count = g["count"].get<int>();
      if (g.contains("seed")) c.games.seed = g["seed"].get<std::uint64_t>();
      if (g.contains("rooms")) c.games.sizes.rooms = g["rooms"].get<int>();
      if (g.contains("chain_length")) c.games.sizes.chain_length = g["chain_length"].get<int>();
      if (g.contains("tree_depth")) c.games.sizes.tree_depth = g["tree_depth"].get<int>();
      if (g.contains("max_steps")) c.games.sizes.max_steps = g["max_steps"].get<int>();
    }
    if (j.contains("agent")) {
      const auto& a = j["agent"];
      AgentConfig& ac = c.agent;
      if (a.contains("gamma")) ac.gamma = a["gamma"].get<double>();
      if (a.contains("learning_rate")) ac.learning_rate = a["learning_rate"].get<double>();
      if (a.contains("batch_size")) ac.batch_size = a["batch_size"].get<std::size_t>();
      if (a.contains("replay_capacity")) ac.replay_capacity = a["replay_capacity"].get<std::size_t>();
      if (a.contains("rho")) ac.rho = a["rho"].get<double>();
      if (a.contains("embed_dim")) ac.embed_dim = a["embed_dim"].get<int>();
      if (a.contains("hidden_dim")) ac.hidden_dim = a["hidden_dim"].get<int>();
      if (a.contains("mlp_dim")) ac.mlp_dim = a["mlp_dim"].get<int>();
      if (a.contains("target_update")) ac.target_update = a["target_update"].get<int>();
      if (a.contains("train_every")) ac.train_every = a["train_every"].get<int>();
      if (a.contains("max_tokens")) ac.max_tokens = a["max_tokens"].get<int>();
      if (a.contains("epsilon_start")) ac.epsilon.start = a["epsilon_start"].get<double>();
      if (a.contains("epsilon_end")) ac.epsilon.end = a["epsilon_end"].get<double>();
      if (a.contains("epsilon_decay")) ac.epsilon.decay_fraction = a["epsilon_decay"].get<double>();
      if (a.contains("zero_output_layer")) ac.zero_output_layer = a["zero_output_layer"].get<bool>();
      if (a.contains("optimizer")) {
        const auto o = a["optimizer"].get<std::string>();
        if (o == "sgd") ac.optimizer = Optimizer::GradientDescent;
        else if (o == "adam") ac.optimizer = Optimizer::Adam;
        else throw ConfigError("optimizer must be sgd or adam");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json(std::string_view json_text) {
  return from_json(json_text, RunConfig{});
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = epochs;
  j["episodes"] = episodes_per_game;
  j["scale"] = shaping.scale;
  j["threshold"] = shaping.tau;
  j["gate"] = shaping.gate_enabled ? "on" : "off";
  j["scorer"] = shaping.scorer_string();
  j["intermediate"] = intermediate_rewards ? "on" : "off";
  j["seed"] = seed;
  j["out"] = out_dir.string();
  j["scorer_fallback"] = scorer_fallback == ScorerFallback::Zero ? "zero" : "abort";
  j["scorer_timeout_ms"] = scorer_timeout_ms;
  std::vector<std::string> paths;
  for (const auto& p : games.spec_paths) paths.push_back(p.string());
  j["games"] = paths;
  j["gen"] = {{"kind", std::string(to_string(games.kind))},
              {"count", games.count},
              {"seed", games.seed},
              {"rooms", games.sizes.rooms},
              {"chain_length", games.sizes.chain_length},
              {"tree_depth", games.sizes.tree_depth}};
  if (games.sizes.max_steps) j["gen"]["max_steps"] = *games.sizes.max_steps;
  j["agent"] = {{"gamma", agent.gamma},
                {"learning_rate", agent.learning_rate},
                {"batch_size", agent.batch_size},
                {"replay_capacity", agent.replay_capacity},
                {"rho", agent.rho},
                {"embed_dim", agent.embed_dim},
                {"hidden_dim", agent.hidden_dim},
                {"mlp_dim", agent.mlp_dim},
                {"target_update", agent.target_update},
                {"train_every", agent.train_every},
                {"max_tokens", agent.max_tokens},
                {"epsilon_start", agent.epsilon.start},
                {"epsilon_end", agent.epsilon.end},
                {"epsilon_decay", agent.epsilon.decay_fraction},
                {"optimizer", std::string(optimizer_name(agent.optimizer))},
                {"zero_output_layer", agent.zero_output_layer}};
  return j.dump(2) + "\n";
}

std::vector<GameSpec> load_game_set(const GameSetConfig& config) {
  std::vector<GameSpec> games;
  if (!config.spec_paths.empty()) {
    for (const auto& p : config.spec_paths) games.push_back(load_spec(p));
    return games;
  }
  for (int i = 0; i < config.count; ++i) {
    games.push_back(generate_game(config.kind, config.seed + static_cast<std::uint64_t>(i), config.sizes));
  }
  return games;
}

// ------------------------------------------------------------------- agent

Vocabulary build_agent_vocabulary(const std::vector<GameSpec>& games, std::uint64_t seed) {
  std::vector<TokenList> corpus;
  for (std::size_t g = 0; g < games.size(); ++g) {
    for (const auto& text : template_texts(games[g])) corpus.push_back(tokenize(text));
    WalkthroughPolicy wt(games[g]);
    RandomPolicy rnd;
    std::vector<Trajectory> samples{rollout(games[g], wt, 0, seed)};
    for (int i = 0; i < 3; ++i) {
      samples.push_back(rollout(games[g], rnd, 0, mix_seed(seed, g * 16 + static_cast<std::size_t>(i))));
    }
    for (const auto& t : samples) {
      for (const auto& s : t.steps) {
        corpus.push_back(tokenize(s.obs_text));
        corpus.push_back(tokenize(s.next_obs_text));
      }
    }
  }
  return Vocabulary::build(corpus, 1);
}

std::vector<std::string> build_action_space(const std::vector<GameSpec>& games) {
  std::vector<std::string> actions;
  std::set<std::string> seen;
  for (const auto& g : games) {
    for (const auto& c : g.commands) {
      if (seen.insert(c).second) actions.push_back(c);
    }
  }
  return actions;
}

std::string AgentPolicy::act(const EnvState&, std::string_view obs_text, Rng& rng) {
  const IdSequence ids = encode_observation(agent_->vocabulary, obs_text, agent_->max_tokens);
  const int a = select_action(q_values_for(agent_->params, ids), epsilon_, rng);
  return agent_->action_space[static_cast<std::size_t>(a)];
}

void save_agent(const fs::path& path, const AgentBundle& agent) {
  nlohmann::ordered_json j;
  j["version"] = kCheckpointFormatVersion;
  j["vocabulary"] = agent.vocabulary.tokens();
  j["action_space"] = agent.action_space;
  j["max_tokens"] = agent.max_tokens;
  j["params"] = nlohmann::ordered_json::parse(params_to_json(agent.params));
  write_file(path, j.dump() + "\n");
}

AgentBundle load_agent(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    const json j = json::parse(ss.str());
    if (j.at("version").get<int>() != kCheckpointFormatVersion) {
      throw FormatError("unsupported agent bundle version");
    }
    AgentBundle a;
    a.vocabulary = Vocabulary::from_tokens(j.at("vocabulary").get<std::vector<std::string>>());
    a.action_space = j.at("action_space").get<std::vector<std::string>>();
    a.max_tokens = j.at("max_tokens").get<int>();
    a.params = params_from_json(j.at("params").dump());
    const NetworkShape s = a.params.shape();
    if (s.vocab_size != static_cast<int>(a.vocabulary.size()) ||
        s.action_count != static_cast<int>(a.action_space.size())) {
      throw FormatError("agent bundle shapes do not match its vocabulary/action space");
    }
    return a;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed agent bundle: ") + e.what());
  }
}

std::unique_ptr<Scorer> make_scorer(const ShapingConfig& config, int timeout_ms) {
  switch (config.scorer) {
    case ScorerKind::None: return std::make_unique<NullScorer>();
    case ScorerKind::NaiveBayes:
      return std::make_unique<NaiveBayesScorer>(
          std::make_shared<const NaiveBayesModel>(NaiveBayesModel::load(config.scorer_target)));
    case ScorerKind::External:
      return std::make_unique<ExternalScorer>(config.scorer_target,
                                              std::chrono::milliseconds(timeout_ms));
  }
  return std::make_unique<NullScorer>();
}

NaiveBayesModel fit_on_phrase_banks(double alpha) {
  return NaiveBayesModel::fit(positive_phrases(), negative_phrases(), alpha);
}

std::string trajectory_document(const Trajectory& t) {
  std::string doc;
  if (!t.steps.empty()) doc = t.steps.front().obs_text;
  for (const auto& s : t.steps) {
    doc += ' ';
    doc += s.next_obs_text;
  }
  return doc;
}

// ---------------------------------------------------------------- training

TrainResult train(const RunConfig& config, const std::vector<GameSpec>& input_games, Scorer& scorer,
                  const TrainHooks& hooks) {
  config.validate();
  if (input_games.empty()) throw ConfigError("training needs at least one game");
  std::vector<GameSpec> games;
  for (const auto& g : input_games) games.push_back(with_intermediate_rewards(g, config.intermediate_rewards));

  TrainResult result;
  result.vocabulary = build_agent_vocabulary(games, config.seed);
  result.action_space = build_action_space(games);
  const NetworkShape shape{static_cast<int>(result.vocabulary.size()), config.agent.embed_dim,
                           config.agent.hidden_dim, config.agent.mlp_dim,
                           static_cast<int>(result.action_space.size())};
  result.learner = std::make_shared<Learner>(shape, config.agent, config.seed);
  Learner& learner = *result.learner;

  std::int64_t step_budget = 0;
  for (const auto& g : games) step_budget += g.max_steps;
  step_budget *= static_cast<std::int64_t>(config.epochs) * config.episodes_per_game;

  const bool scoring = config.shaping.scorer != ScorerKind::None;
  const int n_games = static_cast<int>(games.size());
  std::size_t episode_counter = 0;
  bool stop = false;

  for (int epoch = 0; epoch < config.epochs && !stop; ++epoch) {
    for (int gi = 0; gi < n_games && !stop; ++gi) {
      const GameSpec& game = games[static_cast<std::size_t>(gi)];
      for (int ep = 0; ep < config.episodes_per_game && !stop; ++ep) {
        ++episode_counter;
        auto [state, obs] = reset(game);
        IdSequence obs_ids = encode_observation(result.vocabulary, obs, config.agent.max_tokens);
        while (!state.done) {
          std::string action;
          int action_index = -1;
          if (hooks.policy) {
            action = hooks.policy(static_cast<std::size_t>(gi), state, obs);
            auto it = std::find(result.action_space.begin(), result.action_space.end(), action);
            if (it != result.action_space.end()) {
              action_index = static_cast<int>(it - result.action_space.begin());
            }
          } else {
            const double eps = config.agent.epsilon.at(learner.env_steps(), step_budget);
            action_index = learner.act(obs_ids, eps);
            action = result.action_space[static_cast<std::size_t>(action_index)];
          }

          const int step_no = state.steps_taken;
          StepResult r = step(state, action);

          double polarity = 0.0;
          if (scoring) {
            try {
              polarity = scorer.score(r.obs_text).value;
            } catch (const ScorerUnavailable&) {
              if (config.scorer_fallback == ScorerFallback::Abort) throw;
              ++result.scorer_failures;
            } catch (const ProtocolError&) {
              if (config.scorer_fallback == ScorerFallback::Abort) throw;
              ++result.scorer_failures;
            }
          }
          const double gated =
              config.shaping.gate_enabled ? gate(polarity, config.shaping.tau) : polarity;
          const double r_total = combine_reward(r.r_env, gated, config.shaping.scale);

          IdSequence next_ids = encode_observation(result.vocabulary, r.obs_text, config.agent.max_tokens);
          if (action_index >= 0) {
            learner.observe({obs_ids, action_index, r_total, next_ids, r.done});
          }
          result.log.push_back({epoch + 1, gi, ep, step_no, action, r.r_env, gated, r_total, r.done});
          obs = std::move(r.obs_text);
          obs_ids = std::move(next_ids);
        }
        if (state.goal_reached && !result.first_win_episode) {
          result.first_win_episode = episode_counter;
          if (hooks.stop_at_first_win) stop = true;
        }
      }
    }
  }
  result.episodes_run = episode_counter;
  result.reports = reports_from_log(result.log, config.epochs, n_games);
  return result;
}

std::vector<EpochReport> reports_from_log(const std::vector<StepLog>& log, int epochs, int games) {
  std::vector<EpochReport> reports(static_cast<std::size_t>(epochs));
  for (int e = 0; e < epochs; ++e) {
    reports[static_cast<std::size_t>(e)].epoch = e + 1;
    reports[static_cast<std::size_t>(e)].game_scores.assign(static_cast<std::size_t>(games), 0.0);
  }
  for (const auto& s : log) {
    if (s.epoch < 1 || s.epoch > epochs || s.game < 0 || s.game >= games) {
      throw UsageError("step log entry outside the run's epochs/games");
    }
    reports[static_cast<std::size_t>(s.epoch - 1)].game_scores[static_cast<std::size_t>(s.game)] += s.r_env;
  }
  double aggregated = 0.0;
  double best = 0.0;
  for (auto& r : reports) {
    r.epoch_score = std::accumulate(r.game_scores.begin(), r.game_scores.end(), 0.0);
    aggregated += r.epoch_score;
    best = r.epoch == 1 ? r.epoch_score : std::max(best, r.epoch_score);
    r.aggregated = aggregated;
    r.max_score = best;
  }
  return reports;
}

// ----------------------------------------------------------------- commands

std::vector<fs::path> cmd_gen_games(int count, GameKind kind, std::uint64_t seed,
                                    const GameSizes& sizes, const fs::path& out_dir, bool force) {
  if (count < 0) throw ConfigError("count must be >= 0");
  std::vector<GameSpec> specs;
  for (int i = 0; i < count; ++i) specs.push_back(generate_game(kind, seed + static_cast<std::uint64_t>(i), sizes));
  ensure_dir(out_dir);
  std::vector<fs::path> paths;
  for (const auto& s : specs) {
    const fs::path p = out_dir / (s.id() + ".json");
    if (fs::exists(p) && !force) {
      throw IoError("'" + p.string() + "' already exists (use --force to overwrite)");
    }
    paths.push_back(p);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) save_spec(paths[i], specs[i]);
  return paths;
}

std::vector<Trajectory> cmd_rollout(const std::vector<fs::path>& spec_paths, std::string_view policy,
                                    int n, std::uint64_t seed, const fs::path& out) {
  if (n < 0) throw ConfigError("rollout count must be >= 0");
  std::shared_ptr<const AgentBundle> agent;
  if (policy.starts_with("agent:")) {
    agent = std::make_shared<const AgentBundle>(load_agent(std::string(policy.substr(6))));
  } else if (policy != "random" && policy != "walkthrough") {
    throw ConfigError("unknown policy '" + std::string(policy) +
                      "' (expected random, walkthrough or agent:<path>)");
  }
  std::vector<Trajectory> out_trajs;
  for (std::size_t i = 0; i < spec_paths.size(); ++i) {
    const GameSpec spec = load_spec(spec_paths[i]);
    std::unique_ptr<Policy> pol;
    if (policy == "random") pol = std::make_unique<RandomPolicy>();
    else if (policy == "walkthrough") pol = std::make_unique<WalkthroughPolicy>(spec);
    else pol = std::make_unique<AgentPolicy>(agent);
    for (int j = 0; j < n; ++j) {
      out_trajs.push_back(rollout(spec, *pol, 0, mix_seed(mix_seed(seed, i), static_cast<std::uint64_t>(j))));
    }
  }
  if (!out.empty()) {
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    save_trajectories(out, out_trajs);
  }
  return out_trajs;
}

FitNbResult cmd_fit_nb(const fs::path& pos_path, const fs::path& neg_path, double alpha,
                       const fs::path& out, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  std::vector<std::string> docs[2];
  for (const auto& t : load_trajectories(pos_path)) docs[0].push_back(trajectory_document(t));
  for (const auto& t : load_trajectories(neg_path)) docs[1].push_back(trajectory_document(t));
  if (docs[0].empty() || docs[1].empty()) {
    throw TrainingError("both trajectory files must hold at least one trajectory");
  }
  Rng rng(seed);
  std::vector<std::string> train_docs[2];
  std::vector<std::string> test_docs;
  std::vector<int> test_truth;
  for (int c = 0; c < 2; ++c) {
    auto& d = docs[c];
    for (std::size_t i = d.size(); i > 1; --i) std::swap(d[i - 1], d[uniform_index(rng, i)]);
    std::size_t held = d.size() / 5;
    if (held == d.size()) held = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i < held) {
        test_docs.push_back(d[i]);
        test_truth.push_back(c == 0 ? 1 : 0);
      } else {
        train_docs[c].push_back(d[i]);
      }
    }
  }
  FitNbResult r{NaiveBayesModel::fit(train_docs[0], train_docs[1], alpha), {}, 0, 0};
  r.train_docs = train_docs[0].size() + train_docs[1].size();
  r.test_docs = test_docs.size();
  std::vector<int> predicted;
  for (const auto& d : test_docs) predicted.push_back(r.model.positive_posterior(d) > 0.5 ? 1 : 0);
  r.held_out = prf1(predicted, test_truth, 1);
  if (!out.empty()) r.model.save(out);
  return r;
}

TrainResult cmd_train(const RunConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (config.out_dir.empty()) throw ConfigError("train needs an output directory (--out)");
  const std::vector<GameSpec> games = load_game_set(config.games);
  auto scorer = make_scorer(config.shaping, config.scorer_timeout_ms);
  ensure_dir(config.out_dir);
  TrainResult r = train(config, games, *scorer, hooks);
  write_file(config.out_dir / "epochs.csv", epochs_csv(r.reports));
  write_file(config.out_dir / "summary.csv", summary_csv(r.reports, r.scorer_failures));
  write_file(config.out_dir / "steps.csv", step_log_csv(r.log));
  write_file(config.out_dir / "curve.svg", curve_svg(r.reports));
  write_file(config.out_dir / "run_config.json", config.to_json());
  save_agent(config.out_dir / "agent.json",
             {r.learner->params(), r.vocabulary, r.action_space, config.agent.max_tokens});
  return r;
}

AnalyzeResult cmd_analyze(const std::vector<fs::path>& inputs, Scorer& scorer,
                          const std::vector<std::size_t>& ks, const fs::path& out_dir) {
  AnalyzeResult res;
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  for (const auto& f : files) {
    for (auto& t : load_trajectories(f)) {
      if (t.label != Label::Unlabeled) res.trajectories.push_back(std::move(t));
    }
  }

  std::vector<std::vector<double>> pols;
  std::vector<int> labels;
  for (const auto& t : res.trajectories) {
    std::vector<double> p;
    for (const auto& s : t.steps) p.push_back(scorer.score(s.next_obs_text).value);
    pols.push_back(std::move(p));
    labels.push_back(t.label == Label::Win ? 1 : 0);
  }
  // full-trajectory analysis is last-k with k covering everything
  std::size_t longest = 1;
  for (const auto& p : pols) longest = std::max(longest, p.size());
  const auto full = last_k_table(pols, labels, {longest});
  res.spearman = full[0].spearman;
  res.point_biserial = full[0].point_biserial;
  res.spearman_error = full[0].spearman_error;
  res.point_biserial_error = full[0].point_biserial_error;
  for (const auto& p : pols) {
    double s = 0.0;
    for (double x : p) s += positive_share(x);
    res.mean_sentiment.push_back(p.empty() ? 0.0 : s / static_cast<double>(p.size()));
  }
  res.last_k = last_k_table(pols, labels, ks);

  ensure_dir(out_dir);
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };

  std::string per;
  per += "# mean positive sentiment = mean over steps of (polarity + 1) / 2\n";
  per += "index,game_id,label,steps,mean_positive_sentiment\n";
  for (std::size_t i = 0; i < res.trajectories.size(); ++i) {
    const auto& t = res.trajectories[i];
    per += std::to_string(i) + "," + t.game_id + "," + std::string(to_string(t.label)) + "," +
           std::to_string(t.steps.size()) + "," + format_number(res.mean_sentiment[i]) + "\n";
  }
  write_file(out_dir / "trajectory_sentiment.csv", per);

  auto r_p = [&](const std::optional<CorrelationResult>& c) {
    if (!c) return std::string("undefined,undefined");
    return format_number(c->r) + "," + cell(c->p);
  };
  std::string corr;
  corr += "# mean positive sentiment = mean over steps of (polarity + 1) / 2\n";
  corr += "n,spearman_r,spearman_p,point_biserial_r,point_biserial_p,note\n";
  std::string note = res.spearman_error;
  if (!res.point_biserial_error.empty() && res.point_biserial_error != note) {
    note += note.empty() ? res.point_biserial_error : "; " + res.point_biserial_error;
  }
  corr += std::to_string(res.trajectories.size()) + "," + r_p(res.spearman) + "," +
          r_p(res.point_biserial) + "," + note + "\n";
  write_file(out_dir / "correlations.csv", corr);

  std::string lk;
  lk += "# mean positive sentiment = mean over the last k steps of (polarity + 1) / 2\n";
  lk += "k,mean_pos_win,mean_pos_loss,difference,sigma,spearman_r,spearman_p,point_biserial_r,point_biserial_p\n";
  for (const auto& row : res.last_k) {
    lk += std::to_string(row.row.k) + "," + format_number(row.row.mean_pos_win) + "," +
          format_number(row.row.mean_pos_loss) + "," + format_number(row.row.difference) + "," +
          format_number(row.row.sigma) + "," + r_p(row.spearman) + "," + r_p(row.point_biserial) + "\n";
  }
  write_file(out_dir / "last_k.csv", lk);
  return res;
}

Trajectory cmd_play(const GameSpec& spec, std::istream& in, std::ostream& out,
                    const fs::path& save_path) {
  auto [state, obs] = reset(spec);
  Trajectory t;
  t.game_id = spec.id();
  out << obs << "\n";
  std::string line;
  while (!state.done) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    StepResult r = step(state, line);
    out << r.obs_text << "\n";
    if (r.r_env != 0.0) {
      out << "[reward " << format_number(r.r_env) << ", score " << state.score_so_far << "/"
          << spec.max_score << "]\n";
    }
    t.steps.push_back({obs, line, r.r_env, r.obs_text, r.done});
    obs = std::move(r.obs_text);
  }
  t.label = state.goal_reached ? Label::Win : Label::Loss;
  out << (state.goal_reached ? "*** You have won ***" : "*** Episode over ***") << "\n";
  if (!save_path.empty()) save_trajectories(save_path, {t});
  return t;
}

}  // namespace sshape
