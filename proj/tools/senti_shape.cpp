// senti-shape: generate games, collect trajectories, fit the sentiment
// classifier, train shaped/unshaped agents and analyze trajectory corpora.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sentishape/error.hpp"
#include "sentishape/harness.hpp"
#include "sentishape/scorer_client.hpp"

namespace fs = std::filesystem;
using namespace sshape;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool parse_on_off(const std::string& v, const char* flag) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw ConfigError(std::string(flag) + " expects on or off");
}

GameKind parse_kind(const std::string& v) {
  auto k = parse_game_kind(v);
  if (!k) throw ConfigError("unknown game kind '" + v + "' (expected cooking, chain or tree)");
  return *k;
}

// Expands directories into the sorted *.json files they contain.
std::vector<fs::path> expand_specs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

void print_correlation(const char* name, const std::optional<CorrelationResult>& c,
                       const std::string& err) {
  std::cout << name << ": ";
  if (!c) {
    std::cout << "undefined (" << err << ")\n";
    return;
  }
  std::cout << "r = " << format_number(c->r);
  if (c->p) std::cout << ", p = " << format_number(*c->p);
  std::cout << " (n = " << c->n << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment-shaped rewards for text-game agents"};
  app.require_subcommand(1);

  // gen-games
  auto* gen = app.add_subcommand("gen-games", "write game spec files");
  int gen_count = 10;
  std::string gen_kind = "cooking";
  std::uint64_t gen_seed = 0;
  GameSizes gen_sizes;
  int gen_max_steps = 0;
  std::string gen_out;
  bool gen_force = false;
  gen->add_option("--count", gen_count, "number of games")->capture_default_str();
  gen->add_option("--kind", gen_kind, "cooking, chain or tree")->capture_default_str();
  gen->add_option("--seed", gen_seed, "seed of the first game")->capture_default_str();
  gen->add_option("--rooms", gen_sizes.rooms, "rooms per cooking game")->capture_default_str();
  gen->add_option("--chain-length", gen_sizes.chain_length)->capture_default_str();
  gen->add_option("--tree-depth", gen_sizes.tree_depth)->capture_default_str();
  gen->add_option("--max-steps", gen_max_steps, "episode step limit (default per kind)");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--force", gen_force, "overwrite existing files");

  // rollout
  auto* roll = app.add_subcommand("rollout", "run a policy and save trajectories");
  std::vector<std::string> roll_specs;
  std::string roll_policy = "random";
  int roll_n = 1;
  std::uint64_t roll_seed = 0;
  std::string roll_out;
  roll->add_option("specs", roll_specs, "spec files or directories")->required();
  roll->add_option("--policy", roll_policy, "random, walkthrough or agent:<bundle>")->capture_default_str();
  roll->add_option("-n", roll_n, "rollouts per spec")->capture_default_str();
  roll->add_option("--seed", roll_seed)->capture_default_str();
  roll->add_option("--out", roll_out, "trajectory file")->required();

  // fit-nb
  auto* fit = app.add_subcommand("fit-nb", "fit the naive Bayes sentiment classifier");
  std::string fit_pos, fit_neg, fit_out;
  double fit_alpha = 1.0;
  std::uint64_t fit_seed = 0;
  bool fit_banks = false;
  fit->add_option("--pos", fit_pos, "positive (win) trajectory file");
  fit->add_option("--neg", fit_neg, "negative (loss) trajectory file");
  fit->add_flag("--phrase-banks", fit_banks, "fit on the built-in phrase banks instead");
  fit->add_option("--alpha", fit_alpha, "additive smoothing")->capture_default_str();
  fit->add_option("--seed", fit_seed, "held-out split seed")->capture_default_str();
  fit->add_option("--out", fit_out, "model file")->required();

  // train
  auto* tr = app.add_subcommand("train", "train an LSTM-DQN agent");
  std::string tr_config, tr_gate, tr_scorer, tr_intermediate, tr_fallback, tr_out, tr_kind;
  std::vector<std::string> tr_games;
  int tr_epochs = 0, tr_episodes = 0, tr_count = 0, tr_timeout = 0;
  double tr_scale = 0, tr_threshold = 0;
  std::uint64_t tr_seed = 0, tr_game_seed = 0;
  tr->add_option("--config", tr_config, "JSON config file; flags override it");
  tr->add_option("--games", tr_games, "spec files or directories");
  tr->add_option("--kind", tr_kind, "generated game kind when --games is absent");
  tr->add_option("--count", tr_count, "generated game count");
  tr->add_option("--game-seed", tr_game_seed, "seed of the first generated game");
  tr->add_option("--epochs", tr_epochs);
  tr->add_option("--episodes", tr_episodes, "episodes per game per epoch");
  tr->add_option("--scale", tr_scale);
  tr->add_option("--threshold", tr_threshold);
  tr->add_option("--gate", tr_gate, "on or off");
  tr->add_option("--scorer", tr_scorer, "none, nb:<model> or ext:<endpoint>");
  tr->add_option("--intermediate", tr_intermediate, "on or off");
  tr->add_option("--scorer-fallback", tr_fallback, "zero or abort");
  tr->add_option("--scorer-timeout-ms", tr_timeout);
  tr->add_option("--seed", tr_seed);
  tr->add_option("--out", tr_out, "output directory");

  // analyze
  auto* an = app.add_subcommand("analyze", "sentiment statistics over trajectory corpora");
  std::vector<std::string> an_inputs;
  std::string an_scorer = "none", an_out;
  std::vector<std::size_t> an_ks = default_last_k_values();
  an->add_option("inputs", an_inputs, "trajectory files or directories")->required();
  an->add_option("--scorer", an_scorer, "none, nb:<model> or ext:<endpoint>")->capture_default_str();
  an->add_option("--ks", an_ks, "last-k window sizes")->delimiter(',');
  an->add_option("--out", an_out, "output directory")->required();

  // play
  auto* play = app.add_subcommand("play", "play a game in the terminal");
  std::string play_spec, play_save;
  play->add_option("spec", play_spec, "game spec file")->required();
  play->add_option("--save", play_save, "trajectory file written on exit");

  // check-scorer
  auto* chk = app.add_subcommand("check-scorer", "replay a golden transcript against a scorer");
  std::string chk_endpoint, chk_transcript;
  int chk_timeout = 5000;
  chk->add_option("--endpoint", chk_endpoint, "host:port or stdio:<command>")->required();
  chk->add_option("--transcript", chk_transcript, "golden transcript (JSONL)")->required();
  chk->add_option("--timeout-ms", chk_timeout)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      if (gen_max_steps > 0) gen_sizes.max_steps = gen_max_steps;
      const auto paths = cmd_gen_games(gen_count, parse_kind(gen_kind), gen_seed, gen_sizes, gen_out, gen_force);
      for (const auto& p : paths) std::cout << p.string() << "\n";
    } else if (*roll) {
      const auto trajs = cmd_rollout(expand_specs(roll_specs), roll_policy, roll_n, roll_seed, roll_out);
      std::size_t wins = 0;
      for (const auto& t : trajs) wins += t.label == Label::Win;
      std::cout << trajs.size() << " trajectories, " << wins << " wins -> " << roll_out << "\n";
    } else if (*fit) {
      if (fit_banks) {
        fit_on_phrase_banks(fit_alpha).save(fit_out);
        std::cout << "model -> " << fit_out << "\n";
      } else {
        if (fit_pos.empty() || fit_neg.empty()) throw UsageError("fit-nb needs --pos and --neg (or --phrase-banks)");
        const auto r = cmd_fit_nb(fit_pos, fit_neg, fit_alpha, fit_out, fit_seed);
        std::cout << "train docs " << r.train_docs << ", held-out docs " << r.test_docs << "\n"
                  << "held-out precision " << format_number(r.held_out.precision) << " recall "
                  << format_number(r.held_out.recall) << " f1 " << format_number(r.held_out.f1) << "\n"
                  << "model -> " << fit_out << "\n";
      }
    } else if (*tr) {
      RunConfig c;
      if (!tr_config.empty()) c = RunConfig::from_json(read_text(tr_config), c);
      if (tr->count("--games")) c.games.spec_paths = expand_specs(tr_games);
      if (tr->count("--kind")) c.games.kind = parse_kind(tr_kind);
      if (tr->count("--count")) c.games.count = tr_count;
      if (tr->count("--game-seed")) c.games.seed = tr_game_seed;
      if (tr->count("--epochs")) c.epochs = tr_epochs;
      if (tr->count("--episodes")) c.episodes_per_game = tr_episodes;
      if (tr->count("--scale")) c.shaping.scale = tr_scale;
      if (tr->count("--threshold")) c.shaping.tau = tr_threshold;
      if (tr->count("--gate")) c.shaping.gate_enabled = parse_on_off(tr_gate, "--gate");
      if (tr->count("--scorer")) c.shaping = ShapingConfig::parse_scorer(tr_scorer, c.shaping);
      if (tr->count("--intermediate")) c.intermediate_rewards = parse_on_off(tr_intermediate, "--intermediate");
      if (tr->count("--scorer-fallback")) {
        if (tr_fallback == "zero") c.scorer_fallback = ScorerFallback::Zero;
        else if (tr_fallback == "abort") c.scorer_fallback = ScorerFallback::Abort;
        else throw ConfigError("--scorer-fallback expects zero or abort");
      }
      if (tr->count("--scorer-timeout-ms")) c.scorer_timeout_ms = tr_timeout;
      if (tr->count("--seed")) c.seed = tr_seed;
      if (tr->count("--out")) c.out_dir = tr_out;
      const auto r = cmd_train(c);
      for (const auto& e : r.reports) {
        std::cout << "epoch " << e.epoch << " score " << format_number(e.epoch_score) << "\n";
      }
      const auto& last = r.reports.back();
      std::cout << "aggregated " << format_number(last.aggregated) << ", max " << format_number(last.max_score);
      if (r.scorer_failures) std::cout << ", scorer failures " << r.scorer_failures;
      std::cout << "\noutputs -> " << c.out_dir.string() << "\n";
    } else if (*an) {
      auto scorer = make_scorer(ShapingConfig::parse_scorer(an_scorer));
      std::vector<fs::path> inputs(an_inputs.begin(), an_inputs.end());
      const auto r = cmd_analyze(inputs, *scorer, an_ks, an_out);
      std::cout << r.trajectories.size() << " labeled trajectories\n";
      print_correlation("spearman", r.spearman, r.spearman_error);
      print_correlation("point-biserial", r.point_biserial, r.point_biserial_error);
      std::cout << "tables -> " << an_out << "\n";
    } else if (*play) {
      cmd_play(load_spec(play_spec), std::cin, std::cout, play_save);
    } else if (*chk) {
      const auto transcript = load_transcript(chk_transcript);
      const std::chrono::milliseconds timeout(chk_timeout);
      auto channel = open_channel(chk_endpoint, timeout);
      const auto results = check_conformance(*channel, transcript, timeout);
      std::size_t failed = 0;
      for (const auto& r : results) {
        if (!r.passed) {
          ++failed;
          std::cout << "entry " << r.index << ": " << r.problem << " (got: " << r.response << ")\n";
        }
      }
      std::cout << results.size() - failed << "/" << results.size() << " transcript entries conform\n";
      return failed ? 1 : 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "senti-shape: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "senti-shape: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "senti-shape: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
