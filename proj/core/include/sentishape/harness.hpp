#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentishape/envsim.hpp"
#include "sentishape/learner.hpp"
#include "sentishape/sentiment.hpp"
#include "sentishape/stats.hpp"

namespace sshape {

enum class ScorerFallback { Zero, Abort };

// Where the training games come from: explicit spec files, or generated
// from (kind, count, seed, sizes) when no paths are given.
struct GameSetConfig {
  std::vector<std::filesystem::path> spec_paths;
  GameKind kind = GameKind::Cooking;
  int count = 10;
  std::uint64_t seed = 0;
  GameSizes sizes;
};

struct RunConfig {
  GameSetConfig games;
  int epochs = 20;
  int episodes_per_game = 1;
  bool intermediate_rewards = true;
  ShapingConfig shaping;
  AgentConfig agent;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  ScorerFallback scorer_fallback = ScorerFallback::Zero;
  int scorer_timeout_ms = 5000;

  void validate() const;
  // Applies the keys present in `json_text` on top of `base`.
  static RunConfig from_json(std::string_view json_text, RunConfig base);
  static RunConfig from_json(std::string_view json_text);
  std::string to_json() const;
};

std::vector<GameSpec> load_game_set(const GameSetConfig& config);

// Scores count environment reward only.
struct EpochReport {
  int epoch = 0;
  std::vector<double> game_scores;
  double epoch_score = 0.0;
  double aggregated = 0.0;  // running sum of epoch scores
  double max_score = 0.0;   // running max of epoch scores
};

struct StepLog {
  int epoch = 0;
  int game = 0;
  int episode = 0;
  int step = 0;
  std::string action;
  double r_env = 0.0;
  double polarity = 0.0;  // after gating
  double r_total = 0.0;
  bool done = false;
};

struct TrainHooks {
  // Replaces epsilon-greedy control when set.
  std::function<std::string(std::size_t game, const EnvState& state, std::string_view obs)> policy;
  // Stop after the first episode that reaches the goal.
  bool stop_at_first_win = false;
};

struct TrainResult {
  std::vector<EpochReport> reports;
  std::vector<StepLog> log;
  std::vector<std::string> action_space;
  Vocabulary vocabulary;
  std::shared_ptr<Learner> learner;
  std::size_t scorer_failures = 0;
  std::size_t episodes_run = 0;
  std::optional<std::size_t> first_win_episode;  // 1-based
};

// Vocabulary over every template word plus the texts of a walkthrough and a
// few random rollouts of each game.
Vocabulary build_agent_vocabulary(const std::vector<GameSpec>& games, std::uint64_t seed);
// Union of the games' command sets, first appearance first.
std::vector<std::string> build_action_space(const std::vector<GameSpec>& games);

// Throws ScorerUnavailable/ProtocolError (fallback=abort) and NumericalError.
TrainResult train(const RunConfig& config, const std::vector<GameSpec>& games, Scorer& scorer,
                  const TrainHooks& hooks = {});

// Per-epoch reports recomputed from a step log; reads only r_env.
std::vector<EpochReport> reports_from_log(const std::vector<StepLog>& log, int epochs, int games);

std::string format_number(double v);
std::string epochs_csv(const std::vector<EpochReport>& reports);
std::string summary_csv(const std::vector<EpochReport>& reports, std::size_t scorer_failures);
std::string step_log_csv(const std::vector<StepLog>& log);
std::string curve_svg(const std::vector<EpochReport>& reports);

// Trained agent bundle: parameters plus what is needed to act with them.
struct AgentBundle {
  QParams params;
  Vocabulary vocabulary;
  std::vector<std::string> action_space;
  int max_tokens = 64;
};
void save_agent(const std::filesystem::path& path, const AgentBundle& agent);
AgentBundle load_agent(const std::filesystem::path& path);

// Greedy policy over a trained agent.
class AgentPolicy final : public Policy {
 public:
  AgentPolicy(std::shared_ptr<const AgentBundle> agent, double epsilon = 0.0)
      : agent_(std::move(agent)), epsilon_(epsilon) {}
  std::string act(const EnvState& state, std::string_view obs_text, Rng& rng) override;

 private:
  std::shared_ptr<const AgentBundle> agent_;
  double epsilon_;
};

std::unique_ptr<Scorer> make_scorer(const ShapingConfig& config, int timeout_ms = 5000);

// Positive docs are the positive phrase bank, negative docs the negative bank.
NaiveBayesModel fit_on_phrase_banks(double alpha = 1.0);

// One document per trajectory: its observations joined by spaces.
std::string trajectory_document(const Trajectory& t);

// ---------------------------------------------------------------- commands

std::vector<std::filesystem::path> cmd_gen_games(int count, GameKind kind, std::uint64_t seed,
                                                 const GameSizes& sizes,
                                                 const std::filesystem::path& out_dir,
                                                 bool force = false);

// Policy names: "random", "walkthrough", "agent:<bundle path>".
std::vector<Trajectory> cmd_rollout(const std::vector<std::filesystem::path>& spec_paths,
                                    std::string_view policy, int n, std::uint64_t seed,
                                    const std::filesystem::path& out);

struct FitNbResult {
  NaiveBayesModel model;
  MetricsReport held_out;
  std::size_t train_docs = 0;
  std::size_t test_docs = 0;
};
// Fits on 80% of the documents (seeded split per class) and reports
// precision/recall/F1 on the remaining 20%.
FitNbResult cmd_fit_nb(const std::filesystem::path& pos_path, const std::filesystem::path& neg_path,
                       double alpha, const std::filesystem::path& out, std::uint64_t seed = 0);

// Writes epochs.csv, summary.csv, steps.csv, curve.svg, agent.json and
// run_config.json into config.out_dir.
TrainResult cmd_train(const RunConfig& config, const TrainHooks& hooks = {});

struct AnalyzeResult {
  std::vector<double> mean_sentiment;
  std::vector<Trajectory> trajectories;
  std::optional<CorrelationResult> spearman;
  std::optional<CorrelationResult> point_biserial;
  std::string spearman_error;
  std::string point_biserial_error;
  std::vector<LastKResult> last_k;
};
// `inputs` may mix trajectory files and directories of *.jsonl files.
// Writes trajectory_sentiment.csv, correlations.csv and last_k.csv.
AnalyzeResult cmd_analyze(const std::vector<std::filesystem::path>& inputs, Scorer& scorer,
                          const std::vector<std::size_t>& ks, const std::filesystem::path& out_dir);

// Interactive episode over `in`/`out`. The trajectory is labeled win when
// the goal is reached and loss otherwise (including EOF); it is saved to
// `save_path` when non-empty.
Trajectory cmd_play(const GameSpec& spec, std::istream& in, std::ostream& out,
                    const std::filesystem::path& save_path);

}  // namespace sshape
