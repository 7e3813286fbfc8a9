#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentishape/random.hpp"
#include "sentishape/trajectory.hpp"

namespace sshape {

enum class GameKind { Cooking, Chain, Tree };

std::string_view to_string(GameKind kind);
std::optional<GameKind> parse_game_kind(std::string_view text);

// Size parameters accepted by generate_game. `max_steps` falls back to a
// per-kind default when unset (see default_max_steps).
struct GameSizes {
  int rooms = 6;          // cooking, 2..12
  int chain_length = 7;   // chain, 3..64
  int tree_depth = 4;     // tree, 2..10
  std::optional<int> max_steps;
};

int default_max_steps(GameKind kind, const GameSizes& sizes);

struct Room {
  std::string name;
  std::vector<int> exits;           // indices of adjacent rooms, ascending
  std::vector<std::string> items;   // items lying here at reset

  friend bool operator==(const Room&, const Room&) = default;
};

// Immutable, fully seeded game definition. Everything `step` needs lives
// here so a spec can be serialized and replayed without the generator.
struct GameSpec {
  GameKind kind = GameKind::Chain;
  std::uint64_t seed = 0;
  int rooms = 0;
  int chain_length = 0;
  int tree_depth = 0;
  int max_steps = 0;
  bool intermediate_rewards = true;

  std::vector<std::string> recipe;    // cooking: ingredient names in recipe order
  std::vector<std::string> solution;  // walkthrough
  int max_score = 0;
  std::vector<std::string> commands;  // fixed command set of this game

  // cooking layout
  std::vector<Room> layout;
  int start_room = 0;
  int kitchen = 0;
  std::pair<int, int> locked_door{-1, -1};

  // tree: 0 = left, 1 = right for each level, root first
  std::vector<int> goal_path;

  std::string id() const;

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

// Throws ConfigError when a size parameter is out of range.
GameSpec generate_game(GameKind kind, std::uint64_t seed, const GameSizes& sizes = {});

// Copy of `spec` with intermediate rewards switched on/off; max_score follows.
GameSpec with_intermediate_rewards(GameSpec spec, bool enabled);

inline constexpr int kGameSpecFormatVersion = 1;

std::string spec_to_json(const GameSpec& spec);
GameSpec spec_from_json(std::string_view text);
void save_spec(const std::filesystem::path& path, const GameSpec& spec);
GameSpec load_spec(const std::filesystem::path& path);

// Mutable state of one episode. `spec` is non-owning; the spec must outlive
// every state created from it.
struct EnvState {
  const GameSpec* spec = nullptr;
  int location = 0;
  std::set<std::string> inventory;
  std::uint64_t milestones = 0;
  int steps_taken = 0;
  bool done = false;
  int score_so_far = 0;
  bool goal_reached = false;

  // cooking bookkeeping
  std::set<std::string> taken_items;
  bool door_open = false;
  bool meal_cooked = false;
  bool off_path = false;  // tree: has left the rewarded branch
};

struct StepResult {
  std::string obs_text;
  double r_env = 0.0;
  bool done = false;
};

std::pair<EnvState, std::string> reset(const GameSpec& spec);

// Throws UsageError when the episode is already done. Unparseable input is
// not an error: it yields the "I don't understand" template and no reward.
StepResult step(EnvState& state, std::string_view action_text);

// Parseable commands applicable in the current state; failing-but-parseable
// ones (walking into the locked door, cooking without ingredients) included.
std::vector<std::string> valid_actions(const EnvState& state);

std::vector<std::string> walkthrough(const GameSpec& spec);

// Anything that chooses an action text for the current state.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string act(const EnvState& state, std::string_view obs_text, Rng& rng) = 0;
  virtual void begin_episode() {}
};

class RandomPolicy final : public Policy {
 public:
  std::string act(const EnvState& state, std::string_view obs_text, Rng& rng) override;
};

class WalkthroughPolicy final : public Policy {
 public:
  explicit WalkthroughPolicy(const GameSpec& spec) : solution_(walkthrough(spec)) {}
  std::string act(const EnvState& state, std::string_view obs_text, Rng& rng) override;
  void begin_episode() override { next_ = 0; }

 private:
  std::vector<std::string> solution_;
  std::size_t next_ = 0;
};

// Runs `policy` from reset until done or `max_steps` actions. A
// `max_steps` <= 0 uses spec.max_steps.
Trajectory rollout(const GameSpec& spec, Policy& policy, int max_steps, std::uint64_t rng_seed);

// Sentiment phrase banks compiled into the generator.
const std::vector<std::string>& positive_phrases();
const std::vector<std::string>& negative_phrases();
const std::vector<std::string>& neutral_phrases();

// Every fixed word the templates can emit for this spec; used to seed
// vocabularies so that no template word is UNK.
std::vector<std::string> template_texts(const GameSpec& spec);

}  // namespace sshape
