#include "sentishape/envsim.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sentishape/error.hpp"
#include "sentishape/textcore.hpp"
#include "templates.hpp"

namespace sshape {

namespace {

using detail::pick_phrase;

constexpr std::string_view kGoLeft = "go left";
constexpr std::string_view kGoRight = "go right";
constexpr std::string_view kKey = "key";
constexpr std::string_view kMeal = "meal";

// Salts keep phrase choices for different template slots decorrelated.
enum Salt : std::uint64_t {
  kSaltReset = 11,
  kSaltMove = 12,
  kSaltSuccess = 13,
  kSaltFailure = 14,
};

const std::string& positive(const EnvState& s, std::uint64_t salt) {
  return pick_phrase(positive_phrases(), s.spec->seed, s.steps_taken, salt + 100 * s.location);
}
const std::string& negative(const EnvState& s, std::uint64_t salt) {
  return pick_phrase(negative_phrases(), s.spec->seed, s.steps_taken, salt + 100 * s.location);
}
const std::string& neutral(const EnvState& s, std::uint64_t salt) {
  return pick_phrase(neutral_phrases(), s.spec->seed, s.steps_taken, salt + 100 * s.location);
}

constexpr std::string_view kNotUnderstood = "I don't understand that.";

void check_range(const char* name, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw ConfigError(std::string(name) + " must be in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "], got " + std::to_string(value));
  }
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

bool adjacent(const GameSpec& spec, int a, int b) {
  const auto& ex = spec.layout[static_cast<std::size_t>(a)].exits;
  return std::binary_search(ex.begin(), ex.end(), b);
}

bool is_locked_edge(const GameSpec& spec, int a, int b) {
  const auto [u, v] = spec.locked_door;
  return (a == u && b == v) || (a == v && b == u);
}

int room_index(const GameSpec& spec, std::string_view name) {
  for (std::size_t i = 0; i < spec.layout.size(); ++i) {
    if (spec.layout[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int recipe_index(const GameSpec& spec, std::string_view item) {
  auto it = std::find(spec.recipe.begin(), spec.recipe.end(), item);
  return it == spec.recipe.end() ? -1 : static_cast<int>(it - spec.recipe.begin());
}

bool item_here(const EnvState& s, std::string_view item) {
  const auto& items = s.spec->layout[static_cast<std::size_t>(s.location)].items;
  return std::find(items.begin(), items.end(), item) != items.end() &&
         s.taken_items.count(std::string(item)) == 0;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string describe_room(const EnvState& s) {
  const GameSpec& spec = *s.spec;
  const Room& room = spec.layout[static_cast<std::size_t>(s.location)];
  std::vector<std::string> exits;
  for (int e : room.exits) exits.push_back(spec.layout[static_cast<std::size_t>(e)].name);
  std::vector<std::string> items;
  for (const auto& it : room.items) {
    if (s.taken_items.count(it) == 0) items.push_back(it);
  }
  std::string out = "Exits: " + join(exits, ", ") + ".";
  if (!items.empty()) out += " You see: " + join(items, ", ") + ".";
  return out;
}

int award(EnvState& s, int milestone_bit, bool is_goal) {
  const std::uint64_t bit = std::uint64_t{1} << milestone_bit;
  if (s.milestones & bit) return 0;
  s.milestones |= bit;
  const int r = (is_goal || s.spec->intermediate_rewards) ? 1 : 0;
  s.score_so_far += r;
  return r;
}

// ---------------------------------------------------------------- cooking

StepResult step_cooking(EnvState& s, const TokenList& toks) {
  const GameSpec& spec = *s.spec;
  const int k = static_cast<int>(spec.recipe.size());
  StepResult r;
  if (toks.empty()) {
    r.obs_text = std::string(kNotUnderstood);
    return r;
  }
  const std::string& verb = toks[0];
  std::vector<std::string> rest(toks.begin() + 1, toks.end());
  if (!rest.empty() && (rest[0] == "to" || rest[0] == "the")) rest.erase(rest.begin());
  if (!rest.empty() && rest[0] == "the") rest.erase(rest.begin());
  const std::string object = join(rest, " ");

  if (verb == "go" && !object.empty()) {
    const int target = room_index(spec, object);
    if (target < 0) {
      r.obs_text = "You can't go there. " + negative(s, kSaltFailure);
    } else if (target == s.location) {
      r.obs_text = "You are already in the " + object + ". " + negative(s, kSaltFailure);
    } else if (!adjacent(spec, s.location, target)) {
      r.obs_text = "You can't reach the " + object + " from here. " + negative(s, kSaltFailure);
    } else if (is_locked_edge(spec, s.location, target) && !s.door_open) {
      r.obs_text = "You smash into the locked door. " + negative(s, kSaltFailure);
    } else {
      s.location = target;
      r.obs_text = "You enter the " + object + ". " + neutral(s, kSaltMove) + " " + describe_room(s);
    }
    return r;
  }
  if (verb == "take" && !object.empty()) {
    if (!item_here(s, object)) {
      r.obs_text = "You search, but there is no " + object + " here. " + negative(s, kSaltFailure);
      return r;
    }
    s.taken_items.insert(object);
    s.inventory.insert(object);
    const int idx = recipe_index(spec, object);
    if (idx >= 0) r.r_env = award(s, idx, false);
    r.obs_text = positive(s, kSaltSuccess) + " You took the " + object + ".";
    return r;
  }
  if (verb == "open" && (object == "door" || object.empty())) {
    const auto [u, v] = spec.locked_door;
    const bool near = s.location == u || s.location == v;
    if (!near || s.door_open) {
      r.obs_text = "There is no locked door here. " + negative(s, kSaltFailure);
    } else if (s.inventory.count(std::string(kKey)) == 0) {
      r.obs_text = "The door is locked and you have no key. " + negative(s, kSaltFailure);
    } else {
      s.door_open = true;
      r.obs_text = positive(s, kSaltSuccess) + " You unlock the door with the key.";
    }
    return r;
  }
  if (verb == "cook" && (object == "meal" || object.empty())) {
    const bool have_all = std::all_of(spec.recipe.begin(), spec.recipe.end(), [&](const auto& i) {
      return s.inventory.count(i) > 0;
    });
    if (s.meal_cooked) {
      r.obs_text = "The meal is already cooked. " + negative(s, kSaltFailure);
    } else if (s.location != spec.kitchen) {
      r.obs_text = "There is no stove here. " + negative(s, kSaltFailure);
    } else if (!have_all) {
      r.obs_text = "You are missing ingredients and burn the pan. " + negative(s, kSaltFailure);
    } else {
      s.meal_cooked = true;
      for (const auto& i : spec.recipe) s.inventory.erase(i);
      s.inventory.insert(std::string(kMeal));
      r.r_env = award(s, k, false);
      r.obs_text = positive(s, kSaltSuccess) + " You cook a delicious meal.";
    }
    return r;
  }
  if (verb == "eat" && (object == "meal" || object.empty())) {
    if (s.inventory.count(std::string(kMeal)) == 0) {
      r.obs_text = "There is nothing to eat. " + negative(s, kSaltFailure);
    } else {
      s.inventory.erase(std::string(kMeal));
      s.goal_reached = true;
      r.r_env = award(s, k + 1, true);
      r.obs_text = positive(s, kSaltSuccess) + " You ate the meal. You win!";
    }
    return r;
  }
  r.obs_text = std::string(kNotUnderstood);
  return r;
}

std::vector<std::string> actions_cooking(const EnvState& s) {
  const GameSpec& spec = *s.spec;
  std::vector<std::string> out;
  for (int e : spec.layout[static_cast<std::size_t>(s.location)].exits) {
    out.push_back("go to " + spec.layout[static_cast<std::size_t>(e)].name);
  }
  for (const auto& it : spec.layout[static_cast<std::size_t>(s.location)].items) {
    if (s.taken_items.count(it) == 0) out.push_back("take " + it);
  }
  const auto [u, v] = spec.locked_door;
  if (!s.door_open && (s.location == u || s.location == v)) out.push_back("open door");
  if (s.location == spec.kitchen && !s.meal_cooked) out.push_back("cook meal");
  if (s.meal_cooked && s.inventory.count(std::string(kMeal))) out.push_back("eat meal");
  return out;
}

// ------------------------------------------------------------ chain / tree

int direction(const TokenList& toks) {
  if (toks.size() == 2 && toks[0] == "go") {
    if (toks[1] == "left") return 0;
    if (toks[1] == "right") return 1;
  }
  return -1;
}

StepResult step_chain(EnvState& s, const TokenList& toks) {
  StepResult r;
  const int dir = direction(toks);
  const int last = s.spec->chain_length - 1;
  if (dir < 0) {
    r.obs_text = std::string(kNotUnderstood);
  } else if (dir == 0 && s.location == 0) {
    r.obs_text = "You bump into the cold stone wall. " + negative(s, kSaltFailure);
  } else if (dir == 0) {
    --s.location;
    r.obs_text = "You walk back west along the corridor. " + negative(s, kSaltMove);
  } else {
    ++s.location;
    if (s.location == last) {
      s.goal_reached = true;
      r.r_env = award(s, 0, true);
      r.obs_text = positive(s, kSaltSuccess) + " You step out of the corridor into daylight. You win!";
    } else {
      r.obs_text = "You walk east along the corridor. " + positive(s, kSaltMove);
    }
  }
  return r;
}

StepResult step_tree(EnvState& s, const TokenList& toks) {
  StepResult r;
  const int dir = direction(toks);
  if (dir < 0) {
    r.obs_text = std::string(kNotUnderstood);
    return r;
  }
  const GameSpec& spec = *s.spec;
  // location is a heap index: root 1, children 2i and 2i+1
  int level = 0;
  for (int x = s.location; x > 1; x >>= 1) ++level;
  if (dir != spec.goal_path[static_cast<std::size_t>(level)]) s.off_path = true;
  s.location = 2 * s.location + dir;
  const std::string side = dir == 0 ? "left" : "right";
  if (level + 1 == spec.tree_depth) {
    s.done = true;
    if (!s.off_path) {
      s.goal_reached = true;
      r.r_env = award(s, 0, true);
      r.obs_text = positive(s, kSaltSuccess) + " You found the hidden treasure. You win!";
    } else {
      r.obs_text = negative(s, kSaltFailure) + " The path ends at a dead end.";
    }
  } else if (!s.off_path) {
    r.obs_text = "You take the " + side + " branch. " + positive(s, kSaltMove);
  } else {
    r.obs_text = "You take the " + side + " branch. " + negative(s, kSaltMove);
  }
  return r;
}

// ------------------------------------------------------------- generation

std::vector<int> shortest_path(const GameSpec& spec, int from, int to, bool door_open) {
  const int n = static_cast<int>(spec.layout.size());
  std::vector<int> prev(static_cast<std::size_t>(n), -2);
  std::deque<int> q{from};
  prev[static_cast<std::size_t>(from)] = -1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    if (u == to) break;
    for (int v : spec.layout[static_cast<std::size_t>(u)].exits) {
      if (prev[static_cast<std::size_t>(v)] != -2) continue;
      if (!door_open && is_locked_edge(spec, u, v)) continue;
      prev[static_cast<std::size_t>(v)] = u;
      q.push_back(v);
    }
  }
  std::vector<int> path;
  if (prev[static_cast<std::size_t>(to)] == -2) return path;
  for (int x = to; x != from; x = prev[static_cast<std::size_t>(x)]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

void plan_cooking_solution(GameSpec& spec, int key_room, const std::vector<int>& ingredient_rooms) {
  int loc = spec.start_room;
  bool door_open = false;
  auto go = [&](int target) {
    const auto path = shortest_path(spec, loc, target, door_open);
    if (path.empty() && loc != target) throw Error("generator produced an unreachable room");
    for (int r : path) spec.solution.push_back("go to " + spec.layout[static_cast<std::size_t>(r)].name);
    loc = target;
  };
  go(key_room);
  spec.solution.emplace_back("take key");
  go(spec.locked_door.first);
  spec.solution.emplace_back("open door");
  door_open = true;
  for (std::size_t i = 0; i < spec.recipe.size(); ++i) {
    go(ingredient_rooms[i]);
    spec.solution.push_back("take " + spec.recipe[i]);
  }
  go(spec.kitchen);
  spec.solution.emplace_back("cook meal");
  spec.solution.emplace_back("eat meal");
}

void generate_cooking(GameSpec& spec, Rng& rng) {
  const int n = spec.rooms;
  std::vector<std::string> names = detail::room_name_bank();
  shuffle(names, rng);
  names.resize(static_cast<std::size_t>(n));

  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 1; i < n; ++i) {
    const int p = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(i)));
    parent[static_cast<std::size_t>(i)] = p;
    adj[static_cast<std::size_t>(i)].push_back(p);
    adj[static_cast<std::size_t>(p)].push_back(i);
  }

  // The locked door separates the subtree under `gate` from the start room.
  const int gate = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n - 1)));
  std::vector<bool> beyond(static_cast<std::size_t>(n), false);
  beyond[static_cast<std::size_t>(gate)] = true;
  for (int i = gate + 1; i < n; ++i) {
    beyond[static_cast<std::size_t>(i)] = beyond[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
  }
  std::vector<int> near_rooms, far_rooms;
  for (int i = 0; i < n; ++i) (beyond[static_cast<std::size_t>(i)] ? far_rooms : near_rooms).push_back(i);

  const std::size_t recipe_size = 2 + uniform_index(rng, 2);
  std::vector<std::string> ingredients = detail::ingredient_bank();
  shuffle(ingredients, rng);
  ingredients.resize(recipe_size);

  std::vector<int> ingredient_rooms;
  ingredient_rooms.push_back(far_rooms[uniform_index(rng, far_rooms.size())]);
  for (std::size_t i = 1; i < recipe_size; ++i) {
    ingredient_rooms.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n))));
  }
  const int key_room = near_rooms[uniform_index(rng, near_rooms.size())];
  const int kitchen = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));

  // 0-2 extra edges, never across the locked door.
  const std::size_t extra = uniform_index(rng, 3);
  std::size_t added = 0;
  for (int attempt = 0; attempt < 32 && added < extra; ++attempt) {
    const int a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    const int b = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    if (a == b || beyond[static_cast<std::size_t>(a)] != beyond[static_cast<std::size_t>(b)]) continue;
    auto& ea = adj[static_cast<std::size_t>(a)];
    if (std::find(ea.begin(), ea.end(), b) != ea.end()) continue;
    ea.push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
    ++added;
  }

  spec.layout.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Room& room = spec.layout[static_cast<std::size_t>(i)];
    room.name = names[static_cast<std::size_t>(i)];
    room.exits = adj[static_cast<std::size_t>(i)];
    std::sort(room.exits.begin(), room.exits.end());
  }
  for (std::size_t i = 0; i < recipe_size; ++i) {
    spec.layout[static_cast<std::size_t>(ingredient_rooms[i])].items.push_back(ingredients[i]);
  }
  spec.layout[static_cast<std::size_t>(key_room)].items.emplace_back(kKey);

  spec.recipe = ingredients;
  spec.start_room = 0;
  spec.kitchen = kitchen;
  spec.locked_door = {parent[static_cast<std::size_t>(gate)], gate};

  for (const auto& room : spec.layout) spec.commands.push_back("go to " + room.name);
  for (const auto& ing : spec.recipe) spec.commands.push_back("take " + ing);
  spec.commands.emplace_back("take key");
  spec.commands.emplace_back("open door");
  spec.commands.emplace_back("cook meal");
  spec.commands.emplace_back("eat meal");

  plan_cooking_solution(spec, key_room, ingredient_rooms);
}

int compute_max_score(const GameSpec& spec) {
  if (spec.kind != GameKind::Cooking || !spec.intermediate_rewards) return 1;
  return static_cast<int>(spec.recipe.size()) + 2;
}

}  // namespace

std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::Cooking: return "cooking";
    case GameKind::Chain: return "chain";
    case GameKind::Tree: return "tree";
  }
  return "chain";
}

std::optional<GameKind> parse_game_kind(std::string_view text) {
  if (text == "cooking") return GameKind::Cooking;
  if (text == "chain") return GameKind::Chain;
  if (text == "tree") return GameKind::Tree;
  return std::nullopt;
}

int default_max_steps(GameKind kind, const GameSizes& sizes) {
  // A chain episode gets twice the walkthrough length: long enough to
  // recover from a few wrong moves, short enough that a random walk
  // usually fails.
  if (kind == GameKind::Chain) return 2 * (sizes.chain_length - 1);
  return 100;
}

std::string GameSpec::id() const {
  return std::string(to_string(kind)) + "-" + std::to_string(seed);
}

GameSpec generate_game(GameKind kind, std::uint64_t seed, const GameSizes& sizes) {
  GameSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(kind) + 1));

  switch (kind) {
    case GameKind::Cooking:
      check_range("rooms", sizes.rooms, 2, 12);
      spec.rooms = sizes.rooms;
      generate_cooking(spec, rng);
      break;
    case GameKind::Chain:
      check_range("chain_length", sizes.chain_length, 3, 64);
      spec.chain_length = sizes.chain_length;
      spec.commands = {std::string(kGoLeft), std::string(kGoRight)};
      spec.solution.assign(static_cast<std::size_t>(spec.chain_length - 1), std::string(kGoRight));
      break;
    case GameKind::Tree:
      check_range("tree_depth", sizes.tree_depth, 2, 10);
      spec.tree_depth = sizes.tree_depth;
      spec.commands = {std::string(kGoLeft), std::string(kGoRight)};
      for (int i = 0; i < spec.tree_depth; ++i) {
        const int bit = static_cast<int>(uniform_index(rng, 2));
        spec.goal_path.push_back(bit);
        spec.solution.emplace_back(bit == 0 ? kGoLeft : kGoRight);
      }
      break;
  }

  spec.max_steps = sizes.max_steps.value_or(default_max_steps(kind, sizes));
  if (spec.max_steps < static_cast<int>(spec.solution.size())) {
    throw ConfigError("max_steps " + std::to_string(spec.max_steps) +
                      " is shorter than the walkthrough (" + std::to_string(spec.solution.size()) +
                      " steps)");
  }
  spec.max_score = compute_max_score(spec);
  return spec;
}

GameSpec with_intermediate_rewards(GameSpec spec, bool enabled) {
  spec.intermediate_rewards = enabled;
  spec.max_score = compute_max_score(spec);
  return spec;
}

// ------------------------------------------------------------- simulation

std::pair<EnvState, std::string> reset(const GameSpec& spec) {
  EnvState s;
  s.spec = &spec;
  std::string obs;
  switch (spec.kind) {
    case GameKind::Cooking:
      s.location = spec.start_room;
      obs = "You are in the " + spec.layout[static_cast<std::size_t>(s.location)].name + ". " +
            neutral(s, kSaltReset) + " " + describe_room(s);
      break;
    case GameKind::Chain:
      s.location = 0;
      obs = "You stand at the west end of a long corridor. " + neutral(s, kSaltReset);
      break;
    case GameKind::Tree:
      s.location = 1;
      obs = "You stand at the root of a great branching tree of paths. " + neutral(s, kSaltReset);
      break;
  }
  return {std::move(s), std::move(obs)};
}

StepResult step(EnvState& state, std::string_view action_text) {
  if (state.spec == nullptr) throw UsageError("step on a state that was never reset");
  if (state.done) throw UsageError("step called on a finished episode");
  const TokenList toks = tokenize(action_text);
  StepResult r;
  switch (state.spec->kind) {
    case GameKind::Cooking: r = step_cooking(state, toks); break;
    case GameKind::Chain: r = step_chain(state, toks); break;
    case GameKind::Tree: r = step_tree(state, toks); break;
  }
  ++state.steps_taken;
  if (state.goal_reached || state.steps_taken >= state.spec->max_steps) state.done = true;
  r.done = state.done;
  return r;
}

std::vector<std::string> valid_actions(const EnvState& state) {
  if (state.spec->kind == GameKind::Cooking) return actions_cooking(state);
  return {std::string(kGoLeft), std::string(kGoRight)};
}

std::vector<std::string> walkthrough(const GameSpec& spec) { return spec.solution; }

std::string RandomPolicy::act(const EnvState& state, std::string_view, Rng& rng) {
  const auto actions = valid_actions(state);
  return actions[uniform_index(rng, actions.size())];
}

std::string WalkthroughPolicy::act(const EnvState&, std::string_view, Rng&) {
  if (next_ >= solution_.size()) return "look";
  return solution_[next_++];
}

Trajectory rollout(const GameSpec& spec, Policy& policy, int max_steps, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  policy.begin_episode();
  auto [state, obs] = reset(spec);
  const int limit = max_steps > 0 ? max_steps : spec.max_steps;
  Trajectory t;
  t.game_id = spec.id();
  while (!state.done && state.steps_taken < limit) {
    std::string action = policy.act(state, obs, rng);
    StepResult r = step(state, action);
    t.steps.push_back({std::move(obs), std::move(action), r.r_env, r.obs_text, r.done});
    obs = std::move(r.obs_text);
  }
  t.label = state.goal_reached ? Label::Win : Label::Loss;
  return t;
}

std::vector<std::string> template_texts(const GameSpec& spec) {
  std::vector<std::string> out;
  for (const auto* bank : {&positive_phrases(), &negative_phrases(), &neutral_phrases()}) {
    out.insert(out.end(), bank->begin(), bank->end());
  }
  static const std::vector<std::string> skeletons = {
      std::string(kNotUnderstood),
      "You are in the . Exits: . You see: .",
      "You enter the . You can't go there. You are already in the .",
      "You can't reach the from here. You smash into the locked door.",
      "You search, but there is no here. You took the .",
      "There is no locked door here. The door is locked and you have no key.",
      "You unlock the door with the key.",
      "The meal is already cooked. There is no stove here.",
      "You are missing ingredients and burn the pan. You cook a delicious meal.",
      "There is nothing to eat. You ate the meal. You win!",
      "You bump into the cold stone wall. You walk back west along the corridor.",
      "You walk east along the corridor. You step out of the corridor into daylight.",
      "You stand at the west end of a long corridor.",
      "You stand at the root of a great branching tree of paths.",
      "You take the left branch. You take the right branch.",
      "You found the hidden treasure. The path ends at a dead end.",
  };
  out.insert(out.end(), skeletons.begin(), skeletons.end());
  for (const auto& room : spec.layout) out.push_back(room.name);
  for (const auto& ing : spec.recipe) out.push_back(ing);
  out.insert(out.end(), spec.commands.begin(), spec.commands.end());
  return out;
}

// ----------------------------------------------------------- persistence

namespace {
using ojson = nlohmann::ordered_json;

template <typename T>
T get(const ojson& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("game spec is missing '") + key + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("game spec field '") + key + "' has the wrong type");
  }
}
}  // namespace

std::string spec_to_json(const GameSpec& spec) {
  ojson j;
  j["version"] = kGameSpecFormatVersion;
  j["kind"] = std::string(to_string(spec.kind));
  j["seed"] = spec.seed;
  j["rooms"] = spec.rooms;
  j["chain_length"] = spec.chain_length;
  j["tree_depth"] = spec.tree_depth;
  j["max_steps"] = spec.max_steps;
  j["intermediate_rewards"] = spec.intermediate_rewards;
  j["recipe"] = spec.recipe;
  j["solution"] = spec.solution;
  j["max_score"] = spec.max_score;
  j["commands"] = spec.commands;
  ojson layout = ojson::array();
  for (const auto& room : spec.layout) {
    ojson r;
    r["name"] = room.name;
    r["exits"] = room.exits;
    r["items"] = room.items;
    layout.push_back(std::move(r));
  }
  j["layout"] = std::move(layout);
  j["start_room"] = spec.start_room;
  j["kitchen"] = spec.kitchen;
  j["locked_door"] = {spec.locked_door.first, spec.locked_door.second};
  j["goal_path"] = spec.goal_path;
  return j.dump(2) + "\n";
}

GameSpec spec_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("game spec is not valid JSON: ") + e.what());
  }
  const int version = get<int>(j, "version");
  if (version != kGameSpecFormatVersion) {
    throw FormatError("unsupported game spec version " + std::to_string(version));
  }
  GameSpec spec;
  const auto kind = parse_game_kind(get<std::string>(j, "kind"));
  if (!kind) throw FormatError("unknown game kind");
  spec.kind = *kind;
  spec.seed = get<std::uint64_t>(j, "seed");
  spec.rooms = get<int>(j, "rooms");
  spec.chain_length = get<int>(j, "chain_length");
  spec.tree_depth = get<int>(j, "tree_depth");
  spec.max_steps = get<int>(j, "max_steps");
  spec.intermediate_rewards = get<bool>(j, "intermediate_rewards");
  spec.recipe = get<std::vector<std::string>>(j, "recipe");
  spec.solution = get<std::vector<std::string>>(j, "solution");
  spec.max_score = get<int>(j, "max_score");
  spec.commands = get<std::vector<std::string>>(j, "commands");
  for (const auto& r : get<ojson>(j, "layout")) {
    Room room;
    room.name = get<std::string>(r, "name");
    room.exits = get<std::vector<int>>(r, "exits");
    room.items = get<std::vector<std::string>>(r, "items");
    spec.layout.push_back(std::move(room));
  }
  spec.start_room = get<int>(j, "start_room");
  spec.kitchen = get<int>(j, "kitchen");
  const auto door = get<std::vector<int>>(j, "locked_door");
  if (door.size() != 2) throw FormatError("locked_door must have two entries");
  spec.locked_door = {door[0], door[1]};
  spec.goal_path = get<std::vector<int>>(j, "goal_path");

  const int n = static_cast<int>(spec.layout.size());
  if (spec.kind == GameKind::Cooking) {
    auto in_range = [n](int x) { return x >= 0 && x < n; };
    if (n < 2 || !in_range(spec.start_room) || !in_range(spec.kitchen) ||
        !in_range(door[0]) || !in_range(door[1])) {
      throw FormatError("cooking layout indices out of range");
    }
    for (const auto& room : spec.layout) {
      for (int e : room.exits) {
        if (!in_range(e)) throw FormatError("room exit out of range");
      }
    }
  }
  if (spec.kind == GameKind::Chain && spec.chain_length < 2) throw FormatError("chain too short");
  if (spec.kind == GameKind::Tree &&
      static_cast<int>(spec.goal_path.size()) != spec.tree_depth) {
    throw FormatError("goal_path length must equal tree_depth");
  }
  return spec;
}

void save_spec(const std::filesystem::path& path, const GameSpec& spec) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << spec_to_json(spec);
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

GameSpec load_spec(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return spec_from_json(ss.str());
}

}  // namespace sshape
