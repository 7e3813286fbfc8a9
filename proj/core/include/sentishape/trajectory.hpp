#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sshape {

enum class Label { Win, Loss, Unlabeled };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Transition {
  std::string obs_text;
  std::string action_text;
  double r_env = 0.0;
  std::string next_obs_text;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
  std::string game_id;
  Label label = Label::Unlabeled;
  std::vector<Transition> steps;

  double total_reward() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

inline constexpr int kTrajectoryFormatVersion = 1;

// JSON-lines persistence. Each trajectory is a header line
//   {"game_id":..., "label":"win"|"loss"|"unlabeled", "version":1}
// followed by one line per step
//   {"obs":..., "action":..., "r_env":..., "next_obs":..., "done":...}.
// A header with no step lines is an empty block; it is skipped on load and is
// what an empty trajectory list is written as, so every file carries a version.
void save_trajectories(const std::filesystem::path& path,
                       const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

std::string serialize_trajectories(const std::vector<Trajectory>& trajectories);
// Throws FormatError naming the 1-based line number of the first bad line.
std::vector<Trajectory> parse_trajectories(std::string_view text);

}  // namespace sshape
