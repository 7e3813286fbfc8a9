#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentishape/error.hpp"
#include "sentishape/trajectory.hpp"

namespace sshape {

using nlohmann::json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Win: return "win";
    case Label::Loss: return "loss";
    case Label::Unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "win") return Label::Win;
  if (text == "loss") return Label::Loss;
  if (text == "unlabeled") return Label::Unlabeled;
  return std::nullopt;
}

double Trajectory::total_reward() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.r_env;
  return total;
}

namespace {

std::string header_line(const std::string& game_id, Label label) {
  json h;
  h["game_id"] = game_id;
  h["label"] = std::string(to_string(label));
  h["version"] = kTrajectoryFormatVersion;
  return h.dump();
}

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'", line);
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type", line);
  }
}

}  // namespace

std::string serialize_trajectories(const std::vector<Trajectory>& trajectories) {
  std::string out;
  if (trajectories.empty()) {
    out += header_line("", Label::Unlabeled);
    out += '\n';
    return out;
  }
  for (const auto& t : trajectories) {
    out += header_line(t.game_id, t.label);
    out += '\n';
    for (const auto& s : t.steps) {
      json j;
      j["obs"] = s.obs_text;
      j["action"] = s.action_text;
      j["r_env"] = s.r_env;
      j["next_obs"] = s.next_obs_text;
      j["done"] = s.done;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::vector<Trajectory> parse_trajectories(std::string_view text) {
  std::vector<Trajectory> out;
  std::optional<Trajectory> current;
  auto flush = [&] {
    if (current && !current->steps.empty()) out.push_back(std::move(*current));
    current.reset();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw FormatError("malformed JSON record", line_no);
    }
    if (!j.is_object()) throw FormatError("record is not a JSON object", line_no);

    if (j.contains("version")) {
      const int version = field<int>(j, "version", line_no);
      if (version != kTrajectoryFormatVersion) {
        throw FormatError("unsupported trajectory format version " + std::to_string(version),
                          line_no);
      }
      flush();
      Trajectory t;
      t.game_id = field<std::string>(j, "game_id", line_no);
      const auto label = parse_label(field<std::string>(j, "label", line_no));
      if (!label) throw FormatError("unknown label", line_no);
      t.label = *label;
      current = std::move(t);
      continue;
    }

    if (!current) throw FormatError("step record before any trajectory header", line_no);
    Transition s;
    s.obs_text = field<std::string>(j, "obs", line_no);
    s.action_text = field<std::string>(j, "action", line_no);
    s.r_env = field<double>(j, "r_env", line_no);
    s.next_obs_text = j.contains("next_obs") ? field<std::string>(j, "next_obs", line_no)
                                             : std::string{};
    s.done = field<bool>(j, "done", line_no);
    current->steps.push_back(std::move(s));
  }
  flush();
  return out;
}

void save_trajectories(const std::filesystem::path& path,
                       const std::vector<Trajectory>& trajectories) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << serialize_trajectories(trajectories);
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_trajectories(ss.str());
}

}  // namespace sshape
