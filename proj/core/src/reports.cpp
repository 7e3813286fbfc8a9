#include <algorithm>
#include <charconv>
#include <cmath>

#include "sentishape/harness.hpp"

namespace sshape {

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string epochs_csv(const std::vector<EpochReport>& reports) {
  const std::size_t games = reports.empty() ? 0 : reports.front().game_scores.size();
  std::string out = "epoch";
  for (std::size_t g = 0; g < games; ++g) out += ",game_" + std::to_string(g);
  out += ",epoch_score,aggregated,max_score\n";
  for (const auto& r : reports) {
    out += std::to_string(r.epoch);
    for (double s : r.game_scores) out += "," + format_number(s);
    out += "," + format_number(r.epoch_score) + "," + format_number(r.aggregated) + "," +
           format_number(r.max_score) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<EpochReport>& reports, std::size_t scorer_failures) {
  std::string out = "aggregated,max_score,epochs,scorer_failures\n";
  const double agg = reports.empty() ? 0.0 : reports.back().aggregated;
  const double best = reports.empty() ? 0.0 : reports.back().max_score;
  out += format_number(agg) + "," + format_number(best) + "," + std::to_string(reports.size()) + "," +
         std::to_string(scorer_failures) + "\n";
  return out;
}

std::string step_log_csv(const std::vector<StepLog>& log) {
  std::string out = "epoch,game,episode,step,action,r_env,polarity,r_total,done\n";
  for (const auto& s : log) {
    out += std::to_string(s.epoch) + "," + std::to_string(s.game) + "," + std::to_string(s.episode) +
           "," + std::to_string(s.step) + ",\"" + s.action + "\"," + format_number(s.r_env) + "," +
           format_number(s.polarity) + "," + format_number(s.r_total) + "," + (s.done ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string curve_svg(const std::vector<EpochReport>& reports) {
  constexpr double w = 640, h = 360, pad = 40;
  double lo = 0.0, hi = 1.0;
  for (const auto& r : reports) {
    lo = std::min(lo, r.epoch_score);
    hi = std::max(hi, r.epoch_score);
  }
  const double n = std::max<double>(1.0, static_cast<double>(reports.size()) - 1.0);
  std::string pts;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double x = pad + (w - 2 * pad) * static_cast<double>(i) / n;
    const double y = h - pad - (h - 2 * pad) * (reports[i].epoch_score - lo) / (hi - lo);
    if (!pts.empty()) pts += ' ';
    pts += format_number(std::round(x * 10) / 10) + "," + format_number(std::round(y * 10) / 10);
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\">\n";
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "  <line x1=\"40\" y1=\"320\" x2=\"600\" y2=\"320\" stroke=\"black\"/>\n";
  out += "  <line x1=\"40\" y1=\"40\" x2=\"40\" y2=\"320\" stroke=\"black\"/>\n";
  out += "  <text x=\"320\" y=\"352\" text-anchor=\"middle\" font-size=\"12\">epoch</text>\n";
  out += "  <text x=\"4\" y=\"30\" font-size=\"12\">score (" + format_number(lo) + " to " +
         format_number(hi) + ")</text>\n";
  out += "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace sshape
