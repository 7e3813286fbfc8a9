#include <cmath>

#include "sentishape/error.hpp"
#include "sentishape/sentiment.hpp"

namespace sshape {

double gate(double polarity, double tau) {
  return (polarity > tau || polarity < -tau) ? polarity : 0.0;
}

double combine_reward(double r_env, double polarity, double scale) {
  return r_env + scale * polarity;
}

void ShapingConfig::validate() const {
  if (!(scale >= 0.0 && scale <= 1.0)) throw ConfigError("scale must be in [0, 1]");
  if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("threshold must be in [0, 1)");
  if (scorer != ScorerKind::None && scorer_target.empty()) {
    throw ConfigError("scorer needs a model path or endpoint");
  }
}

ShapingConfig ShapingConfig::parse_scorer(std::string_view text, ShapingConfig base) {
  if (text == "none") {
    base.scorer = ScorerKind::None;
    base.scorer_target.clear();
  } else if (text.starts_with("nb:")) {
    base.scorer = ScorerKind::NaiveBayes;
    base.scorer_target = std::string(text.substr(3));
  } else if (text.starts_with("ext:")) {
    base.scorer = ScorerKind::External;
    base.scorer_target = std::string(text.substr(4));
  } else {
    throw ConfigError("scorer must be 'none', 'nb:<path>' or 'ext:<endpoint>', got '" +
                      std::string(text) + "'");
  }
  return base;
}

std::string ShapingConfig::scorer_string() const {
  switch (scorer) {
    case ScorerKind::None: return "none";
    case ScorerKind::NaiveBayes: return "nb:" + scorer_target;
    case ScorerKind::External: return "ext:" + scorer_target;
  }
  return "none";
}

double ShapingConfig::shaped_reward(double r_env, double polarity) const {
  return combine_reward(r_env, gate_enabled ? gate(polarity, tau) : polarity, scale);
}

}  // namespace sshape
