#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentishape/textcore.hpp"

namespace sshape {

enum class PolaritySource { NaiveBayes, External, None };

struct PolarityScore {
  double value = 0.0;  // in [-1, 1]
  PolaritySource source = PolaritySource::None;
};

// Anything that maps a text to a polarity in [-1, 1].
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual PolarityScore score(std::string_view text) = 0;
};

// Always 0; stands in for "no shaping".
class NullScorer final : public Scorer {
 public:
  PolarityScore score(std::string_view) override { return {0.0, PolaritySource::None}; }
};

// Multinomial naive Bayes over bag-of-words with add-alpha smoothing.
// Index 0 of the per-token tables is the positive class, 1 the negative.
class NaiveBayesModel {
 public:
  static constexpr int kPositive = 0;
  static constexpr int kNegative = 1;

  // Throws TrainingError on an empty corpus and ConfigError if alpha <= 0.
  static NaiveBayesModel fit(const std::vector<std::string>& positive_docs,
                             const std::vector<std::string>& negative_docs, double alpha = 1.0);

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  double alpha() const noexcept { return alpha_; }
  double log_prior(int cls) const { return log_prior_[cls]; }
  // Smoothed log P(token | class); unknown tokens get the UNK likelihood.
  double log_likelihood(std::string_view token, int cls) const;
  double log_likelihood(int token_id, int cls) const;

  // log P(class) + sum log P(token | class), unnormalized.
  double class_log_score(std::string_view text, int cls) const;
  // P(positive | text), computed with log-sum-exp.
  double positive_posterior(std::string_view text) const;
  double polarity(std::string_view text) const;

  std::string to_json() const;
  static NaiveBayesModel from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static NaiveBayesModel load(const std::filesystem::path& path);

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;

 private:
  Vocabulary vocab_;
  double alpha_ = 1.0;
  double log_prior_[2] = {0.0, 0.0};
  // [cls][token id]; ids 0 (PAD) and 1 (UNK) hold the zero-count likelihood
  std::vector<double> log_likelihood_[2];
};

inline constexpr int kNaiveBayesFormatVersion = 1;

class NaiveBayesScorer final : public Scorer {
 public:
  explicit NaiveBayesScorer(std::shared_ptr<const NaiveBayesModel> model)
      : model_(std::move(model)) {}
  PolarityScore score(std::string_view text) override {
    return {model_->polarity(text), PolaritySource::NaiveBayes};
  }
  const NaiveBayesModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NaiveBayesModel> model_;
};

// Zeroes polarities whose magnitude does not strictly exceed tau.
double gate(double polarity, double tau);

// r_env + scale * polarity
double combine_reward(double r_env, double polarity, double scale);

enum class ScorerKind { None, NaiveBayes, External };

struct ShapingConfig {
  double scale = 0.1;
  double tau = 0.7;
  bool gate_enabled = true;
  ScorerKind scorer = ScorerKind::None;
  std::string scorer_target;  // model path or endpoint

  // Throws ConfigError when scale or tau is out of range.
  void validate() const;
  // "none", "nb:<path>" or "ext:<endpoint>"
  static ShapingConfig parse_scorer(std::string_view text, ShapingConfig base);
  static ShapingConfig parse_scorer(std::string_view text);
  std::string scorer_string() const;

  // gate (when enabled) then combine
  double shaped_reward(double r_env, double polarity) const;
};

inline ShapingConfig ShapingConfig::parse_scorer(std::string_view text) {
  return parse_scorer(text, ShapingConfig{});
}

}  // namespace sshape
