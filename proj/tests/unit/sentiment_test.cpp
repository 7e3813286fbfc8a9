#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "nb_oracle.hpp"
#include "sentishape/error.hpp"
#include "sentishape/random.hpp"
#include "sentishape/sentiment.hpp"

using namespace sshape;

namespace {

NaiveBayesModel hand_model() { return NaiveBayesModel::fit({"good job", "well done"}, {"you died"}, 1.0); }

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

TEST(NaiveBayes, HandComputedCounts) {
  const auto m = hand_model();
  EXPECT_NEAR(std::exp(m.log_prior(NaiveBayesModel::kPositive)), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::exp(m.log_likelihood("good", NaiveBayesModel::kPositive)), 2.0 / 10.0, 1e-15);
  EXPECT_NEAR(std::exp(m.log_likelihood("you", NaiveBayesModel::kNegative)), 2.0 / 8.0, 1e-15);
  // unseen words get the zero-count value
  EXPECT_NEAR(std::exp(m.log_likelihood("zebra", NaiveBayesModel::kNegative)), 1.0 / 8.0, 1e-15);
}

TEST(NaiveBayes, HandComputedPolarities) {
  const auto m = hand_model();
  // pos: 2/3 * (1/10)^2, neg: 1/3 * (2/8)^2 for "you died"
  const double pos = 2.0 / 3 * 0.01, neg = 1.0 / 3 * 0.0625;
  EXPECT_NEAR(m.polarity("you died"), 2 * pos / (pos + neg) - 1, 1e-12);
  EXPECT_NEAR(m.polarity("you died"), -0.515, 5e-4);
  EXPECT_NEAR(m.polarity("good job"), 0.673, 5e-4);
  EXPECT_NEAR(m.polarity(""), 1.0 / 3.0, 1e-12);
}

TEST(NaiveBayes, DuplicatedCorporaKeepPriorsAndVocabulary) {
  const auto m = hand_model();
  const auto d = NaiveBayesModel::fit({"good job", "well done", "good job", "well done"}, {"you died", "you died"}, 1.0);
  EXPECT_EQ(d.vocabulary(), m.vocabulary());
  for (int c = 0; c < 2; ++c) EXPECT_NEAR(d.log_prior(c), m.log_prior(c), 1e-15);
  // Smoothed likelihoods only stay fixed when alpha doubles with the counts.
  const auto d2 = NaiveBayesModel::fit({"good job", "well done", "good job", "well done"}, {"you died", "you died"}, 2.0);
  for (const auto& w : m.vocabulary().tokens()) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(d2.log_likelihood(w, c), m.log_likelihood(w, c), 1e-14) << w;
  }
  EXPECT_NE(d.log_likelihood("good", 0), m.log_likelihood("good", 0));
}

TEST(NaiveBayes, LargeAlphaApproachesUniform) {
  const auto m = NaiveBayesModel::fit({"a b", "c"}, {"d e", "f"}, 1e9);
  for (const char* w : {"a", "b", "c", "d", "e", "f"}) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::exp(m.log_likelihood(w, c)), 1.0 / 6.0, 1e-8);
  }
}

TEST(NaiveBayes, FitErrors) {
  EXPECT_THROW(NaiveBayesModel::fit({}, {"x"}, 1.0), TrainingError);
  EXPECT_THROW(NaiveBayesModel::fit({"x"}, {}, 1.0), TrainingError);
  EXPECT_THROW(NaiveBayesModel::fit({"x"}, {"y"}, 0.0), ConfigError);
  EXPECT_THROW(NaiveBayesModel::fit({"x"}, {"y"}, -1.0), ConfigError);
}

TEST(NaiveBayes, LikelihoodsSumToOnePerClass) {
  const auto m = NaiveBayesModel::fit({"good job well done", "great"}, {"you died", "bad bad move"}, 0.5);
  const auto& toks = m.vocabulary().tokens();
  for (int c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (std::size_t i = 2; i < toks.size(); ++i) sum += std::exp(m.log_likelihood(toks[i], c));
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_NEAR(std::exp(m.log_prior(0)) + std::exp(m.log_prior(1)), 1.0, 1e-15);
}

TEST(NaiveBayes, PosteriorsSumToOneInLogSpace) {
  const auto m = NaiveBayesModel::fit({"good job well done", "great"}, {"you died", "bad bad move"}, 1.0);
  for (const char* text : {"", "good", "bad bad bad bad bad bad bad bad", "unknown words only", "great move"}) {
    const double s0 = m.class_log_score(text, 0), s1 = m.class_log_score(text, 1);
    const double z = log_sum_exp(s0, s1);
    EXPECT_NEAR(log_sum_exp(s0 - z, s1 - z), 0.0, 1e-12);
    EXPECT_NEAR(m.positive_posterior(text), std::exp(s0 - z), 1e-12);
  }
}

TEST(NaiveBayes, LongTextsStayFinite) {
  const auto m = hand_model();
  std::string text;
  for (int i = 0; i < 20000; ++i) text += "died ";
  EXPECT_NEAR(m.polarity(text), -1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(m.class_log_score(text, 0)));
}

TEST(NaiveBayes, PolarityIgnoresTokenOrder) {
  const auto m = NaiveBayesModel::fit({"good job well done", "great"}, {"you died", "bad bad move"}, 1.0);
  EXPECT_DOUBLE_EQ(m.polarity("good move you died"), m.polarity("died you move good"));
}

TEST(NaiveBayes, AppendingAPositiveLeaningTokenNeverLowersPolarity) {
  Rng rng(3);
  const char* words[] = {"a", "b", "c", "d", "e", "f", "g"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> pos, neg;
    for (int i = 0; i < 3; ++i) {
      std::string p, n;
      for (int j = 0; j < 4; ++j) {
        p += std::string(words[uniform_index(rng, 7)]) + " ";
        n += std::string(words[uniform_index(rng, 7)]) + " ";
      }
      pos.push_back(p);
      neg.push_back(n);
    }
    const auto m = NaiveBayesModel::fit(pos, neg, 0.5 + uniform_unit(rng));
    std::string text;
    for (int j = 0; j < 3; ++j) text += std::string(words[uniform_index(rng, 7)]) + " ";
    for (const char* w : words) {
      const bool leans_positive = m.log_likelihood(w, 0) >= m.log_likelihood(w, 1);
      const double before = m.polarity(text), after = m.polarity(text + w);
      if (leans_positive) EXPECT_GE(after, before - 1e-12);
    }
  }
}

TEST(NaiveBayes, MatchesBruteForceOracle) {
  const std::vector<std::string> pos{"Good job!", "well done, friend", "GOOD"}, neg{"you died.", "bad job"};
  const auto m = NaiveBayesModel::fit(pos, neg, 0.7);
  const oracle::BruteNB o(pos, neg, 0.7);
  for (const char* t : {"good job", "friend died", "", "nothing known", "Bad, bad JOB!"}) {
    EXPECT_NEAR(m.polarity(t), o.polarity(t), 1e-12) << t;
  }
}

TEST(NaiveBayes, SaveLoadKeepsPolarities) {
  const auto m = NaiveBayesModel::fit({"good job well done", "great"}, {"you died", "bad bad move"}, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "sshape_nb.json";
  m.save(path);
  const auto back = NaiveBayesModel::load(path);
  EXPECT_EQ(back, m);
  for (const char* t : {"good", "you died", "zzz"}) EXPECT_EQ(back.polarity(t), m.polarity(t));
  std::filesystem::remove(path);
}

TEST(NaiveBayes, RejectsForeignJson) {
  EXPECT_THROW(NaiveBayesModel::from_json("{\"version\":9}"), FormatError);
  EXPECT_THROW(NaiveBayesModel::from_json("not json"), FormatError);
}

TEST(Gate, TabulatedCases) {
  EXPECT_EQ(gate(0.8, 0.7), 0.8);
  EXPECT_EQ(gate(-0.9, 0.7), -0.9);
  EXPECT_EQ(gate(0.7, 0.7), 0.0);
  EXPECT_EQ(gate(-0.7, 0.7), 0.0);
  EXPECT_EQ(gate(0.3, 0.7), 0.0);
}

TEST(Gate, IdempotentAndOutsideTheBand) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = uniform_real(rng, -1.0, 1.0), tau = uniform_real(rng, 0.0, 0.99);
    const double g = gate(x, tau);
    EXPECT_EQ(gate(g, tau), g);
    EXPECT_TRUE(g == 0.0 || (std::abs(g) > tau && std::abs(g) <= 1.0));
  }
}

TEST(Combine, AffineAndExactWhenOff) {
  EXPECT_DOUBLE_EQ(combine_reward(1, 0.8, 0.1), 1.08);
  EXPECT_DOUBLE_EQ(combine_reward(0, -1, 0.1), -0.1);
  EXPECT_EQ(combine_reward(2, 0.5, 0), 2.0);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double r = uniform_real(rng, -5, 5);
    EXPECT_EQ(combine_reward(r, 0.0, uniform_unit(rng)), r);
    EXPECT_EQ(combine_reward(r, uniform_real(rng, -1, 1), 0.0), r);
  }
}

TEST(ShapingConfig, DefaultsAndParsing) {
  ShapingConfig c;
  EXPECT_EQ(c.scale, 0.1);
  EXPECT_EQ(c.tau, 0.7);
  EXPECT_TRUE(c.gate_enabled);
  EXPECT_EQ(c.scorer, ScorerKind::None);
  c = ShapingConfig::parse_scorer("nb:model.json", c);
  EXPECT_EQ(c.scorer, ScorerKind::NaiveBayes);
  EXPECT_EQ(c.scorer_target, "model.json");
  EXPECT_EQ(c.scorer_string(), "nb:model.json");
  EXPECT_EQ(ShapingConfig::parse_scorer("ext:localhost:9000").scorer_target, "localhost:9000");
  EXPECT_THROW(ShapingConfig::parse_scorer("bert"), ConfigError);
}

TEST(ShapingConfig, Validation) {
  ShapingConfig c;
  c.scale = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.scale = 0.1;
  c.tau = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.tau = 0.7;
  c.scorer = ScorerKind::External;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ShapingConfig, ShapedRewardGatesWhenEnabled) {
  ShapingConfig c;
  EXPECT_DOUBLE_EQ(c.shaped_reward(0.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(c.shaped_reward(0.0, 0.9), 0.09);
  c.gate_enabled = false;
  EXPECT_DOUBLE_EQ(c.shaped_reward(0.0, 0.5), 0.05);
}

TEST(NullScorer, AlwaysZero) {
  NullScorer s;
  EXPECT_EQ(s.score("Great job!").value, 0.0);
  EXPECT_EQ(s.score("Great job!").source, PolaritySource::None);
}
