#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentishape/sentiment.hpp"
#include "sentishape/trajectory.hpp"

namespace sshape {

struct CorrelationResult {
  double r = 0.0;
  // Two-sided Student-t approximation; absent for n < 4.
  std::optional<double> p;
  std::size_t n = 0;
  // false when r is undefined (zero variance); r is then 0 and p is 1
  bool defined = true;
};

// Pearson product-moment correlation. Throws UsageError on length mismatch
// or n < 2 and UndefinedCorrelation on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> midranks(std::span<const double> values);

// p = P(|T| >= |t|) with t = r sqrt((n-2)/(1-r^2)), df = n-2.
double correlation_p_value(double r, std::size_t n);

// Pearson of midranks. Zero variance yields defined=false rather than an
// error.
CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys);

// Labels must be 0/1 with both classes present; throws UndefinedCorrelation
// otherwise or when `values` is constant.
CorrelationResult point_biserial(std::span<const int> labels, std::span<const double> values);

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;
};

// Precision/recall are 0 when their denominator is 0; f1 is 0 when either is.
MetricsReport prf1(std::span<const int> predicted, std::span<const int> truth, int positive_class = 1);

// (polarity + 1) / 2, the share of positive sentiment.
inline double positive_share(double polarity) { return (polarity + 1.0) / 2.0; }

// Per-trajectory mean positive share over the scored observations (each
// step's next observation). `last_k` restricts to the final min(k, len)
// steps; 0 means all.
std::vector<double> mean_trajectory_sentiment(const std::vector<Trajectory>& trajectories,
                                              Scorer& scorer, std::size_t last_k = 0);

struct LastKRow {
  std::size_t k = 0;
  double mean_pos_win = 0.0;
  double mean_pos_loss = 0.0;
  double difference = 0.0;
  double sigma = 0.0;  // pooled standard deviation of the two groups
};

struct LastKResult {
  LastKRow row;
  std::size_t wins = 0;
  std::size_t losses = 0;
  // absent when undefined; `spearman_error` / `point_biserial_error` say why
  std::optional<CorrelationResult> spearman;
  std::optional<CorrelationResult> point_biserial;
  std::string spearman_error;
  std::string point_biserial_error;
};

inline const std::vector<std::size_t>& default_last_k_values() {
  static const std::vector<std::size_t> ks = {5, 10, 15, 20, 35, 50, 100};
  return ks;
}

// Unlabeled trajectories are ignored.
std::vector<LastKResult> last_k_table(const std::vector<Trajectory>& trajectories,
                                      const std::vector<std::size_t>& ks, Scorer& scorer);

// Same analysis from precomputed per-step polarities (one vector per
// trajectory) and win flags; used when the scorer has already been run.
std::vector<LastKResult> last_k_table(const std::vector<std::vector<double>>& step_polarities,
                                      const std::vector<int>& win_labels,
                                      const std::vector<std::size_t>& ks);

}  // namespace sshape
