#include "sentishape/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "sentishape/error.hpp"

namespace sshape {

namespace {

void check_pair(std::size_t a, std::size_t b) {
  if (a != b) throw UsageError("correlation inputs differ in length");
  if (a < 2) throw UsageError("correlation needs at least two observations");
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> p_for(double r, std::size_t n) {
  if (n < 4) return std::nullopt;
  return correlation_p_value(r, n);
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs.size(), ys.size());
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("zero variance");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank mean(i+1 .. j+1)
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double ar = std::abs(r);
  if (ar >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = ar * std::sqrt(df / (1.0 - ar * ar));
  boost::math::students_t dist(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs.size(), ys.size());
  const auto rx = midranks(xs);
  const auto ry = midranks(ys);
  CorrelationResult out;
  out.n = xs.size();
  try {
    out.r = pearson(rx, ry);
    out.p = p_for(out.r, out.n);
  } catch (const UndefinedCorrelation&) {
    out.r = 0.0;
    out.p = 1.0;
    out.defined = false;
  }
  return out;
}

CorrelationResult point_biserial(std::span<const int> labels, std::span<const double> values) {
  check_pair(labels.size(), values.size());
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      sum1 += values[i];
      ++n1;
    } else if (labels[i] == 0) {
      sum0 += values[i];
      ++n0;
    } else {
      throw UsageError("point-biserial labels must be 0 or 1");
    }
  }
  if (n1 == 0 || n0 == 0) {
    throw UndefinedCorrelation("point-biserial correlation needs both classes present");
  }
  const double n = static_cast<double>(labels.size());
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double s_n = std::sqrt(ss / n);
  if (s_n == 0.0) throw UndefinedCorrelation("point-biserial values have zero variance");
  const double m1 = sum1 / static_cast<double>(n1);
  const double m0 = sum0 / static_cast<double>(n0);
  CorrelationResult out;
  out.n = labels.size();
  out.r = std::clamp((m1 - m0) / s_n * std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) / (n * n)),
                     -1.0, 1.0);
  out.p = p_for(out.r, out.n);
  return out;
}

MetricsReport prf1(std::span<const int> predicted, std::span<const int> truth, int positive_class) {
  if (predicted.size() != truth.size()) throw UsageError("prf1 inputs differ in length");
  MetricsReport m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == positive_class;
    const bool t = truth[i] == positive_class;
    if (p && t) ++m.true_positive;
    else if (p) ++m.false_positive;
    else if (t) ++m.false_negative;
    else ++m.true_negative;
  }
  const auto tp = static_cast<double>(m.true_positive);
  if (m.true_positive + m.false_positive > 0) {
    m.precision = tp / static_cast<double>(m.true_positive + m.false_positive);
  }
  if (m.true_positive + m.false_negative > 0) {
    m.recall = tp / static_cast<double>(m.true_positive + m.false_negative);
  }
  if (m.precision > 0.0 && m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

namespace {

double mean_share_tail(std::span<const double> polarities, std::size_t last_k) {
  if (polarities.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = last_k == 0 ? polarities.size() : std::min(last_k, polarities.size());
  double s = 0.0;
  for (std::size_t i = polarities.size() - k; i < polarities.size(); ++i) {
    s += positive_share(polarities[i]);
  }
  return s / static_cast<double>(k);
}

std::vector<double> step_polarities(const Trajectory& t, Scorer& scorer) {
  std::vector<double> out;
  out.reserve(t.steps.size());
  for (const auto& s : t.steps) out.push_back(scorer.score(s.next_obs_text).value);
  return out;
}

}  // namespace

std::vector<double> mean_trajectory_sentiment(const std::vector<Trajectory>& trajectories,
                                              Scorer& scorer, std::size_t last_k) {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(mean_share_tail(step_polarities(t, scorer), last_k));
  return out;
}

std::vector<LastKResult> last_k_table(const std::vector<std::vector<double>>& step_pols,
                                      const std::vector<int>& win_labels,
                                      const std::vector<std::size_t>& ks) {
  if (step_pols.size() != win_labels.size()) throw UsageError("labels and trajectories differ in count");
  if (ks.empty()) throw UsageError("last-k analysis needs at least one k");
  std::vector<LastKResult> out;
  for (std::size_t k : ks) {
    LastKResult res;
    res.row.k = k;
    std::vector<double> means;
    std::vector<int> labels;
    double sum_w = 0.0, sum_l = 0.0;
    for (std::size_t i = 0; i < step_pols.size(); ++i) {
      if (step_pols[i].empty()) continue;
      const double m = mean_share_tail(step_pols[i], k);
      means.push_back(m);
      labels.push_back(win_labels[i]);
      if (win_labels[i] == 1) {
        sum_w += m;
        ++res.wins;
      } else {
        sum_l += m;
        ++res.losses;
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.row.mean_pos_win = res.wins ? sum_w / static_cast<double>(res.wins) : nan;
    res.row.mean_pos_loss = res.losses ? sum_l / static_cast<double>(res.losses) : nan;
    res.row.difference = res.row.mean_pos_win - res.row.mean_pos_loss;

    double ss = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      const double mu = labels[i] == 1 ? res.row.mean_pos_win : res.row.mean_pos_loss;
      ss += (means[i] - mu) * (means[i] - mu);
    }
    const std::size_t dof = means.size() >= 2 ? means.size() - 2 : 0;
    res.row.sigma = (res.wins && res.losses && dof > 0) ? std::sqrt(ss / static_cast<double>(dof)) : 0.0;

    if (res.wins == 0 || res.losses == 0) {
      res.spearman_error = res.point_biserial_error = "needs both win and loss trajectories";
    } else {
      std::vector<double> xs(labels.begin(), labels.end());
      const auto s = spearman(xs, means);
      if (s.defined) {
        res.spearman = s;
      } else {
        res.spearman_error = "zero variance";
      }
      try {
        res.point_biserial = point_biserial(labels, means);
      } catch (const UndefinedCorrelation& e) {
        res.point_biserial_error = e.what();
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

std::vector<LastKResult> last_k_table(const std::vector<Trajectory>& trajectories,
                                      const std::vector<std::size_t>& ks, Scorer& scorer) {
  std::vector<std::vector<double>> pols;
  std::vector<int> labels;
  for (const auto& t : trajectories) {
    if (t.label == Label::Unlabeled) continue;
    pols.push_back(step_polarities(t, scorer));
    labels.push_back(t.label == Label::Win ? 1 : 0);
  }
  return last_k_table(pols, labels, ks);
}

}  // namespace sshape
