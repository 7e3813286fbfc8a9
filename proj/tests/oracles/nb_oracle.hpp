#pragma once

// Count-based naive Bayes written from the textbook definition, sharing no
// code with the library model.

#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) out.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  flush();
  return out;
}

struct BruteNB {
  double alpha = 1.0;
  double docs[2] = {0, 0};
  double total[2] = {0, 0};
  std::map<std::string, double> count[2];
  std::set<std::string> vocab;

  BruteNB(const std::vector<std::string>& pos, const std::vector<std::string>& neg, double a) : alpha(a) {
    const std::vector<std::string>* sets[2] = {&pos, &neg};
    for (int c = 0; c < 2; ++c) {
      for (const auto& d : *sets[c]) {
        docs[c] += 1;
        for (const auto& w : words(d)) {
          count[c][w] += 1;
          total[c] += 1;
          vocab.insert(w);
        }
      }
    }
  }

  double prior(int c) const { return docs[c] / (docs[0] + docs[1]); }

  // P(w | c); words outside the vocabulary get the zero-count value
  double likelihood(const std::string& w, int c) const {
    auto it = count[c].find(w);
    const double n = it == count[c].end() ? 0.0 : it->second;
    return (n + alpha) / (total[c] + alpha * static_cast<double>(vocab.size()));
  }

  double posterior_pos(const std::string& text) const {
    double s[2];
    for (int c = 0; c < 2; ++c) {
      s[c] = std::log(prior(c));
      for (const auto& w : words(text)) s[c] += std::log(likelihood(w, c));
    }
    return 1.0 / (1.0 + std::exp(s[1] - s[0]));
  }

  double polarity(const std::string& text) const { return 2.0 * posterior_pos(text) - 1.0; }
};

}  // namespace oracle
