#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentishape/error.hpp"
#include "sentishape/sentiment.hpp"

namespace sshape {

NaiveBayesModel NaiveBayesModel::fit(const std::vector<std::string>& positive_docs,
                                     const std::vector<std::string>& negative_docs,
                                     double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("naive Bayes alpha must be a finite value > 0");
  }
  if (positive_docs.empty() || negative_docs.empty()) {
    throw TrainingError("naive Bayes needs at least one positive and one negative document");
  }

  std::vector<TokenList> tokenized[2];
  std::vector<TokenList> corpus;
  for (int c = 0; c < 2; ++c) {
    const auto& docs = c == kPositive ? positive_docs : negative_docs;
    for (const auto& d : docs) {
      tokenized[c].push_back(tokenize(d));
      corpus.push_back(tokenized[c].back());
    }
  }

  NaiveBayesModel m;
  m.vocab_ = Vocabulary::build(corpus, 1);
  m.alpha_ = alpha;
  const std::size_t n_types = m.vocab_.size() - 2;
  if (n_types == 0) throw TrainingError("naive Bayes training corpus contains no tokens");

  const double n_docs = static_cast<double>(positive_docs.size() + negative_docs.size());
  for (int c = 0; c < 2; ++c) {
    m.log_prior_[c] = std::log(static_cast<double>(tokenized[c].size()) / n_docs);

    std::vector<double> counts(m.vocab_.size(), 0.0);
    double total = 0.0;
    for (const auto& doc : tokenized[c]) {
      for (const auto& tok : doc) {
        counts[static_cast<std::size_t>(m.vocab_.id(tok))] += 1.0;
        total += 1.0;
      }
    }
    const double log_denominator = std::log(total + alpha * static_cast<double>(n_types));
    auto& table = m.log_likelihood_[c];
    table.resize(m.vocab_.size());
    for (std::size_t id = 0; id < table.size(); ++id) {
      const double count = id < 2 ? 0.0 : counts[id];
      table[id] = std::log(count + alpha) - log_denominator;
    }
  }
  return m;
}

double NaiveBayesModel::log_likelihood(int token_id, int cls) const {
  const auto& table = log_likelihood_[cls];
  if (token_id < 0 || static_cast<std::size_t>(token_id) >= table.size()) {
    throw UsageError("token id out of range for naive Bayes model");
  }
  return table[static_cast<std::size_t>(token_id)];
}

double NaiveBayesModel::log_likelihood(std::string_view token, int cls) const {
  return log_likelihood(vocab_.id(token), cls);
}

double NaiveBayesModel::class_log_score(std::string_view text, int cls) const {
  double s = log_prior_[cls];
  for (const auto& tok : tokenize(text)) s += log_likelihood(vocab_.id(tok), cls);
  return s;
}

double NaiveBayesModel::positive_posterior(std::string_view text) const {
  const double pos = class_log_score(text, kPositive);
  const double neg = class_log_score(text, kNegative);
  // 1 / (1 + exp(neg - pos)), arranged so exp never overflows
  const double d = neg - pos;
  if (d > 0) {
    const double e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

double NaiveBayesModel::polarity(std::string_view text) const {
  return 2.0 * positive_posterior(text) - 1.0;
}

std::string NaiveBayesModel::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = kNaiveBayesFormatVersion;
  j["alpha"] = alpha_;
  j["vocabulary"] = vocab_.tokens();
  j["log_prior"] = {log_prior_[kPositive], log_prior_[kNegative]};
  j["log_likelihood"] = {log_likelihood_[kPositive], log_likelihood_[kNegative]};
  return j.dump() + "\n";
}

NaiveBayesModel NaiveBayesModel::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("naive Bayes model is not valid JSON: ") + e.what());
  }
  NaiveBayesModel m;
  try {
    if (j.at("version").get<int>() != kNaiveBayesFormatVersion) {
      throw FormatError("unsupported naive Bayes model version");
    }
    m.alpha_ = j.at("alpha").get<double>();
    m.vocab_ = Vocabulary::from_tokens(j.at("vocabulary").get<std::vector<std::string>>());
    const auto priors = j.at("log_prior").get<std::vector<double>>();
    const auto tables = j.at("log_likelihood").get<std::vector<std::vector<double>>>();
    if (priors.size() != 2 || tables.size() != 2) throw FormatError("expected two classes");
    for (int c = 0; c < 2; ++c) {
      m.log_prior_[c] = priors[static_cast<std::size_t>(c)];
      m.log_likelihood_[c] = tables[static_cast<std::size_t>(c)];
      if (m.log_likelihood_[c].size() != m.vocab_.size()) {
        throw FormatError("likelihood table size does not match the vocabulary");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed naive Bayes model: ") + e.what());
  }
  return m;
}

void NaiveBayesModel::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << to_json();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

NaiveBayesModel NaiveBayesModel::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

}  // namespace sshape
