#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sshape {

using TokenList = std::vector<std::string>;
using IdSequence = std::vector<int>;

// Lowercases, splits on whitespace, strips leading/trailing ASCII punctuation
// from every token and drops tokens that end up empty.
TokenList tokenize(std::string_view text);

// Word-level vocabulary with two reserved ids. Ids of ordinary tokens are
// dense and assigned in first-appearance order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens seen at least `min_count` times across `corpus` get ids.
  static Vocabulary build(const std::vector<TokenList>& corpus, int min_count = 1);

  // Rebuilds from an id-ordered token list whose first two entries are the
  // reserved tokens. Throws FormatError on duplicates or missing specials.
  static Vocabulary from_tokens(std::vector<std::string> id_to_token);

  std::size_t size() const noexcept { return id_to_token_.size(); }
  int min_count() const noexcept { return min_count_; }
  bool contains(std::string_view token) const;

  // UNK for unknown tokens.
  int id(std::string_view token) const;
  // Throws UsageError when `id` is outside [0, size()).
  const std::string& token(int id) const;

  // Never returns an empty sequence: empty input encodes to {kUnk}.
  IdSequence encode(std::span<const std::string> tokens) const;
  TokenList decode(std::span<const int> ids) const;

  const std::vector<std::string>& tokens() const noexcept { return id_to_token_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void add(std::string token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int, Hash, std::equal_to<>> token_to_id_;
  int min_count_ = 1;
};

}  // namespace sshape
