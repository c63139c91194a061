#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "humor/corpus.hpp"
#include "json.hpp"

namespace humor {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";

// Training tokens that collide with the boundary markers, or already start
// with a backslash, are prefixed with one backslash.
std::string escape_token(const std::string& token);
std::string unescape_token(const std::string& token);

using Context = std::vector<std::string>;
using SuccessorCounts = std::map<std::string, std::uint64_t>;

class NGramModel {
 public:
  NGramModel() = default;
  NGramModel(TokenLevel level, int n);

  TokenLevel level() const { return level_; }
  int n() const { return n_; }
  const std::map<Context, SuccessorCounts>& counts() const { return counts_; }
  // Every training token (escaped) plus the eos marker.
  const std::set<std::string>& vocab() const { return vocab_; }

  // Tallies every length-n window of the bos-padded, eos-terminated sequence.
  void add_sequence(const std::vector<std::string>& tokens);

  // Probabilities in lexicographic token order; empty for unseen contexts.
  // Throws UsageError when the context length is not n - 1.
  std::map<std::string, double> next_distribution(const Context& context) const;

  nlohmann::json to_json() const;
  static NGramModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

 private:
  TokenLevel level_ = TokenLevel::kWord;
  int n_ = 2;
  std::map<Context, SuccessorCounts> counts_;
  std::set<std::string> vocab_;
};

// Throws UsageError when n < 2 or the corpus is empty.
NGramModel fit_ngram(const std::vector<TokenSeq>& corpus, TokenLevel level, int n);

struct MarkovGenerateOptions {
  int max_tokens = 50;
  std::uint64_t seed = 0;
  bool backoff = false;
};

// Returns the seed followed by generated tokens (unescaped). The eos marker
// is not emitted.
std::vector<std::string> generate(const NGramModel& model, const std::vector<std::string>& seed,
                                  const MarkovGenerateOptions& options);

// Joins tokens with spaces (word level) or nothing (char level).
std::string join_tokens(const std::vector<std::string>& tokens, TokenLevel level);

}  // namespace humor
