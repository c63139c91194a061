#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace humor {

struct Joke {
  std::string id;
  std::string text;
  // 1 = humor, 0 = non-humor.
  std::optional<int> label;
};

enum class SplitRule { kEllipsis, kQuestion, kSentence, kNone };

std::string_view to_string(SplitRule rule);

// setup + separator + punchline reproduces the cleaned text whenever the rule
// is not kNone.
struct SetupPunchline {
  std::string setup;
  std::string punchline;
  std::string separator;
  SplitRule rule = SplitRule::kNone;
};

enum class TokenLevel { kWord, kChar };
enum class PunctMode { kKeep, kDrop };

std::string_view to_string(TokenLevel level);
TokenLevel parse_token_level(std::string_view name);

struct TokenSeq {
  std::vector<std::string> tokens;
  TokenLevel level = TokenLevel::kWord;
  PunctMode punct_mode = PunctMode::kKeep;
};

enum class CorpusFormat { kJsonl, kCsv };

CorpusFormat parse_corpus_format(std::string_view name);

std::vector<Joke> load_corpus(const std::filesystem::path& path, CorpusFormat format);
std::vector<Joke> read_jsonl_corpus(std::istream& in);
std::vector<Joke> read_csv_corpus(std::istream& in);

// Collapses whitespace, normalizes typographic quotes/dashes/ellipses to
// ASCII and strips quote pairs that wrap the whole record. Throws DataError
// when nothing is left.
std::string clean_text(std::string_view raw);

SetupPunchline split_setup_punchline(std::string_view text);

struct TokenizeOptions {
  TokenLevel level = TokenLevel::kWord;
  PunctMode punct_mode = PunctMode::kKeep;
  bool lowercase = false;
};

TokenSeq tokenize(std::string_view text, const TokenizeOptions& options = {});

// Token plus whether the source text had whitespace after it.
struct SpacedToken {
  std::string surface;
  bool space_after = true;
};

// Word-level, punctuation-kept tokenization that remembers spacing so the
// original text can be reconstructed.
std::vector<SpacedToken> tokenize_spaced(std::string_view text);

}  // namespace humor
