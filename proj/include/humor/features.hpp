#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "humor/annotate.hpp"
#include "humor/lexicons.hpp"

namespace humor {

inline constexpr std::size_t kFeatureCount = 11;

// Morpho-syntactic, lexico-semantic, pragmatic and affective features of one
// document. Ratios are over word tokens (punctuation excluded).
struct FeatureVector {
  double ratio_verb = 0.0;
  double ratio_noun = 0.0;
  double ratio_pron = 0.0;
  double ratio_propn = 0.0;
  double ratio_modifier = 0.0;  // ADJ and ADV
  int slang_count = 0;
  int slang_subword_count = 0;
  int antonym_pair_count = 0;
  int connective_count = 0;
  double polarity_mean = 0.0;
  int token_count = 0;

  std::array<double, kFeatureCount> values() const;
};

const std::array<std::string_view, kFeatureCount>& feature_names();

// Throws DataError when the document has no word tokens.
FeatureVector extract_features(const AnnotatedJoke& doc, const LexiconSet& lex);

struct SlangCounts {
  int whole_word = 0;
  int subword = 0;
};

// Subword matches need an entry of at least this many characters.
inline constexpr std::size_t kMinSubwordSlangLength = 4;

SlangCounts slang_matches(const std::vector<std::string>& tokens, const std::set<std::string>& slang);

// Lowercases and strips -est/-ing/-er/-ed/-s when the stripped form is in the
// frequency list (undoubling consonants, restoring a final e or y).
std::string crude_lemma(std::string_view token, const LexiconSet& lex);

// Number of distinct antonym pair types whose members both occur.
int antonym_pair_count(const std::vector<std::string>& tokens, const LexiconSet& lex);

// Occurrences of (possibly multiword) connectives in the token sequence.
int connective_count(const std::vector<std::string>& tokens, const std::set<std::string>& connectives);

inline constexpr std::size_t kHistogramBins = 20;

struct FeatureTableSummary {
  std::size_t rows = 0;
  // label -> per-feature mean, for labelled documents only.
  std::map<int, std::array<double, kFeatureCount>> class_means;
  std::map<int, std::size_t> class_counts;
};

// Writes features.csv and hist_<feature>.csv into `out_dir`.
FeatureTableSummary export_feature_table(const std::vector<AnnotatedJoke>& docs,
                                         const LexiconSet& lex,
                                         const std::filesystem::path& out_dir);

}  // namespace humor
