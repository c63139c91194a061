#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace humor {

// The lexical resources behind the feature extractor and template scorer.
// Immutable once loaded; every key is lowercase.
class LexiconSet {
 public:
  LexiconSet() = default;

  // Reads slang.txt, connectives.txt, antonyms.tsv, polarity.tsv and freq.txt
  // from `dir`. Missing files leave the resource empty and add a warning.
  static LexiconSet load(const std::filesystem::path& dir);

  void add_slang(std::string_view word);
  void add_connective(std::string_view phrase);
  void add_antonym(std::string_view a, std::string_view b);
  // Throws DataError outside [-1, 1].
  void set_polarity(std::string_view word, double score);
  // Appends at the next rank. Throws DataError on duplicates.
  void append_frequency(std::string_view word);

  const std::set<std::string>& slang() const { return slang_; }
  const std::set<std::string>& connectives() const { return connectives_; }
  const std::set<std::pair<std::string, std::string>>& antonym_pairs() const { return antonyms_; }
  const std::vector<std::string>& antonyms_of(const std::string& word) const;
  bool are_antonyms(std::string_view a, std::string_view b) const;
  const std::map<std::string, double>& polarity_map() const { return polarity_; }
  std::optional<double> polarity(std::string_view word) const;

  bool in_frequency_list(std::string_view word) const;
  // Largest rank R; at least 1 so the rank range is never empty.
  int max_rank() const;
  // Case-insensitive rank in [1, R]; out-of-vocabulary words get R.
  int frequency_rank(std::string_view word) const;
  const std::vector<std::string>& frequency_list() const { return freq_list_; }

  const std::vector<std::string>& warnings() const { return warnings_; }

  // Canonical text dump; identical resources give identical bytes.
  std::string serialize() const;

 private:
  std::set<std::string> slang_;
  std::set<std::string> connectives_;
  std::set<std::pair<std::string, std::string>> antonyms_;
  std::unordered_map<std::string, std::vector<std::string>> antonym_index_;
  std::map<std::string, double> polarity_;
  std::unordered_map<std::string, int> freq_ranks_;
  std::vector<std::string> freq_list_;
  std::vector<std::string> warnings_;
};

inline LexiconSet load_lexicon_set(const std::filesystem::path& dir) { return LexiconSet::load(dir); }

inline int frequency_rank(const LexiconSet& lex, std::string_view word) {
  return lex.frequency_rank(word);
}

}  // namespace humor
