#include "humor/lexicons.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "humor/error.hpp"
#include "humor/utf8.hpp"

namespace humor {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

// Calls `fn(line, line_no)` for each non-blank, non-comment line. Returns
// false when the file does not exist.
bool for_each_line(const std::filesystem::path& path,
                   const std::function<void(const std::string&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    fn(line, line_no);
  }
  return true;
}

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(trim(field));
  return out;
}

}  // namespace

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
  LexiconSet lex;
  auto missing = [&](std::string_view name) {
    lex.warnings_.push_back("lexicon file " + (dir / name).string() + " not found; resource left empty");
  };

  if (!for_each_line(dir / "slang.txt", [&](const std::string& line, std::size_t) {
        lex.add_slang(trim(line));
      })) {
    missing("slang.txt");
  }
  if (!for_each_line(dir / "connectives.txt", [&](const std::string& line, std::size_t) {
        lex.add_connective(trim(line));
      })) {
    missing("connectives.txt");
  }
  if (!for_each_line(dir / "antonyms.tsv", [&](const std::string& line, std::size_t line_no) {
        const auto fields = split_tab(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
          throw DataError("antonyms.tsv: expected two tab-separated lemmas", line_no);
        }
        lex.add_antonym(fields[0], fields[1]);
      })) {
    missing("antonyms.tsv");
  }
  if (!for_each_line(dir / "polarity.tsv", [&](const std::string& line, std::size_t line_no) {
        const auto fields = split_tab(line);
        if (fields.size() != 2 || fields[0].empty()) {
          throw DataError("polarity.tsv: expected word<TAB>score", line_no);
        }
        double score = 0.0;
        const char* begin = fields[1].data();
        const char* end = begin + fields[1].size();
        auto [ptr, ec] = std::from_chars(begin, end, score);
        if (ec != std::errc() || ptr != end || !std::isfinite(score)) {
          throw DataError("polarity.tsv: non-numeric score '" + fields[1] + "'", line_no);
        }
        try {
          lex.set_polarity(fields[0], score);
        } catch (const DataError& e) {
          throw DataError(std::string("polarity.tsv: ") + e.what(), line_no);
        }
      })) {
    missing("polarity.tsv");
  }
  if (!for_each_line(dir / "freq.txt", [&](const std::string& line, std::size_t line_no) {
        try {
          lex.append_frequency(trim(line));
        } catch (const DataError& e) {
          throw DataError(std::string("freq.txt: ") + e.what(), line_no);
        }
      })) {
    missing("freq.txt");
  }
  return lex;
}

void LexiconSet::add_slang(std::string_view word) {
  auto w = utf8::to_lower(word);
  if (!w.empty()) slang_.insert(std::move(w));
}

void LexiconSet::add_connective(std::string_view phrase) {
  // Normalize internal whitespace so multiword entries match token joins.
  std::string normalized;
  for (char c : utf8::to_lower(phrase)) {
    if (c == ' ' || c == '\t') {
      if (!normalized.empty() && normalized.back() != ' ') normalized.push_back(' ');
    } else {
      normalized.push_back(c);
    }
  }
  while (!normalized.empty() && normalized.back() == ' ') normalized.pop_back();
  if (!normalized.empty()) connectives_.insert(std::move(normalized));
}

void LexiconSet::add_antonym(std::string_view a, std::string_view b) {
  auto x = utf8::to_lower(a);
  auto y = utf8::to_lower(b);
  if (x == y) return;
  if (y < x) std::swap(x, y);
  if (!antonyms_.emplace(x, y).second) return;
  antonym_index_[x].push_back(y);
  antonym_index_[y].push_back(x);
}

void LexiconSet::set_polarity(std::string_view word, double score) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw DataError("polarity for '" + std::string(word) + "' outside [-1, 1]");
  }
  polarity_[utf8::to_lower(word)] = score;
}

void LexiconSet::append_frequency(std::string_view word) {
  auto w = utf8::to_lower(word);
  if (w.empty()) return;
  const int rank = static_cast<int>(freq_list_.size()) + 1;
  if (!freq_ranks_.emplace(w, rank).second) {
    throw DataError("duplicate word '" + w + "' in frequency list");
  }
  freq_list_.push_back(std::move(w));
}

const std::vector<std::string>& LexiconSet::antonyms_of(const std::string& word) const {
  static const std::vector<std::string> kEmpty;
  const auto it = antonym_index_.find(word);
  return it == antonym_index_.end() ? kEmpty : it->second;
}

bool LexiconSet::are_antonyms(std::string_view a, std::string_view b) const {
  auto x = utf8::to_lower(a);
  auto y = utf8::to_lower(b);
  if (y < x) std::swap(x, y);
  return antonyms_.count({x, y}) > 0;
}

std::optional<double> LexiconSet::polarity(std::string_view word) const {
  const auto it = polarity_.find(utf8::to_lower(word));
  if (it == polarity_.end()) return std::nullopt;
  return it->second;
}

bool LexiconSet::in_frequency_list(std::string_view word) const {
  return freq_ranks_.count(utf8::to_lower(word)) > 0;
}

int LexiconSet::max_rank() const {
  return freq_list_.empty() ? 1 : static_cast<int>(freq_list_.size());
}

int LexiconSet::frequency_rank(std::string_view word) const {
  const auto it = freq_ranks_.find(utf8::to_lower(word));
  return it == freq_ranks_.end() ? max_rank() : it->second;
}

std::string LexiconSet::serialize() const {
  std::ostringstream out;
  out << "[slang]\n";
  for (const auto& w : slang_) out << w << '\n';
  out << "[connectives]\n";
  for (const auto& w : connectives_) out << w << '\n';
  out << "[antonyms]\n";
  for (const auto& [a, b] : antonyms_) out << a << '\t' << b << '\n';
  out << "[polarity]\n";
  char buf[64];
  for (const auto& [w, s] : polarity_) {
    std::snprintf(buf, sizeof buf, "%.17g", s);
    out << w << '\t' << buf << '\n';
  }
  out << "[freq]\n";
  for (const auto& w : freq_list_) out << w << '\n';
  return out.str();
}

}  // namespace humor
