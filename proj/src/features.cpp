#include "humor/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "humor/csv.hpp"
#include "humor/error.hpp"
#include "humor/format.hpp"
#include "humor/utf8.hpp"

namespace humor {

std::array<double, kFeatureCount> FeatureVector::values() const {
  return {ratio_verb,
          ratio_noun,
          ratio_pron,
          ratio_propn,
          ratio_modifier,
          static_cast<double>(slang_count),
          static_cast<double>(slang_subword_count),
          static_cast<double>(antonym_pair_count),
          static_cast<double>(connective_count),
          polarity_mean,
          static_cast<double>(token_count)};
}

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> kNames = {
      "ratio_verb",         "ratio_noun",          "ratio_pron",       "ratio_propn",
      "ratio_modifier",     "slang_count",         "slang_subword_count",
      "antonym_pair_count", "connective_count",    "polarity_mean",    "token_count"};
  return kNames;
}

SlangCounts slang_matches(const std::vector<std::string>& tokens, const std::set<std::string>& slang) {
  SlangCounts counts;
  for (const auto& raw : tokens) {
    const std::string token = utf8::to_lower(raw);
    if (slang.count(token)) {
      ++counts.whole_word;
      continue;
    }
    for (const auto& entry : slang) {
      if (utf8::length(entry) >= kMinSubwordSlangLength && token.size() > entry.size() &&
          token.find(entry) != std::string::npos) {
        ++counts.subword;
        break;
      }
    }
  }
  return counts;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string crude_lemma(std::string_view token, const LexiconSet& lex) {
  const std::string lowered = utf8::to_lower(token);
  for (std::string_view suffix : {"est", "ing", "er", "ed", "s"}) {
    if (!ends_with(lowered, suffix) || lowered.size() < suffix.size() + 2) continue;
    const std::string stem = lowered.substr(0, lowered.size() - suffix.size());
    std::vector<std::string> candidates{stem};
    if (stem.size() >= 2 && stem.back() == stem[stem.size() - 2]) {
      candidates.push_back(stem.substr(0, stem.size() - 1));
    }
    if (stem.back() == 'i') candidates.push_back(stem.substr(0, stem.size() - 1) + "y");
    if (suffix == "s" && ends_with(stem, "ie")) candidates.push_back(stem.substr(0, stem.size() - 2) + "y");
    candidates.push_back(stem + "e");
    for (const auto& c : candidates) {
      if (lex.in_frequency_list(c)) return c;
    }
  }
  return lowered;
}

int antonym_pair_count(const std::vector<std::string>& tokens, const LexiconSet& lex) {
  std::set<std::string> lemmas;
  for (const auto& t : tokens) lemmas.insert(crude_lemma(t, lex));
  int count = 0;
  for (const auto& lemma : lemmas) {
    for (const auto& partner : lex.antonyms_of(lemma)) {
      // Visit each unordered pair once, from its smaller member.
      if (lemma < partner && lemmas.count(partner)) ++count;
    }
  }
  return count;
}

int connective_count(const std::vector<std::string>& tokens, const std::set<std::string>& connectives) {
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(utf8::to_lower(t));
  int count = 0;
  for (const auto& phrase : connectives) {
    std::vector<std::string> words;
    std::istringstream ss(phrase);
    for (std::string w; ss >> w;) words.push_back(w);
    if (words.empty() || words.size() > lowered.size()) continue;
    for (std::size_t i = 0; i + words.size() <= lowered.size(); ++i) {
      if (std::equal(words.begin(), words.end(), lowered.begin() + static_cast<std::ptrdiff_t>(i))) {
        ++count;
      }
    }
  }
  return count;
}

FeatureVector extract_features(const AnnotatedJoke& doc, const LexiconSet& lex) {
  std::vector<std::string> words;
  std::vector<std::string> lemmas;
  int verbs = 0, nouns = 0, prons = 0, propns = 0, modifiers = 0;
  for (const auto& sentence : doc.sentences) {
    for (const auto& tok : sentence) {
      if (tok.upos == Upos::kPunct || tok.upos == Upos::kSym || utf8::is_all_punct(tok.surface)) {
        continue;
      }
      words.push_back(tok.surface);
      lemmas.push_back(tok.lemma);
      switch (tok.upos) {
        case Upos::kVerb: ++verbs; break;
        case Upos::kNoun: ++nouns; break;
        case Upos::kPron: ++prons; break;
        case Upos::kPropn: ++propns; break;
        case Upos::kAdj:
        case Upos::kAdv: ++modifiers; break;
        default: break;
      }
    }
  }
  if (words.empty()) {
    throw DataError("document '" + doc.joke.id + "' has no word tokens");
  }

  FeatureVector f;
  const double n = static_cast<double>(words.size());
  f.token_count = static_cast<int>(words.size());
  f.ratio_verb = verbs / n;
  f.ratio_noun = nouns / n;
  f.ratio_pron = prons / n;
  f.ratio_propn = propns / n;
  f.ratio_modifier = modifiers / n;

  const auto slang = slang_matches(words, lex.slang());
  f.slang_count = slang.whole_word;
  f.slang_subword_count = slang.subword;
  f.antonym_pair_count = antonym_pair_count(words, lex);
  f.connective_count = connective_count(words, lex.connectives());

  double polarity_sum = 0.0;
  int polarity_hits = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto score = lex.polarity(words[i]);
    if (!score) score = lex.polarity(lemmas[i]);
    if (score) {
      polarity_sum += *score;
      ++polarity_hits;
    }
  }
  f.polarity_mean = polarity_hits ? polarity_sum / polarity_hits : 0.0;
  return f;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

FeatureTableSummary export_feature_table(const std::vector<AnnotatedJoke>& docs,
                                         const LexiconSet& lex,
                                         const std::filesystem::path& out_dir) {
  if (docs.empty()) throw UsageError("export_feature_table needs at least one document");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  std::vector<std::array<double, kFeatureCount>> rows;
  rows.reserve(docs.size());
  for (const auto& doc : docs) rows.push_back(extract_features(doc, lex).values());

  const auto& names = feature_names();
  {
    auto out = open_out(out_dir / "features.csv");
    out << "id,label";
    for (auto name : names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < docs.size(); ++r) {
      out << csv_escape(docs[r].joke.id) << ',';
      if (docs[r].joke.label) out << *docs[r].joke.label;
      for (double v : rows[r]) out << ',' << format_double(v);
      out << '\n';
    }
    if (!out) throw DataError("write to features.csv failed");
  }

  FeatureTableSummary summary;
  summary.rows = docs.size();
  for (std::size_t r = 0; r < docs.size(); ++r) {
    if (!docs[r].joke.label) continue;
    const int label = *docs[r].joke.label;
    auto& sums = summary.class_means[label];
    for (std::size_t f = 0; f < kFeatureCount; ++f) sums[f] += rows[r][f];
    ++summary.class_counts[label];
  }
  for (auto& [label, sums] : summary.class_means) {
    for (double& s : sums) s /= static_cast<double>(summary.class_counts[label]);
  }

  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double lo = rows[0][f];
    double hi = rows[0][f];
    for (const auto& row : rows) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    if (hi <= lo) hi = lo + 1.0;
    const double width = (hi - lo) / kHistogramBins;
    std::array<std::array<std::size_t, 2>, kHistogramBins> counts{};
    for (std::size_t r = 0; r < docs.size(); ++r) {
      if (!docs[r].joke.label) continue;
      auto bin = static_cast<std::size_t>((rows[r][f] - lo) / width);
      bin = std::min(bin, kHistogramBins - 1);
      ++counts[bin][*docs[r].joke.label == 1 ? 1 : 0];
    }
    auto out = open_out(out_dir / ("hist_" + std::string(names[f]) + ".csv"));
    out << "bin_lo,bin_hi,count_class0,count_class1\n";
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
      out << format_double(lo + width * b) << ',' << format_double(lo + width * (b + 1)) << ','
          << counts[b][0] << ',' << counts[b][1] << '\n';
    }
  }
  return summary;
}

}  // namespace humor
