#include <cmath>

#include "doctest.h"
#include "humor/classify.hpp"
#include "humor/csv.hpp"
#include "humor/error.hpp"
#include "humor/features.hpp"
#include "humor/lexicons.hpp"
#include "support.hpp"

using namespace humor;
using humor::testing::TempDir;

namespace {

AnnotatedJoke doc_of(const std::vector<std::pair<std::string, Upos>>& tokens, std::optional<int> label = {},
                     const std::string& id = "x") {
  AnnotatedJoke doc;
  doc.joke = {id, "", label};
  AnnotatedSentence s;
  for (const auto& [surface, upos] : tokens) {
    AnnotatedToken t;
    t.surface = surface;
    t.upos = upos;
    t.position = static_cast<int>(s.size());
    s.push_back(t);
  }
  doc.sentences.push_back(s);
  return doc;
}

std::vector<std::string> words(const std::string& text) {
  return tokenize(text, {TokenLevel::kWord, PunctMode::kKeep, true}).tokens;
}

}  // namespace

TEST_CASE("lexicon files") {
  TempDir dir("lex");
  testing::write_file(dir / "antonyms.tsv", "big\tsmall\n");
  testing::write_file(dir / "freq.txt", "the\nof\n");
  testing::write_file(dir / "polarity.tsv", "good\t0.9\n");
  testing::write_file(dir / "slang.txt", "dude\n");
  testing::write_file(dir / "connectives.txt", "but\n");
  const auto lex = LexiconSet::load(dir.path());
  CHECK(lex.warnings().empty());
  CHECK(lex.are_antonyms("small", "big"));
  CHECK(lex.are_antonyms("big", "small"));
  CHECK(lex.frequency_rank("the") == 1);
  CHECK(lex.frequency_rank("of") == 2);
  CHECK(lex.frequency_rank("The") == 1);
  CHECK(lex.frequency_rank("zebra") == lex.max_rank());
  CHECK(lex.polarity("good") == doctest::Approx(0.9));
  CHECK_FALSE(lex.polarity("bad").has_value());
}

TEST_CASE("missing lexicon files warn") {
  TempDir dir("lex-empty");
  const auto lex = LexiconSet::load(dir.path());
  CHECK(lex.warnings().size() == 5);
  CHECK(lex.max_rank() >= 1);
}

TEST_CASE("bad polarity and duplicate ranks are rejected") {
  LexiconSet lex;
  CHECK_THROWS_AS(lex.set_polarity("x", 1.5), DataError);
  lex.append_frequency("a");
  CHECK_THROWS_AS(lex.append_frequency("A"), DataError);
}

TEST_CASE("shipped frequency list") {
  const auto lex = testing::fixture_lexicons();
  CHECK(lex.max_rank() == 2000);
  CHECK(lex.frequency_rank("hard") == 255);
  CHECK(lex.frequency_rank("semen") == 2000);
  CHECK(lex.serialize() == testing::fixture_lexicons().serialize());
}

TEST_CASE("ratios over a tiny document") {
  const LexiconSet empty;
  const auto f = extract_features(doc_of({{"dogs", Upos::kNoun}, {"chase", Upos::kVerb}, {"cats", Upos::kNoun}}),
                                  empty);
  CHECK(f.ratio_noun == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(f.ratio_verb == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(f.slang_count == 0);
  CHECK(f.slang_subword_count == 0);
  CHECK(f.antonym_pair_count == 0);
  CHECK(f.connective_count == 0);
  CHECK(f.polarity_mean == 0.0);
  CHECK(f.token_count == 3);
}

TEST_CASE("punctuation is not a word token") {
  const LexiconSet empty;
  const auto f = extract_features(doc_of({{"go", Upos::kVerb}, {"!", Upos::kPunct}}), empty);
  CHECK(f.ratio_verb == 1.0);
  CHECK_THROWS_AS(extract_features(doc_of({{"!", Upos::kPunct}}), empty), DataError);
}

TEST_CASE("slang matching") {
  const std::set<std::string> dick{"dick"};
  const std::set<std::string> ass{"ass"};
  CHECK(slang_matches({"addickted"}, dick).whole_word == 0);
  CHECK(slang_matches({"addickted"}, dick).subword == 1);
  CHECK(slang_matches({"class"}, ass).subword == 0);
  CHECK(slang_matches({"class"}, ass).whole_word == 0);
  CHECK(slang_matches({}, dick).whole_word == 0);
  CHECK(slang_matches({"dick"}, dick).whole_word == 1);
  CHECK(slang_matches({"dick"}, dick).subword == 0);
}

TEST_CASE("antonym pairs") {
  LexiconSet lex;
  lex.add_antonym("small", "big");
  for (const char* w : {"small", "big", "the", "baby"}) lex.append_frequency(w);
  CHECK(antonym_pair_count(words("smaller babies are cuter than the bigger ones"), lex) == 1);
  CHECK(antonym_pair_count({"big", "small", "big"}, lex) == 1);
  CHECK(antonym_pair_count({"big", "tall"}, lex) == 0);
  CHECK(crude_lemma("bigger", lex) == "big");
  CHECK(crude_lemma("babies", lex) == "baby");
}

TEST_CASE("connectives") {
  const std::set<std::string> conn{"but", "so"};
  CHECK(connective_count(words("But I want pizza tonight, so I ordered two."), conn) >= 2);
  CHECK(connective_count(words("on the other hand, fine"), {"on the other hand"}) == 1);
}

TEST_CASE("feature table export") {
  TempDir dir("features");
  const LexiconSet empty;
  const std::vector<AnnotatedJoke> docs = {doc_of({{"a", Upos::kNoun}}, 1, "j1"),
                                           doc_of({{"a", Upos::kNoun}}, 0, "j2")};
  const auto summary = export_feature_table(docs, empty, dir.path());
  CHECK(summary.rows == 2);
  const auto table = read_feature_table(dir / "features.csv");
  CHECK(table.x.rows() == 2);
  CHECK(table.feature_names.size() + 2 == 13);

  // All-identical documents put every observation in one bin.
  const auto hist = testing::slurp(dir / "hist_ratio_noun.csv");
  std::istringstream in(hist);
  CsvReader reader(in);
  std::vector<std::string> cells;
  reader.next(cells);
  int nonempty = 0;
  while (reader.next(cells)) {
    if (std::stoi(cells[2]) + std::stoi(cells[3]) > 0) ++nonempty;
  }
  CHECK(nonempty == 1);
}

TEST_CASE("slang separates the desk classes") {
  HeuristicAnnotator annotator;
  const auto lex = testing::fixture_lexicons();
  const auto jokes = load_corpus(testing::data_path("desk/classify.jsonl"), CorpusFormat::kJsonl);
  double sums[2] = {0, 0};
  double counts[2] = {0, 0};
  for (const auto& j : jokes) {
    const auto f = extract_features(annotate_heuristic(j, annotator), lex);
    sums[*j.label] += f.slang_count;
    counts[*j.label] += 1;
  }
  CHECK(sums[1] / counts[1] > sums[0] / counts[0]);
}
