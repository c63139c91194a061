#include <cmath>

#include "doctest.h"
#include "humor/error.hpp"
#include "humor/markov.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace humor;

namespace {

std::vector<TokenSeq> seqs(const std::vector<std::string>& texts, TokenLevel level) {
  std::vector<TokenSeq> out;
  for (const auto& t : texts) out.push_back(tokenize(t, {level, PunctMode::kKeep, true}));
  return out;
}

std::vector<std::vector<std::string>> raw(const std::vector<TokenSeq>& corpus) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : corpus) out.push_back(s.tokens);
  return out;
}

std::vector<std::string> corpus_texts(const std::string& rel, std::size_t limit) {
  std::vector<std::string> out;
  for (const auto& j : load_corpus(testing::data_path(rel), CorpusFormat::kJsonl)) {
    if (out.size() == limit) break;
    out.push_back(clean_text(j.text));
  }
  return out;
}

}  // namespace

TEST_CASE("hand-counted examples") {
  const auto ab = fit_ngram(seqs({"a b"}, TokenLevel::kWord), TokenLevel::kWord, 2);
  CHECK(ab.counts().at({"<s>"}).at("a") == 1);
  CHECK(ab.counts().at({"a"}).at("b") == 1);
  CHECK(ab.counts().at({"b"}).at("</s>") == 1);

  const auto abab = fit_ngram(seqs({"a b a b"}, TokenLevel::kWord), TokenLevel::kWord, 2);
  CHECK(abab.counts().at({"a"}).at("b") == 2);
  CHECK(abab.next_distribution({"a"}).at("b") == 1.0);
  CHECK(abab.next_distribution({"zzz"}).empty());
  CHECK_THROWS_AS(abab.next_distribution({"a", "b"}), UsageError);

  const auto chars = fit_ngram(seqs({"ab"}, TokenLevel::kChar), TokenLevel::kChar, 3);
  CHECK(chars.counts().at({"a", "b"}).at("</s>") == 1);
}

TEST_CASE("probabilities follow counts") {
  const auto m = fit_ngram(seqs({"c x", "c y", "c y", "c y"}, TokenLevel::kWord), TokenLevel::kWord, 2);
  const auto d = m.next_distribution({"c"});
  CHECK(d.at("x") == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.at("y") == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("counts equal brute-force window enumeration") {
  const std::vector<std::vector<std::string>> corpora = {
      {"a b a b", "b a c", "a a a a b"},
      corpus_texts("conllu/table5.jsonl", 10),
      corpus_texts("desk/markov_5k.jsonl", 200),
  };
  for (const auto& texts : corpora) {
    for (auto level : {TokenLevel::kWord, TokenLevel::kChar}) {
      const auto corpus = seqs(texts, level);
      for (int n = 2; n <= 4; ++n) {
        const auto model = fit_ngram(corpus, level, n);
        const auto expected = oracle::ngram_windows(raw(corpus), n);
        REQUIRE(model.counts().size() == expected.size());
        for (const auto& [ctx, succ] : expected) {
          const auto it = model.counts().find(ctx);
          REQUIRE(it != model.counts().end());
          CHECK(std::map<std::string, std::uint64_t>(it->second.begin(), it->second.end()) ==
                std::map<std::string, std::uint64_t>(succ.begin(), succ.end()));
          std::size_t total = 0;
          for (const auto& [tok, c] : succ) total += c;
          double sum = 0;
          for (const auto& [tok, p] : model.next_distribution(ctx)) {
            CHECK(p == doctest::Approx(static_cast<double>(succ.at(tok)) / total).epsilon(1e-15));
            sum += p;
          }
          CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("boundary markers in training text are escaped") {
  const auto m = fit_ngram({TokenSeq{{"<s>", "x", "\\y"}, TokenLevel::kWord, PunctMode::kKeep}}, TokenLevel::kWord, 2);
  CHECK(m.vocab().count("\\<s>") == 1);
  CHECK(m.vocab().count("\\\\y") == 1);
  CHECK(unescape_token(escape_token("</s>")) == "</s>");
  const auto out = generate(m, {}, {10, 1, false});
  CHECK(out == std::vector<std::string>{"<s>", "x", "\\y"});
}

TEST_CASE("generation") {
  const auto m = fit_ngram(seqs({"a b a b"}, TokenLevel::kWord), TokenLevel::kWord, 2);
  const auto out = generate(m, {"a"}, {6, 3, false});
  REQUIRE(out.size() >= 2);
  CHECK(out[0] == "a");
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i] == (i % 2 ? "b" : "a"));

  CHECK(generate(m, {"zzz"}, {5, 0, false}) == std::vector<std::string>{"zzz"});
  std::size_t longest = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) longest = std::max(longest, generate(m, {"zzz"}, {5, seed, true}).size());
  CHECK(longest > 1);

  const auto big = fit_ngram(seqs(corpus_texts("desk/markov_5k.jsonl", 500), TokenLevel::kWord), TokenLevel::kWord, 3);
  CHECK(generate(big, {"why"}, {30, 11, false}) == generate(big, {"why"}, {30, 11, false}));
  CHECK(generate(big, {}, {4, 2, false}).size() <= 4);
}

TEST_CASE("save and load") {
  testing::TempDir dir("markov");
  const auto m = fit_ngram(seqs(corpus_texts("desk/markov_5k.jsonl", 100), TokenLevel::kChar), TokenLevel::kChar, 3);
  m.save(dir / "m.json");
  const auto back = NGramModel::load(dir / "m.json");
  CHECK(back.n() == 3);
  CHECK(back.level() == TokenLevel::kChar);
  for (const auto& [ctx, succ] : m.counts()) CHECK(back.next_distribution(ctx) == m.next_distribution(ctx));

  NGramModel empty(TokenLevel::kWord, 2);
  empty.save(dir / "e.json");
  CHECK(NGramModel::load(dir / "e.json").counts().empty());

  testing::write_file(dir / "bad.json", "{\"format\": \"humor-markov\", \"n\": ");
  CHECK_THROWS_AS(NGramModel::load(dir / "bad.json"), DataError);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(fit_ngram(seqs({"a"}, TokenLevel::kWord), TokenLevel::kWord, 1), UsageError);
  CHECK_THROWS_AS(fit_ngram({}, TokenLevel::kWord, 2), UsageError);
  CHECK(join_tokens({"a", "b"}, TokenLevel::kWord) == "a b");
  CHECK(join_tokens({"a", "b"}, TokenLevel::kChar) == "ab");
}
