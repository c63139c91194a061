#include <cmath>
#include <sstream>

#include "doctest.h"
#include "humor/error.hpp"
#include "humor/rng.hpp"
#include "humor/template.hpp"
#include "support.hpp"

using namespace humor;

namespace {

WeightConfig count_config(int k) {
  WeightConfig cfg;
  cfg.mask_strategy = MaskStrategy::parse("count:" + std::to_string(k));
  return cfg;
}

std::vector<std::string> masked_surfaces(const Template& tpl) {
  std::vector<std::string> out;
  for (auto p : tpl.mask_positions()) out.push_back(tpl.tokens[p].surface);
  return out;
}

AnnotatedJoke nominal_sentence(const std::vector<std::string>& surfaces) {
  AnnotatedJoke doc;
  doc.joke.id = "p";
  AnnotatedSentence s;
  for (const auto& w : surfaces) {
    AnnotatedToken t;
    t.surface = w;
    t.upos = Upos::kNoun;
    t.deprel = "nsubj";
    t.head = 0;
    t.position = static_cast<int>(s.size());
    s.push_back(t);
  }
  doc.sentences.push_back(s);
  return doc;
}

}  // namespace

TEST_CASE("score arithmetic") {
  const WeightConfig cfg;
  CHECK(score_token("nsubj", 10000, 10000, cfg) == 0.0);
  CHECK(std::abs(score_token("named_entity", 1, 10000, cfg) - 100.0) < 1e-9);
  CHECK(std::abs(score_token("nsubj", 3000, 10000, cfg) - 5.0 * std::log10(7001.0) * 2.5) < 1e-9);
  CHECK(std::abs(score_token("nsubj", 3000, 10000, cfg) - 48.07) < 0.01);
  CHECK_THROWS_AS(score_token("adverb", 1, 10, cfg), UsageError);
  CHECK_THROWS_AS(score_token("verb", 0, 10, cfg), UsageError);
  CHECK_THROWS_AS(score_token("verb", 11, 10, cfg), UsageError);
}

TEST_CASE("scores fall as words get rarer") {
  const WeightConfig cfg;
  for (const auto& [cat, w] : cfg.dep_weights) {
    for (int r = 1; r < 500; ++r) CHECK(score_token(cat, r, 500, cfg) > score_token(cat, r + 1, 500, cfg));
  }
}

TEST_CASE("mask strategy parsing") {
  CHECK(MaskStrategy::parse("count:3").count == 3);
  CHECK(MaskStrategy::parse("fraction:0.5").kind == MaskStrategy::Kind::kFraction);
  CHECK(MaskStrategy::parse("threshold:20").threshold == 20.0);
  CHECK_THROWS_AS(MaskStrategy::parse("count:-1"), UsageError);
  CHECK_THROWS_AS(MaskStrategy::parse("fraction:2"), UsageError);
  CHECK_THROWS_AS(MaskStrategy::parse("most"), UsageError);
  CHECK(MaskStrategy::parse(MaskStrategy::parse("fraction:0.25").to_string()).fraction == 0.25);
}

TEST_CASE("weight config overrides") {
  const auto cfg = WeightConfig::from_json({{"dep_weights", {{"verb", 2.0}}}, {"scale", 1.0}});
  CHECK(cfg.dep_weights.at("verb") == 2.0);
  CHECK(cfg.dep_weights.at("nsubj") == 5.0);
  CHECK(cfg.scale == 1.0);
  CHECK_THROWS_AS(WeightConfig::from_json({{"dep_weights", {{"verb", -1.0}}}}), UsageError);
  CHECK_THROWS_AS(WeightConfig::from_json({{"colour", 1}}), UsageError);
}

TEST_CASE("table rows from the shipped parses") {
  const auto lex = testing::fixture_lexicons();
  const auto docs = testing::conllu_fixture("table5");
  REQUIRE(docs.size() == 2);
  const auto row1 = extract_template(docs[0], lex);
  CHECK(masked_surfaces(row1) == std::vector<std::string>{"hard", "semen", "Submarine"});
  CHECK(render(row1) == "what s long and [MASK] and full of [MASK] ? a [MASK] .");
  const auto row2 = extract_template(docs[1], lex);
  CHECK(masked_surfaces(row2) == std::vector<std::string>{"Mexicans", "Trumps", "'re"});
  CHECK(render(row2) == "how do [MASK] feel about [MASK] wall ? they [MASK] already over it .");
  CHECK(render(row1, "<mask>") == "what s long and <mask> and full of <mask> ? a <mask> .");
}

TEST_CASE("chicken subject") {
  const auto lex = testing::fixture_lexicons();
  const auto docs = testing::conllu_fixture("chicken");
  const auto tpl = extract_template(docs[0], lex, count_config(1));
  CHECK(render(tpl) == "why did the [MASK] cross the road ?");
  const auto none = extract_template(docs[0], lex, count_config(0));
  CHECK(render(none) == "why did the chicken cross the road ?");
  CHECK(none.mask_count() == 0);
}

TEST_CASE("sentences without candidates are flagged") {
  AnnotatedJoke doc;
  doc.joke.id = "z";
  AnnotatedSentence s;
  for (auto [w, u] : {std::pair{"oh", Upos::kIntj}, std::pair{"the", Upos::kDet}, std::pair{"!", Upos::kPunct}}) {
    AnnotatedToken t;
    t.surface = w;
    t.upos = u;
    t.deprel = "dep";
    s.push_back(t);
  }
  doc.sentences.push_back(s);
  const auto tpl = extract_template(doc, testing::fixture_lexicons());
  CHECK(tpl.no_candidates);
  CHECK(tpl.mask_count() == 0);
  CHECK(render(tpl) == "oh the !");
}

TEST_CASE("attributive adjectives are always masked") {
  AnnotatedJoke doc;
  doc.joke.id = "a";
  AnnotatedSentence s(2);
  s[0].surface = "red";
  s[0].upos = Upos::kAdj;
  s[0].deprel = "amod";
  s[0].head = 2;
  s[1].surface = "car";
  s[1].upos = Upos::kNoun;
  s[1].deprel = "root";
  s[1].position = 1;
  doc.sentences.push_back(s);
  const auto tpl = extract_template(doc, testing::fixture_lexicons(), count_config(0));
  CHECK(tpl.tokens[0].masked);
  CHECK(tpl.tokens[0].reason == "amod");
  CHECK_FALSE(tpl.tokens[1].masked);
}

TEST_CASE("count masks the k lowest-scoring candidates") {
  const auto lex = testing::fixture_lexicons();
  const auto& words = lex.frequency_list();
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<std::string> surfaces;
    for (std::size_t i = 0; i < n; ++i) {
      // Repeats and out-of-list words create ties.
      surfaces.push_back(rng.bernoulli(0.2) ? "zzq" + std::to_string(rng.below(2)) : words[rng.below(40)]);
    }
    const int k = static_cast<int>(rng.below(n + 1));
    const auto tpl = extract_template(nominal_sentence(surfaces), lex, count_config(k));
    const auto got = tpl.mask_positions();

    // Oracle: exactly one k-subset has every member ordered before every
    // non-member under (score ascending, position descending).
    auto before = [&](std::size_t a, std::size_t b) {
      const double sa = tpl.tokens[a].score, sb = tpl.tokens[b].score;
      return sa < sb || (sa == sb && a > b);
    };
    std::vector<std::vector<std::size_t>> valid;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a) {
        for (std::size_t b = 0; b < n && ok; ++b) {
          if ((mask >> a & 1) && !(mask >> b & 1) && !before(a, b)) ok = false;
        }
      }
      if (!ok) continue;
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) subset.push_back(i);
      }
      valid.push_back(subset);
    }
    REQUIRE(valid.size() == 1);
    CHECK(got == valid[0]);
  }
}

TEST_CASE("fraction and threshold strategies") {
  const auto lex = testing::fixture_lexicons();
  const auto doc = nominal_sentence({"what", "it", "they", "road", "wall"});
  WeightConfig cfg;
  cfg.mask_strategy = MaskStrategy::parse("fraction:0.5");
  CHECK(extract_template(doc, lex, cfg).mask_count() == 3);
  cfg.mask_strategy = MaskStrategy::parse("threshold:1000");
  CHECK(extract_template(doc, lex, cfg).mask_count() == 5);
  cfg.mask_strategy = MaskStrategy::parse("threshold:0");
  CHECK(extract_template(doc, lex, cfg).mask_count() == 0);
}

TEST_CASE("template json round trip") {
  const auto lex = testing::fixture_lexicons();
  const auto tpl = extract_template(testing::conllu_fixture("table5")[0], lex);
  std::istringstream in(template_to_json(tpl).dump() + "\n");
  const auto back = read_templates(in);
  REQUIRE(back.size() == 1);
  CHECK(render(back[0]) == render(tpl));
  CHECK(back[0].joke_id == "t5-1");
  CHECK(template_to_json(back[0]) == template_to_json(tpl));
}
