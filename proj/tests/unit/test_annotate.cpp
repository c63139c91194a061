#include <sstream>

#include "doctest.h"
#include "humor/annotate.hpp"
#include "humor/error.hpp"
#include "support.hpp"

using namespace humor;

namespace {

const AnnotatedToken& find(const AnnotatedSentence& s, const std::string& surface) {
  for (const auto& t : s) {
    if (t.surface == surface) return t;
  }
  throw std::runtime_error("no token " + surface);
}

}  // namespace

TEST_CASE("conllu fields map directly") {
  std::istringstream in(
      "1\tdogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
      "2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\tSpaceAfter=No\n\n");
  const auto sentences = parse_conllu(in);
  REQUIRE(sentences.size() == 1);
  const auto& s = sentences[0].tokens;
  REQUIRE(s.size() == 2);
  CHECK(s[0].head == 2);
  CHECK(s[0].deprel == "nsubj");
  CHECK(s[0].upos == Upos::kNoun);
  CHECK(s[1].head == 0);
  CHECK(s[1].deprel == "root");
  CHECK_FALSE(s[1].space_after);
}

TEST_CASE("conllu edge cases") {
  std::istringstream blank("\n\n");
  CHECK(parse_conllu(blank).empty());

  std::istringstream short_row("1\tdogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\n");
  try {
    parse_conllu(short_row);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == std::optional<std::size_t>(1));
  }
}

TEST_CASE("conllu round trip") {
  const auto sentences = parse_conllu_file(testing::data_path("conllu/table5.conllu"));
  std::istringstream again(serialize_conllu(sentences));
  const auto reparsed = parse_conllu(again);
  REQUIRE(reparsed.size() == sentences.size());
  CHECK(serialize_conllu(reparsed) == serialize_conllu(sentences));
}

TEST_CASE("newdoc markers group sentences") {
  const auto docs = group_documents(parse_conllu_file(testing::data_path("conllu/table5.conllu")));
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "t5-1");
  CHECK(docs[0].sentences.size() == 2);
  CHECK(docs[1].id == "t5-2");
}

TEST_CASE("heuristic parse of a simple clause") {
  HeuristicAnnotator a;
  const auto s = a.annotate(std::vector<std::string>{"the", "chicken", "crossed", "the", "road"});
  const auto& chicken = find(s, "chicken");
  const auto& crossed = find(s, "crossed");
  const auto& road = find(s, "road");
  CHECK(crossed.deprel == "root");
  CHECK(chicken.deprel == "nsubj");
  CHECK(chicken.head == crossed.position + 1);
  CHECK(road.deprel == "dobj");
  CHECK(road.head == crossed.position + 1);
}

TEST_CASE("heuristic annotator edge cases") {
  HeuristicAnnotator a;
  const auto paris = a.annotate(std::vector<std::string>{"we", "saw", "Paris"});
  CHECK(find(paris, "Paris").is_entity);

  const auto go = a.annotate(std::vector<std::string>{"go"});
  REQUIRE(go.size() == 1);
  CHECK(go[0].deprel == "root");
  CHECK(go[0].upos == Upos::kVerb);
}

TEST_CASE("heuristic parse has exactly one root per sentence") {
  HeuristicAnnotator a;
  const auto jokes = load_corpus(testing::data_path("desk/classify.jsonl"), CorpusFormat::kJsonl);
  for (std::size_t i = 0; i < jokes.size(); i += 37) {
    const auto doc = annotate_heuristic(jokes[i], a);
    CHECK(doc.approximate);
    CHECK(detokenize(doc) == clean_text(jokes[i].text));
    for (const auto& s : doc.sentences) {
      int roots = 0;
      for (const auto& t : s) {
        roots += t.deprel == "root";
        CHECK(t.head >= 0);
        CHECK(t.head <= static_cast<int>(s.size()));
      }
      CHECK(roots == 1);
    }
  }
}

TEST_CASE("unknown upos is rejected") {
  CHECK_THROWS_AS(parse_upos("NOUNISH"), UsageError);
  CHECK(parse_upos("PROPN") == Upos::kPropn);
}
