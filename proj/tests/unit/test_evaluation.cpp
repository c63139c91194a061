#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "humor/error.hpp"
#include "humor/evaluation.hpp"
#include "humor/rng.hpp"
#include "support.hpp"

using namespace humor;

namespace {

std::vector<EvalItem> pool(const std::string& prefix, Source source, std::size_t n) {
  std::vector<EvalItem> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), prefix + " joke " + std::to_string(i), source});
  return out;
}

std::vector<EvalRecord> table_six_records() {
  std::vector<EvalRecord> out;
  auto add = [&](Source actual, Source guess, int n) {
    for (int i = 0; i < n; ++i) out.push_back({"e", std::to_string(out.size()), actual, guess, 0});
  };
  add(Source::kComputer, Source::kComputer, 114);
  add(Source::kComputer, Source::kHuman, 10);
  add(Source::kHuman, Source::kComputer, 18);
  add(Source::kHuman, Source::kHuman, 108);
  return out;
}

BlindSessionOptions options(const std::filesystem::path& file, bool resume = false) {
  BlindSessionOptions o;
  o.evaluator = "ann";
  o.session_file = file;
  o.resume = resume;
  o.clock = [] { return std::int64_t{1700000000}; };
  return o;
}

}  // namespace

TEST_CASE("drawing items") {
  const auto h = pool("h", Source::kHuman, 40), c = pool("c", Source::kComputer, 40);
  const auto items = draw_items(h, c, 50, 3);
  CHECK(items.size() == 50);
  std::set<std::string> ids;
  for (const auto& it : items) ids.insert(it.joke_id);
  CHECK(ids.size() == 50);
  const auto again = draw_items(h, c, 50, 3);
  CHECK(std::equal(items.begin(), items.end(), again.begin(),
                   [](const EvalItem& a, const EvalItem& b) { return a.joke_id == b.joke_id; }));
  CHECK(draw_items(h, pool("c", Source::kComputer, 2), 42, 1).size() == 42);
  CHECK_THROWS_AS(draw_items(h, c, 0, 1), UsageError);
  CHECK_THROWS_AS(draw_items(h, c, 81, 1), UsageError);
  CHECK_THROWS_AS(draw_items({}, c, 1, 1), UsageError);
}

TEST_CASE("blind session records answers and hides sources") {
  testing::TempDir dir("eval");
  const auto items = draw_items(pool("h", Source::kHuman, 3), pool("c", Source::kComputer, 3), 4, 9);
  std::istringstream answers("h\nx\nc\n  H \ncomputer\n");
  std::ostringstream screen;
  const auto outcome = run_blind_eval(items, answers, screen, options(dir / "ann.jsonl"));
  CHECK_FALSE(outcome.interrupted);
  CHECK(outcome.records.size() == 4);
  CHECK(outcome.records[1].guess == Source::kComputer);
  CHECK(outcome.records[2].guess == Source::kHuman);

  const std::string shown = screen.str();
  const auto summary = shown.find("Session complete");
  REQUIRE(summary != std::string::npos);
  const std::string prompts = shown.substr(0, summary);
  CHECK(prompts.find("human") == std::string::npos);
  CHECK(prompts.find("computer") == std::string::npos);
  CHECK(prompts.find("Please answer") != std::string::npos);
  CHECK(prompts.find("[1/4]") != std::string::npos);

  const auto lines = testing::slurp(dir / "ann.jsonl");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 4);
  CHECK(read_sessions(dir / "ann.jsonl").size() == 4);
}

TEST_CASE("scripted sessions are reproducible") {
  testing::TempDir dir("eval-det");
  const auto items = draw_items(pool("h", Source::kHuman, 5), pool("c", Source::kComputer, 5), 6, 21);
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    std::istringstream answers("h\nc\nh\nc\nh\nc\n");
    std::ostringstream screen;
    run_blind_eval(items, answers, screen, options(dir / name));
  }
  CHECK(testing::slurp(dir / "a.jsonl") == testing::slurp(dir / "b.jsonl"));
}

TEST_CASE("interrupted sessions resume") {
  testing::TempDir dir("eval-resume");
  const auto items = draw_items(pool("h", Source::kHuman, 5), pool("c", Source::kComputer, 5), 5, 2);
  std::ostringstream screen;
  std::istringstream partial("h\nc\n");
  const auto first = run_blind_eval(items, partial, screen, options(dir / "ann.jsonl"));
  CHECK(first.interrupted);
  CHECK(first.records.size() == 2);
  CHECK(testing::slurp(dir / "ann.jsonl").find("\"resumable\":true") != std::string::npos);

  std::istringstream rest("h\nh\nh\n");
  const auto second = run_blind_eval(items, rest, screen, options(dir / "ann.jsonl", true));
  CHECK_FALSE(second.interrupted);
  CHECK(second.skipped == 2);
  CHECK(second.records.size() == 3);
  CHECK(read_sessions(dir.path()).size() == 5);
}

TEST_CASE("table six report") {
  const auto r = report(table_six_records());
  CHECK(r.matrix.at(Source::kComputer, Source::kComputer) == 114);
  CHECK(r.computer.recall == doctest::Approx(114.0 / 124.0).epsilon(1e-12));
  CHECK(r.computer.precision == doctest::Approx(114.0 / 132.0).epsilon(1e-12));
  CHECK(r.human.precision == doctest::Approx(108.0 / 118.0).epsilon(1e-12));
  CHECK(r.human.recall == doctest::Approx(108.0 / 126.0).epsilon(1e-12));
  CHECK(r.accuracy == doctest::Approx(222.0 / 250.0).epsilon(1e-12));
  CHECK(r.notes.empty());

  auto checked = r;
  check_reference(checked, 0.9193, 0.8382);
  CHECK(checked.notes.size() == 2);
  auto matching = r;
  check_reference(matching, 0.9153, 0.9194);
  CHECK(matching.notes.empty());
}

TEST_CASE("report ignores record order") {
  auto records = table_six_records();
  const auto expected = report(records).to_json();
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    for (std::size_t i = records.size() - 1; i > 0; --i) std::swap(records[i], records[rng.below(i + 1)]);
    CHECK(report(records).to_json() == expected);
  }
}

TEST_CASE("degenerate reports") {
  std::vector<EvalRecord> perfect = {{"e", "1", Source::kHuman, Source::kHuman, 0},
                                     {"e", "2", Source::kComputer, Source::kComputer, 0}};
  const auto p = report(perfect);
  CHECK(p.computer.precision == 1.0);
  CHECK(p.computer.recall == 1.0);
  CHECK(p.human.precision == 1.0);
  CHECK(p.human.recall == 1.0);

  std::vector<EvalRecord> one_class = {{"e", "1", Source::kHuman, Source::kHuman, 0}};
  const auto o = report(one_class);
  CHECK_FALSE(o.computer.precision_defined);
  CHECK(o.computer.precision == 0.0);
  CHECK_FALSE(o.notes.empty());
  CHECK_THROWS_AS(report(std::vector<EvalRecord>{}), UsageError);
}

TEST_CASE("session timestamps honour SOURCE_DATE_EPOCH") {
  ::setenv("SOURCE_DATE_EPOCH", "1234", 1);
  CHECK(current_timestamp() == 1234);
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(current_timestamp() > 1600000000);
}
