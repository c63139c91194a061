#include <cmath>

#include "doctest.h"
#include "humor/error.hpp"
#include "humor/neural.hpp"
#include "humor/rng.hpp"
#include "support.hpp"

using namespace humor;

namespace {

TokenSeq words(const std::string& text) { return tokenize(text, {TokenLevel::kWord, PunctMode::kDrop, true}); }

NeuralConfig small_config() {
  NeuralConfig cfg;
  cfg.embed_dim = 5;
  cfg.hidden_dim = 6;
  cfg.sequence_length = 3;
  cfg.dropout_rate = 0.0;
  cfg.seed = 7;
  return cfg;
}

NeuralLM model_for(const std::vector<TokenSeq>& corpus, NeuralConfig cfg) {
  auto vocab = Vocabulary::build(corpus);
  cfg.vocab_size = static_cast<int>(vocab.size());
  return NeuralLM(cfg, std::move(vocab));
}

void redraw(NeuralLM& model, double scale, std::uint64_t seed) {
  Rng rng(seed);
  for (Eigen::Index i = 0; i < model.parameters().size(); ++i) model.parameters()(i) = rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("vocabulary order and reserved slots") {
  const auto v = Vocabulary::build({words("b a b c b a")});
  CHECK(v.token(Vocabulary::kUnk) == "<unk>");
  CHECK(v.token(Vocabulary::kEos) == "</s>");
  CHECK(v.token(Vocabulary::kPad) == "<s>");
  CHECK(v.token(3) == "b");
  CHECK(v.token(4) == "a");
  CHECK(v.token(5) == "c");
  CHECK(v.index("zebra") == Vocabulary::kUnk);
  CHECK(Vocabulary::build({words("b a b c b a")}, 4).size() == 4);
}

TEST_CASE("windows are padded and terminated") {
  const auto v = Vocabulary::build({words("x y")});
  const auto w = make_windows({words("x y")}, v, 2);
  REQUIRE(w.size() == 3);
  CHECK(w[0].inputs == std::vector<int>{Vocabulary::kPad, Vocabulary::kPad});
  CHECK(w[0].target == v.index("x"));
  CHECK(w[2].inputs == std::vector<int>{v.index("x"), v.index("y")});
  CHECK(w[2].target == Vocabulary::kEos);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.vocab_size = 10;
  cfg.dropout_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.dropout_rate = 0.2;
  cfg.hidden_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  const auto back = NeuralConfig::from_json(small_config().to_json());
  CHECK(back.to_json() == small_config().to_json());
}

TEST_CASE("shapes and seeding") {
  auto cfg = small_config();
  cfg.embed_dim = 4;
  auto vocab = Vocabulary::from_tokens({"<unk>", "</s>", "<s>", "a", "b", "c", "d", "e", "f", "g"});
  REQUIRE(vocab.size() == 10);
  cfg.vocab_size = 10;
  NeuralLM a(cfg, vocab), b(cfg, vocab);
  CHECK(a.embedding().rows() == 10);
  CHECK(a.embedding().cols() == 4);
  CHECK(a.parameters() == b.parameters());
  cfg.seed = 8;
  CHECK_FALSE(NeuralLM(cfg, vocab).parameters() == a.parameters());
}

TEST_CASE("predictions are distributions") {
  const std::vector<TokenSeq> corpus = {words("the cat sat on the mat"), words("the dog ate the cat")};
  const auto model = model_for(corpus, small_config());
  for (const auto& w : make_windows(corpus, model.vocab(), 3)) {
    const auto p = model.predict(w.inputs);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(p.minCoeff() > 0.0);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  const std::vector<TokenSeq> corpus = {words("the cat sat on the mat"), words("the dog ate the cat")};
  auto model = model_for(corpus, small_config());
  redraw(model, 1.0, 11);
  const auto windows = make_windows(corpus, model.vocab(), 3);
  GradCheckOptions opts;
  opts.coordinates = 400;
  const auto ok = grad_check(model, windows, opts);
  CHECK(ok.coordinates == 400);
  CHECK(ok.max_relative_error < 1e-4);

  opts.perturb = [](Eigen::VectorXd& g) { g *= 1.1; };
  CHECK(grad_check(model, windows, opts).max_relative_error > 1e-2);
}

TEST_CASE("dropout only applies with a dropout rng") {
  const std::vector<TokenSeq> corpus = {words("one two three four five six")};
  auto cfg = small_config();
  cfg.dropout_rate = 0.5;
  const auto model = model_for(corpus, cfg);
  const auto windows = make_windows(corpus, model.vocab(), 3);
  CHECK(model.loss(windows) == model.loss(windows));
  Rng r1(1), r2(1);
  CHECK(model.loss(windows, nullptr, &r1) == model.loss(windows, nullptr, &r2));
  Rng r3(1);
  CHECK(model.loss(windows, nullptr, &r3) != model.loss(windows));
}

TEST_CASE("overfits a single window") {
  const std::vector<TokenSeq> corpus = {words("why did it")};
  auto cfg = small_config();
  cfg.embed_dim = 8;
  cfg.hidden_dim = 10;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 1;
  cfg.epochs = 200;
  auto model = model_for(corpus, cfg);
  auto windows = make_windows(corpus, model.vocab(), 3);
  windows.resize(1);
  const auto history = model.train(windows);
  REQUIRE(history.size() == 200);
  CHECK(history.back() < 0.1);
  for (double l : history) CHECK(std::isfinite(l));
}

TEST_CASE("zero learning rate leaves the loss unchanged") {
  const std::vector<TokenSeq> corpus = {words("a b c d e"), words("b c d")};
  auto cfg = small_config();
  cfg.learning_rate = 0.0;
  cfg.epochs = 4;
  auto model = model_for(corpus, cfg);
  const auto before = model.parameters();
  const auto history = model.train(make_windows(corpus, model.vocab(), 3));
  for (double l : history) CHECK(l == doctest::Approx(history.front()).epsilon(1e-12));
  CHECK(model.parameters() == before);
}

TEST_CASE("generation") {
  const std::vector<TokenSeq> corpus = {words("what has four legs and flies"), words("a picnic table")};
  const auto model = model_for(corpus, small_config());
  const auto a = model.generate({"what", "has"}, 8, 3, 0.0);
  const auto b = model.generate({"what", "has"}, 8, 99, 0.0);
  CHECK(a.tokens == b.tokens);
  CHECK(a.tokens.size() <= 10);
  CHECK(a.tokens[0] == "what");
  for (const auto& t : a.tokens) CHECK(t != "<s>");
  CHECK(model.generate({}, 5, 1, 1.0).tokens.size() <= 5);
  CHECK(model.generate({"x"}, 6, 4, 0.7).tokens == model.generate({"x"}, 6, 4, 0.7).tokens);
}

TEST_CASE("trailing cycle detection") {
  const auto d = trailing_cycle({"what", "is", "the", "meaning", "of", "the", "world", "of", "the", "world"});
  CHECK(d.period == 3);
  CHECK(d.repeats == 2);
  CHECK(d.span == 6);
  CHECK(trailing_cycle({"a", "b", "c"}).span == 0);
  CHECK(trailing_cycle({}).span == 0);
  const auto run = trailing_cycle({"x", "a", "a", "a", "a"});
  CHECK(run.period == 1);
  CHECK(run.repeats == 4);
}

TEST_CASE("model round trip and loss history file") {
  testing::TempDir dir("neural");
  const std::vector<TokenSeq> corpus = {words("knock knock who is there")};
  auto cfg = small_config();
  cfg.epochs = 2;
  auto model = model_for(corpus, cfg);
  const auto history = model.train(make_windows(corpus, model.vocab(), 3));
  model.save(dir / "lm.json");
  const auto back = NeuralLM::load(dir / "lm.json");
  CHECK(back.parameters() == model.parameters());
  CHECK(back.vocab().tokens() == model.vocab().tokens());
  write_loss_history(history, dir / "loss.csv");
  const auto csv = testing::slurp(dir / "loss.csv");
  CHECK(csv.rfind("epoch,loss\n", 0) == 0);
}
