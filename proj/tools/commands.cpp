#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "humor/annotate.hpp"
#include "humor/classify.hpp"
#include "humor/corpus.hpp"
#include "humor/error.hpp"
#include "humor/evaluation.hpp"
#include "humor/features.hpp"
#include "humor/format.hpp"
#include "humor/infill.hpp"
#include "humor/lexicons.hpp"
#include "humor/markov.hpp"
#include "humor/neural.hpp"
#include "humor/template.hpp"
#include "json.hpp"

namespace humor::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--config", c.config, "JSON file overriding module settings");
  cmd->add_option("--out", c.out, out_help);
}

// Section `name` of the --config file, or an empty object.
json config_section(const Common& c, const std::string& name) {
  if (c.config.empty()) return json::object();
  std::ifstream in(c.config, std::ios::binary);
  if (!in) throw DataError("cannot open config file " + c.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("config file " + c.config + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> kSections = {"classifier", "neural", "template", "markov",
                                                    "infill",     "eval",   "annotate"};
    if (!kSections.count(key)) throw UsageError("unknown config section '" + key + "'");
    if (!value.is_object()) throw UsageError("config section '" + key + "' must be an object");
  }
  return j.value(name, json::object());
}

void require_out(const Common& c) {
  if (c.out.empty()) throw UsageError("--out is required");
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

CorpusFormat format_for(const std::string& path, const std::string& requested) {
  if (!requested.empty()) return parse_corpus_format(requested);
  return fs::path(path).extension() == ".csv" ? CorpusFormat::kCsv : CorpusFormat::kJsonl;
}

bool content_free(const std::string& text) {
  try {
    clean_text(text);
    return false;
  } catch (const DataError&) {
    return true;
  }
}

// Loads a corpus, dropping content-free records with a warning.
std::vector<Joke> load_jokes(const std::string& path, const std::string& format, std::ostream& err) {
  if (path.empty()) throw UsageError("--in is required");
  auto jokes = load_corpus(path, format_for(path, format));
  const auto before = jokes.size();
  jokes.erase(std::remove_if(jokes.begin(), jokes.end(), [](const Joke& j) { return content_free(j.text); }),
              jokes.end());
  if (jokes.size() != before) {
    err << "warning: skipped " << before - jokes.size() << " content-free record(s)\n";
  }
  if (jokes.empty()) throw DataError("corpus " + path + " has no usable records");
  return jokes;
}

struct AnnotationInputs {
  std::string in;
  std::string format;
  std::string conllu;
  std::string pos_lexicon;
};

void add_annotation_inputs(CLI::App* cmd, AnnotationInputs& a) {
  cmd->add_option("--in", a.in, "Corpus file (JSONL or CSV)")->required();
  cmd->add_option("--format", a.format, "Corpus format: jsonl|csv (default: by extension)");
  cmd->add_option("--conllu", a.conllu, "CoNLL-U annotations for the corpus");
  cmd->add_option("--pos-lexicon", a.pos_lexicon, "word<TAB>UPOS entries for the heuristic annotator");
}

std::vector<AnnotatedJoke> load_annotated(const AnnotationInputs& a, std::ostream& err) {
  const auto jokes = load_jokes(a.in, a.format, err);
  if (!a.conllu.empty()) return attach_conllu(jokes, group_documents(parse_conllu_file(a.conllu)));
  HeuristicAnnotator annotator;
  if (!a.pos_lexicon.empty()) annotator.load_lexicon(a.pos_lexicon);
  std::vector<AnnotatedJoke> docs;
  docs.reserve(jokes.size());
  for (const auto& j : jokes) docs.push_back(annotate_heuristic(j, annotator));
  return docs;
}

LexiconSet load_lexicons(const std::string& dir, std::ostream& err) {
  if (dir.empty()) throw UsageError("--lexicons is required");
  if (!fs::is_directory(dir)) throw DataError("lexicon directory " + dir + " does not exist");
  auto lex = LexiconSet::load(dir);
  for (const auto& w : lex.warnings()) err << "warning: " << w << "\n";
  return lex;
}

// --- ingest ------------------------------------------------------------------

struct IngestOptions {
  Common common;
  std::string in, format;
};

void cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  config_section(o.common, "annotate");
  const auto jokes = load_jokes(o.in, o.format, err);
  auto file = open_output(o.common.out);
  for (const auto& j : jokes) {
    const auto text = clean_text(j.text);
    const auto split = split_setup_punchline(text);
    json rec = {{"id", j.id}, {"text", text}, {"setup", split.setup}, {"punchline", split.punchline},
                {"split_rule", std::string(to_string(split.rule))}};
    if (j.label) rec["label"] = *j.label;
    file << rec.dump() << '\n';
  }
  out << "ingested " << jokes.size() << " records into " << o.common.out << "\n";
}

// --- annotate ----------------------------------------------------------------

struct AnnotateOptions {
  Common common;
  AnnotationInputs inputs;
};

void cmd_annotate(const AnnotateOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  const auto docs = load_annotated(o.inputs, err);
  auto file = open_output(o.common.out);
  write_conllu(file, to_conllu(docs));
  std::size_t approximate = 0;
  for (const auto& d : docs) approximate += d.approximate;
  out << "annotated " << docs.size() << " documents (" << approximate << " heuristic) into " << o.common.out << "\n";
}

// --- features ----------------------------------------------------------------

struct FeaturesOptions {
  Common common;
  AnnotationInputs inputs;
  std::string lexicons;
};

void cmd_features(const FeaturesOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  const auto lex = load_lexicons(o.lexicons, err);
  const auto docs = load_annotated(o.inputs, err);
  const auto summary = export_feature_table(docs, lex, o.common.out);
  out << "wrote " << summary.rows << " feature rows to " << (fs::path(o.common.out) / "features.csv").string()
      << "\n";
  const auto& names = feature_names();
  for (const auto& [label, means] : summary.class_means) {
    out << "class " << label << " (n=" << summary.class_counts.at(label) << ") means:";
    for (std::size_t f = 0; f < names.size(); ++f) out << ' ' << names[f] << '=' << format_double(means[f], 4);
    out << "\n";
  }
}

// --- train / classify --------------------------------------------------------

struct TrainOptions {
  Common common;
  std::string features;
  std::string model = "svm";
  std::string kernel;
  double test_fraction = 0.2;
};

json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"tp", m.tp},             {"fp", m.fp},               {"fn", m.fn},         {"tn", m.tn}};
}

void cmd_train(const TrainOptions& o, std::ostream& out, std::ostream&) {
  require_out(o.common);
  auto cfg = TrainConfig::from_json(config_section(o.common, "classifier"));
  cfg.seed = o.common.seed;
  if (!o.kernel.empty()) cfg.kernel = parse_kernel_kind(o.kernel);
  const auto kind = parse_model_kind(o.model);
  const auto data = read_feature_table(o.features).to_dataset();
  auto [train_set, test_set] = stratified_split(data, o.test_fraction, o.common.seed);
  const auto model = train(kind, train_set, cfg);
  save_model(model, o.common.out);
  json report = {{"model", std::string(to_string(kind))},
                 {"train_size", train_set.size()},
                 {"test_size", test_set.size()},
                 {"test", metrics_json(evaluate(model, test_set))}};
  out << report.dump(2) << "\n";
}

struct ClassifyOptions {
  Common common;
  std::string model, features;
};

void cmd_classify(const ClassifyOptions& o, std::ostream& out, std::ostream&) {
  require_out(o.common);
  config_section(o.common, "classifier");
  const auto table = read_feature_table(o.features);
  const auto model = load_model(o.model, &table.feature_names);
  auto file = open_output(o.common.out);
  file << "id,predicted,score\n";
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool labeled = true;
  for (Eigen::Index i = 0; i < table.x.rows(); ++i) {
    const auto p = predict(model, Eigen::VectorXd(table.x.row(i).transpose()));
    const auto& id = table.ids[static_cast<std::size_t>(i)];
    file << id << ',' << p.label << ',' << format_double(p.score, 12) << '\n';
    const auto& label = table.labels[static_cast<std::size_t>(i)];
    if (!label) {
      labeled = false;
      continue;
    }
    if (p.label == 1) (*label == 1 ? tp : fp)++;
    else (*label == 1 ? fn : tn)++;
  }
  out << "classified " << table.x.rows() << " rows into " << o.common.out << "\n";
  if (labeled && table.x.rows() > 0) out << metrics_json(metrics_from_counts(tp, fp, fn, tn)).dump(2) << "\n";
}

// --- markov ------------------------------------------------------------------

struct MarkovTrainOptions {
  Common common;
  std::string in, format;
  std::string level = "word";
  int n = 3;
};

TokenizeOptions markov_tokenize(TokenLevel level) {
  TokenizeOptions t;
  t.level = level;
  t.punct_mode = PunctMode::kKeep;
  t.lowercase = true;
  return t;
}

void cmd_markov_train(MarkovTrainOptions o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  const auto section = config_section(o.common, "markov");
  if (section.contains("n")) o.n = section["n"].get<int>();
  if (section.contains("level")) o.level = section["level"].get<std::string>();
  const auto level = parse_token_level(o.level);
  const auto jokes = load_jokes(o.in, o.format, err);
  std::vector<TokenSeq> corpus;
  for (const auto& j : jokes) corpus.push_back(tokenize(clean_text(j.text), markov_tokenize(level)));
  const auto model = fit_ngram(corpus, level, o.n);
  model.save(o.common.out);
  out << "fit " << to_string(level) << "-level n=" << o.n << " model with " << model.counts().size()
      << " contexts into " << o.common.out << "\n";
}

struct MarkovGenOptions {
  Common common;
  std::string model, seed_text;
  int max_tokens = 50;
  int count = 1;
  bool backoff = false;
};

void cmd_markov_gen(MarkovGenOptions o, std::ostream& out, std::ostream&) {
  const auto section = config_section(o.common, "markov");
  if (section.contains("max_tokens")) o.max_tokens = section["max_tokens"].get<int>();
  if (section.contains("backoff")) o.backoff = section["backoff"].get<bool>();
  if (o.count < 1) throw UsageError("--count must be at least 1");
  const auto model = NGramModel::load(o.model);
  const auto seed_tokens =
      o.seed_text.empty() ? std::vector<std::string>{} : tokenize(o.seed_text, markov_tokenize(model.level())).tokens;
  std::ostringstream lines;
  for (int i = 0; i < o.count; ++i) {
    MarkovGenerateOptions g;
    g.max_tokens = o.max_tokens;
    g.seed = o.common.seed + static_cast<std::uint64_t>(i);
    g.backoff = o.backoff;
    const auto tokens = generate(model, seed_tokens, g);
    lines << json{{"seed", g.seed}, {"text", join_tokens(tokens, model.level())}}.dump() << '\n';
  }
  if (o.common.out.empty()) {
    out << lines.str();
  } else {
    open_output(o.common.out) << lines.str();
  }
}

// --- lstm --------------------------------------------------------------------

TokenizeOptions neural_tokenize() {
  TokenizeOptions t;
  t.level = TokenLevel::kWord;
  t.punct_mode = PunctMode::kDrop;
  t.lowercase = true;
  return t;
}

struct LstmTrainOptions {
  Common common;
  std::string in, format, loss_history;
  std::size_t max_vocab = 5000;
};

void cmd_lstm_train(const LstmTrainOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  auto cfg = NeuralConfig::from_json(config_section(o.common, "neural"));
  cfg.seed = o.common.seed;
  const auto jokes = load_jokes(o.in, o.format, err);
  std::vector<TokenSeq> corpus;
  for (const auto& j : jokes) corpus.push_back(tokenize(clean_text(j.text), neural_tokenize()));
  auto vocab = Vocabulary::build(corpus, o.max_vocab);
  cfg.vocab_size = static_cast<int>(vocab.size());
  const auto windows = make_windows(corpus, vocab, cfg.sequence_length);
  NeuralLM model(cfg, std::move(vocab));
  const auto history = model.train(windows);
  model.save(o.common.out);
  if (!o.loss_history.empty()) write_loss_history(history, o.loss_history);
  out << "trained on " << windows.size() << " windows, vocabulary " << cfg.vocab_size;
  if (!history.empty()) out << ", final loss " << format_double(history.back(), 6);
  out << "\n";
}

struct LstmGenOptions {
  Common common;
  std::string model, seed_text;
  int max_tokens = 30;
  int count = 1;
  double temperature = 0.0;
};

void cmd_lstm_gen(const LstmGenOptions& o, std::ostream& out, std::ostream&) {
  config_section(o.common, "neural");
  if (o.count < 1) throw UsageError("--count must be at least 1");
  const auto model = NeuralLM::load(o.model);
  const auto seed_tokens = tokenize(o.seed_text, neural_tokenize()).tokens;
  std::ostringstream lines;
  for (int i = 0; i < o.count; ++i) {
    const auto rng_seed = o.common.seed + static_cast<std::uint64_t>(i);
    const auto g = model.generate(seed_tokens, o.max_tokens, rng_seed, o.temperature);
    std::string text;
    for (const auto& t : g.tokens) text += (text.empty() ? "" : " ") + t;
    lines << json{{"seed", rng_seed},
                  {"text", text},
                  {"degeneration",
                   {{"period", g.degeneration.period},
                    {"repeats", g.degeneration.repeats},
                    {"span", g.degeneration.span}}}}
                 .dump()
          << '\n';
  }
  if (o.common.out.empty()) {
    out << lines.str();
  } else {
    open_output(o.common.out) << lines.str();
  }
}

// --- template / infill / generate ---------------------------------------------

WeightConfig weight_config(const Common& c, const std::string& mask_strategy) {
  auto cfg = WeightConfig::from_json(config_section(c, "template"));
  if (!mask_strategy.empty()) cfg.mask_strategy = MaskStrategy::parse(mask_strategy);
  return cfg;
}

struct TemplateOptions {
  Common common;
  AnnotationInputs inputs;
  std::string lexicons, mask_strategy, placeholder = "[MASK]";
};

void cmd_template(const TemplateOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  const auto cfg = weight_config(o.common, o.mask_strategy);
  const auto lex = load_lexicons(o.lexicons, err);
  const auto docs = load_annotated(o.inputs, err);
  auto file = open_output(o.common.out);
  std::size_t flagged = 0;
  for (const auto& d : docs) {
    const auto tpl = extract_template(d, lex, cfg);
    flagged += tpl.no_candidates;
    auto rec = template_to_json(tpl);
    rec["rendered"] = render(tpl, o.placeholder);
    file << rec.dump() << '\n';
  }
  out << "extracted " << docs.size() << " templates into " << o.common.out;
  if (flagged) out << " (" << flagged << " without candidates)";
  out << "\n";
}

struct InfillerOptions {
  std::string kind = "baseline";
  std::string endpoint;
  int timeout_ms = 10000;
  int top_k = 5;
};

void add_infiller_options(CLI::App* cmd, InfillerOptions& o) {
  cmd->add_option("--infiller", o.kind, "baseline|remote")->capture_default_str();
  cmd->add_option("--endpoint", o.endpoint, "Masked-LM service URL (default: $HUMOR_MLM_URL)");
  cmd->add_option("--timeout-ms", o.timeout_ms, "Remote request timeout")->capture_default_str();
  cmd->add_option("--top-k", o.top_k, "Candidates requested per mask")->capture_default_str();
}

std::unique_ptr<Infiller> make_infiller(const InfillerOptions& o, const std::vector<AnnotatedJoke>& vocab_docs) {
  if (o.kind == "baseline") return std::make_unique<BaselineInfiller>(build_pos_vocabulary(vocab_docs));
  if (o.kind == "remote") {
    auto endpoint = o.endpoint.empty() ? RemoteInfiller::default_endpoint() : std::optional<std::string>(o.endpoint);
    if (!endpoint) throw UsageError("remote infiller needs --endpoint or HUMOR_MLM_URL");
    return std::make_unique<RemoteInfiller>(*endpoint, std::chrono::milliseconds(o.timeout_ms));
  }
  throw UsageError("unknown infiller '" + o.kind + "' (expected baseline|remote)");
}

struct InfillOptions {
  Common common;
  std::string templates;
  AnnotationInputs vocab;
  InfillerOptions infiller;
};

void cmd_infill(const InfillOptions& o, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  config_section(o.common, "infill");
  std::ifstream in(o.templates, std::ios::binary);
  if (!in) throw DataError("cannot open templates " + o.templates);
  const auto templates = read_templates(in);
  std::vector<AnnotatedJoke> vocab_docs;
  if (o.infiller.kind == "baseline") {
    if (o.vocab.in.empty()) throw UsageError("baseline infiller needs --vocab-corpus");
    vocab_docs = load_annotated(o.vocab, err);
  }
  const auto infiller = make_infiller(o.infiller, vocab_docs);
  auto file = open_output(o.common.out);
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto r = fill_template(templates[i], *infiller, o.common.seed + i, o.infiller.top_k);
    file << r.to_json().dump() << '\n';
  }
  out << "filled " << templates.size() << " templates into " << o.common.out << "\n";
}

struct GenerateOptions {
  Common common;
  AnnotationInputs inputs;
  std::string lexicons, mask_strategy;
  InfillerOptions infiller;
};

void cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err) {
  const auto cfg = weight_config(o.common, o.mask_strategy);
  const auto lex = load_lexicons(o.lexicons, err);
  const auto docs = load_annotated(o.inputs, err);
  const auto infiller = make_infiller(o.infiller, docs);
  std::ostringstream lines;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto tpl = extract_template(docs[i], lex, cfg);
    const auto r = fill_template(tpl, *infiller, o.common.seed + i, o.infiller.top_k);
    lines << r.to_json().dump() << '\n';
  }
  if (o.common.out.empty()) {
    out << lines.str();
  } else {
    open_output(o.common.out) << lines.str();
    out << "generated " << docs.size() << " jokes into " << o.common.out << "\n";
  }
}

// --- evaluation ----------------------------------------------------------------

struct EvalOptions {
  Common common;
  std::string human, generated, evaluator;
  std::size_t n_items = 50;
  bool resume = false;
};

std::vector<EvalItem> read_generated_items(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open generated jokes " + path);
  std::vector<EvalItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    const std::string text = j.contains("generated") ? j["generated"].get<std::string>() : j.value("text", "");
    if (text.empty()) throw DataError("record has no 'generated' or 'text' field", line_no);
    std::string id = j.value("joke_id", j.value("id", std::to_string(items.size())));
    items.push_back({"gen-" + id, text, Source::kComputer});
  }
  return items;
}

void cmd_eval_blind(EvalOptions o, std::istream& in, std::ostream& out, std::ostream& err) {
  require_out(o.common);
  const auto section = config_section(o.common, "eval");
  if (section.contains("n_items")) o.n_items = section["n_items"].get<std::size_t>();
  if (o.evaluator.empty()) throw UsageError("--evaluator is required");
  std::vector<EvalItem> human;
  for (const auto& j : load_jokes(o.human, "", err)) human.push_back({j.id, clean_text(j.text), Source::kHuman});
  const auto generated = read_generated_items(o.generated);
  const auto items = draw_items(human, generated, o.n_items, o.common.seed);
  BlindSessionOptions opts;
  opts.evaluator = o.evaluator;
  opts.resume = o.resume;
  const fs::path out_path(o.common.out);
  std::error_code ec;
  fs::create_directories(out_path, ec);
  if (ec) throw DataError("cannot create session directory " + o.common.out + ": " + ec.message());
  opts.session_file = out_path / (o.evaluator + ".jsonl");
  if (!o.resume && fs::exists(opts.session_file)) {
    throw UsageError("session file " + opts.session_file.string() + " exists; pass --resume to continue it");
  }
  const auto outcome = run_blind_eval(items, in, out, opts);
  if (outcome.interrupted) throw DataError("session interrupted before all items were answered");
}

struct ReportOptions {
  Common common;
  std::string sessions;
  std::optional<double> reference_precision, reference_recall;
};

void cmd_report(const ReportOptions& o, std::ostream& out, std::ostream&) {
  config_section(o.common, "eval");
  if (o.sessions.empty()) throw UsageError("--sessions is required");
  auto r = report(read_sessions(o.sessions));
  check_reference(r, o.reference_precision, o.reference_recall);
  out << r.table();
  if (!o.common.out.empty()) open_output(o.common.out) << r.to_json().dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Humor classification and generation toolkit", "humor"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Clean a corpus and split setups from punchlines");
  add_common(c_ingest, ingest.common, "Output JSONL");
  c_ingest->add_option("--in", ingest.in, "Corpus file")->required();
  c_ingest->add_option("--format", ingest.format, "jsonl|csv (default: by extension)");

  AnnotateOptions annotate;
  auto* c_annotate = app.add_subcommand("annotate", "Annotate a corpus and write CoNLL-U");
  add_common(c_annotate, annotate.common, "Output CoNLL-U file");
  add_annotation_inputs(c_annotate, annotate.inputs);

  FeaturesOptions features;
  auto* c_features = app.add_subcommand("features", "Extract the humor feature table");
  add_common(c_features, features.common, "Output directory");
  add_annotation_inputs(c_features, features.inputs);
  c_features->add_option("--lexicons", features.lexicons, "Lexicon directory")->required();

  TrainOptions train_o;
  auto* c_train = app.add_subcommand("train", "Train a classifier on a feature table");
  add_common(c_train, train_o.common, "Output model JSON");
  c_train->add_option("--features", train_o.features, "features.csv")->required();
  c_train->add_option("--model", train_o.model, "logreg|gnb|svm")->capture_default_str();
  c_train->add_option("--kernel", train_o.kernel, "SVM kernel: linear|rbf");
  c_train->add_option("--test-fraction", train_o.test_fraction, "Held-out share per class")->capture_default_str();

  ClassifyOptions classify_o;
  auto* c_classify = app.add_subcommand("classify", "Label a feature table with a trained model");
  add_common(c_classify, classify_o.common, "Output predictions CSV");
  c_classify->add_option("--model", classify_o.model, "Model JSON")->required();
  c_classify->add_option("--features", classify_o.features, "features.csv")->required();

  MarkovTrainOptions mtrain;
  auto* c_mtrain = app.add_subcommand("markov-train", "Fit an n-gram Markov model");
  add_common(c_mtrain, mtrain.common, "Output model JSON");
  c_mtrain->add_option("--in", mtrain.in, "Corpus file")->required();
  c_mtrain->add_option("--format", mtrain.format, "jsonl|csv");
  c_mtrain->add_option("--level", mtrain.level, "word|char")->capture_default_str();
  c_mtrain->add_option("--n", mtrain.n, "Gram size (context n-1)")->capture_default_str();

  MarkovGenOptions mgen;
  auto* c_mgen = app.add_subcommand("markov-gen", "Generate text from an n-gram model");
  add_common(c_mgen, mgen.common, "Output JSONL (default: stdout)");
  c_mgen->add_option("--model", mgen.model, "Model JSON")->required();
  c_mgen->add_option("--seed-text", mgen.seed_text, "Setup to continue");
  c_mgen->add_option("--max-tokens", mgen.max_tokens, "Generated tokens per sample")->capture_default_str();
  c_mgen->add_option("--count", mgen.count, "Number of samples")->capture_default_str();
  c_mgen->add_flag("--backoff", mgen.backoff, "Back off to shorter contexts when stuck");

  LstmTrainOptions ltrain;
  auto* c_ltrain = app.add_subcommand("lstm-train", "Train the LSTM language model");
  add_common(c_ltrain, ltrain.common, "Output model JSON");
  c_ltrain->add_option("--in", ltrain.in, "Corpus file")->required();
  c_ltrain->add_option("--format", ltrain.format, "jsonl|csv");
  c_ltrain->add_option("--loss-history", ltrain.loss_history, "Write epoch,loss CSV here");
  c_ltrain->add_option("--max-vocab", ltrain.max_vocab, "Vocabulary size cap")->capture_default_str();

  LstmGenOptions lgen;
  auto* c_lgen = app.add_subcommand("lstm-gen", "Generate text from the LSTM model");
  add_common(c_lgen, lgen.common, "Output JSONL (default: stdout)");
  c_lgen->add_option("--model", lgen.model, "Model JSON")->required();
  c_lgen->add_option("--seed-text", lgen.seed_text, "Setup to continue");
  c_lgen->add_option("--max-tokens", lgen.max_tokens, "Generated tokens per sample")->capture_default_str();
  c_lgen->add_option("--count", lgen.count, "Number of samples")->capture_default_str();
  c_lgen->add_option("--temperature", lgen.temperature, "0 for greedy")->capture_default_str();

  TemplateOptions tmpl;
  auto* c_tmpl = app.add_subcommand("template", "Extract masked templates");
  add_common(c_tmpl, tmpl.common, "Output templates JSONL");
  add_annotation_inputs(c_tmpl, tmpl.inputs);
  c_tmpl->add_option("--lexicons", tmpl.lexicons, "Lexicon directory")->required();
  c_tmpl->add_option("--mask-strategy", tmpl.mask_strategy, "count:K, fraction:R or threshold:T");
  c_tmpl->add_option("--placeholder", tmpl.placeholder, "Mask placeholder in rendered text")->capture_default_str();

  InfillOptions infill_o;
  auto* c_infill = app.add_subcommand("infill", "Fill extracted templates");
  add_common(c_infill, infill_o.common, "Output JSONL");
  c_infill->add_option("--templates", infill_o.templates, "Templates JSONL")->required();
  c_infill->add_option("--vocab-corpus", infill_o.vocab.in, "Corpus for the baseline vocabulary");
  c_infill->add_option("--vocab-conllu", infill_o.vocab.conllu, "CoNLL-U for the vocabulary corpus");
  add_infiller_options(c_infill, infill_o.infiller);

  GenerateOptions gen;
  auto* c_gen = app.add_subcommand("generate", "Extract templates and fill them end to end");
  add_common(c_gen, gen.common, "Output JSONL (default: stdout)");
  add_annotation_inputs(c_gen, gen.inputs);
  c_gen->add_option("--lexicons", gen.lexicons, "Lexicon directory")->required();
  c_gen->add_option("--mask-strategy", gen.mask_strategy, "count:K, fraction:R or threshold:T");
  add_infiller_options(c_gen, gen.infiller);

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval-blind", "Run a double-blind human evaluation session");
  add_common(c_eval, eval.common, "Session directory");
  c_eval->add_option("--human", eval.human, "Human-written jokes (corpus file)")->required();
  c_eval->add_option("--generated", eval.generated, "Generated jokes JSONL")->required();
  c_eval->add_option("--evaluator", eval.evaluator, "Evaluator id")->required();
  c_eval->add_option("--n-items", eval.n_items, "Items per session")->capture_default_str();
  c_eval->add_flag("--resume", eval.resume, "Continue an interrupted session");

  ReportOptions rep;
  auto* c_rep = app.add_subcommand("report", "Summarize evaluation sessions");
  add_common(c_rep, rep.common, "Output report JSON");
  c_rep->add_option("--sessions", rep.sessions, "Session file or directory")->required();
  c_rep->add_option("--reference-precision", rep.reference_precision, "Published precision to compare against");
  c_rep->add_option("--reference-recall", rep.reference_recall, "Published recall to compare against");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (c_ingest->parsed()) cmd_ingest(ingest, out, err);
    else if (c_annotate->parsed()) cmd_annotate(annotate, out, err);
    else if (c_features->parsed()) cmd_features(features, out, err);
    else if (c_train->parsed()) cmd_train(train_o, out, err);
    else if (c_classify->parsed()) cmd_classify(classify_o, out, err);
    else if (c_mtrain->parsed()) cmd_markov_train(mtrain, out, err);
    else if (c_mgen->parsed()) cmd_markov_gen(mgen, out, err);
    else if (c_ltrain->parsed()) cmd_lstm_train(ltrain, out, err);
    else if (c_lgen->parsed()) cmd_lstm_gen(lgen, out, err);
    else if (c_tmpl->parsed()) cmd_template(tmpl, out, err);
    else if (c_infill->parsed()) cmd_infill(infill_o, out, err);
    else if (c_gen->parsed()) cmd_generate(gen, out, err);
    else if (c_eval->parsed()) cmd_eval_blind(eval, in, out, err);
    else if (c_rep->parsed()) cmd_report(rep, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace humor::cli
