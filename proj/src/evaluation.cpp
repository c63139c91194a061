#include "humor/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "humor/error.hpp"
#include "humor/format.hpp"
#include "humor/rng.hpp"

namespace humor {

using nlohmann::json;

std::string_view to_string(Source source) { return source == Source::kHuman ? "human" : "computer"; }

std::optional<Source> parse_source(std::string_view text) {
  if (text == "human" || text == "h") return Source::kHuman;
  if (text == "computer" || text == "c") return Source::kComputer;
  return std::nullopt;
}

json EvalRecord::to_json() const {
  return {{"evaluator", evaluator},
          {"joke_id", joke_id},
          {"source", std::string(to_string(source))},
          {"guess", std::string(to_string(guess))},
          {"ts", ts}};
}

std::vector<EvalItem> draw_items(const std::vector<EvalItem>& human, const std::vector<EvalItem>& generated,
                                 std::size_t n_items, std::uint64_t seed) {
  if (n_items == 0) throw UsageError("empty session: n_items must be at least 1");
  if (human.empty() || generated.empty()) throw UsageError("both joke pools must be non-empty");
  if (n_items > human.size() + generated.size()) {
    throw UsageError("n_items " + std::to_string(n_items) + " exceeds the combined pool of " +
                     std::to_string(human.size() + generated.size()));
  }
  Rng rng(seed);
  std::vector<EvalItem> pools[2] = {human, generated};
  std::vector<EvalItem> out;
  while (out.size() < n_items) {
    std::size_t which;
    if (pools[0].empty()) which = 1;
    else if (pools[1].empty()) which = 0;
    else which = rng.below(2);
    auto& pool = pools[which];
    const std::size_t k = rng.below(pool.size());
    out.push_back(std::move(pool[k]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

std::int64_t current_timestamp() {
  if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH"); fixed && *fixed) {
    char* end = nullptr;
    const long long v = std::strtoll(fixed, &end, 10);
    if (end && *end == '\0') return v;
  }
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

std::string trim_lower(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  s = s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string item_key(const std::string& joke_id, Source source) {
  return std::string(to_string(source)) + '\x1f' + joke_id;
}

EvalRecord record_from_json(const json& j, std::size_t line) {
  EvalRecord r;
  try {
    r.evaluator = j.at("evaluator").get<std::string>();
    r.joke_id = j.at("joke_id").get<std::string>();
    const auto source = parse_source(j.at("source").get<std::string>());
    const auto guess = parse_source(j.at("guess").get<std::string>());
    if (!source || !guess) throw DataError("source and guess must be human or computer", line);
    r.source = *source;
    r.guess = *guess;
    r.ts = j.value("ts", std::int64_t{0});
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed session record: ") + e.what(), line);
  }
  return r;
}

std::vector<EvalRecord> read_session_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open session file " + path.string());
  std::vector<EvalRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": malformed JSON: " + e.what(), line_no);
    }
    if (!j.is_object()) throw DataError(path.string() + ": record is not an object", line_no);
    if (j.contains("status")) continue;
    out.push_back(record_from_json(j, line_no));
  }
  return out;
}

void append_line(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to session file " + path.string());
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw DataError("write to session file " + path.string() + " failed");
}

}  // namespace

BlindSessionOutcome run_blind_eval(const std::vector<EvalItem>& items, std::istream& in, std::ostream& out,
                                   const BlindSessionOptions& options) {
  if (items.empty()) throw UsageError("empty session");
  if (options.evaluator.empty()) throw UsageError("evaluator id must not be empty");
  BlindSessionOutcome outcome;

  std::set<std::string> answered;
  if (options.resume && std::filesystem::exists(options.session_file)) {
    for (const auto& r : read_session_file(options.session_file)) {
      if (r.evaluator == options.evaluator) answered.insert(item_key(r.joke_id, r.source));
    }
  }

  const std::size_t total = items.size();
  std::size_t index = 0;
  for (const auto& item : items) {
    ++index;
    if (answered.count(item_key(item.joke_id, item.source))) {
      ++outcome.skipped;
      continue;
    }
    out << "\n[" << index << "/" << total << "] " << item.text << "\n";
    std::optional<Source> guess;
    while (!guess) {
      out << "Written by a (h)uman or a (c)omputer? " << std::flush;
      std::string line;
      if (!std::getline(in, line)) break;
      guess = parse_source(trim_lower(line));
      if (!guess) out << "Please answer h or c.\n";
    }
    if (!guess) {
      outcome.interrupted = true;
      append_line(options.session_file, {{"status", "interrupted"},
                                         {"evaluator", options.evaluator},
                                         {"answered", outcome.skipped + outcome.records.size()},
                                         {"total", total},
                                         {"resumable", true},
                                         {"ts", options.clock()}});
      out << "\nSession interrupted; rerun with --resume to continue.\n";
      return outcome;
    }
    EvalRecord record{options.evaluator, item.joke_id, item.source, *guess, options.clock()};
    append_line(options.session_file, record.to_json());
    outcome.records.push_back(std::move(record));
  }

  std::size_t correct = 0;
  for (const auto& r : outcome.records) correct += r.guess == r.source;
  out << "\nSession complete. " << correct << " of " << outcome.records.size()
      << " answers in this run matched the true source.\n";
  return outcome;
}

std::vector<EvalRecord> read_sessions(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("no such session path " + path.string());
  if (!std::filesystem::is_directory(path)) return read_session_file(path);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalRecord> out;
  for (const auto& f : files) {
    auto records = read_session_file(f);
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

namespace {

int index_of(Source s) { return s == Source::kComputer ? 0 : 1; }

}  // namespace

void ConfusionMatrix::add(Source actual, Source predicted) { ++counts[index_of(actual)][index_of(predicted)]; }

std::size_t ConfusionMatrix::at(Source actual, Source predicted) const {
  return counts[index_of(actual)][index_of(predicted)];
}

std::size_t ConfusionMatrix::total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }

EvalReport report(const ConfusionMatrix& m) {
  EvalReport r;
  r.matrix = m;
  auto ratio = [](std::size_t num, std::size_t den, bool& defined) {
    defined = den > 0;
    return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  const auto cc = m.counts[0][0], ch = m.counts[0][1], hc = m.counts[1][0], hh = m.counts[1][1];
  r.computer.precision = ratio(cc, cc + hc, r.computer.precision_defined);
  r.computer.recall = ratio(cc, cc + ch, r.computer.recall_defined);
  r.human.precision = ratio(hh, hh + ch, r.human.precision_defined);
  r.human.recall = ratio(hh, hh + hc, r.human.recall_defined);
  bool accuracy_defined = true;
  r.accuracy = ratio(cc + hh, m.total(), accuracy_defined);
  for (const auto& [name, cls] : {std::pair{"computer", r.computer}, std::pair{"human", r.human}}) {
    if (!cls.precision_defined) r.notes.push_back(std::string(name) + " precision undefined (no predictions); reported as 0");
    if (!cls.recall_defined) r.notes.push_back(std::string(name) + " recall undefined (no actual items); reported as 0");
  }
  return r;
}

EvalReport report(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw UsageError("report needs at least one session record");
  ConfusionMatrix m;
  for (const auto& rec : records) m.add(rec.source, rec.guess);
  return report(m);
}

void check_reference(EvalReport& r, std::optional<double> reference_precision,
                     std::optional<double> reference_recall) {
  const std::pair<const char*, double> metrics[] = {{"computer precision", r.computer.precision},
                                                    {"computer recall", r.computer.recall},
                                                    {"human precision", r.human.precision},
                                                    {"human recall", r.human.recall}};
  auto rounded = [](double v) { return std::round(v * 10000.0) / 10000.0; };
  auto check = [&](const char* label, std::optional<double> ref) {
    if (!ref) return;
    const char* closest = metrics[0].first;
    double closest_value = metrics[0].second;
    for (const auto& [name, value] : metrics) {
      if (std::abs(rounded(value) - *ref) < 5e-9) return;
      if (std::abs(value - *ref) < std::abs(closest_value - *ref)) {
        closest = name;
        closest_value = value;
      }
    }
    std::ostringstream note;
    note << std::fixed << std::setprecision(4) << "reference " << label << ' ' << *ref
         << " matches no per-class metric; closest is " << closest << ' ' << closest_value;
    r.notes.push_back(note.str());
  };
  check("precision", reference_precision);
  check("recall", reference_recall);
}

json EvalReport::to_json() const {
  auto cls = [](const ClassMetrics& c) {
    return json{{"precision", c.precision},
                {"recall", c.recall},
                {"precision_defined", c.precision_defined},
                {"recall_defined", c.recall_defined}};
  };
  return {{"confusion_matrix",
           {{"actual_computer", {{"predicted_computer", matrix.counts[0][0]}, {"predicted_human", matrix.counts[0][1]}}},
            {"actual_human", {{"predicted_computer", matrix.counts[1][0]}, {"predicted_human", matrix.counts[1][1]}}}}},
          {"total", matrix.total()},
          {"computer", cls(computer)},
          {"human", cls(human)},
          {"accuracy", accuracy},
          {"notes", notes}};
}

std::string EvalReport::table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "                   predicted computer  predicted human\n";
  out << "actual computer    " << std::setw(18) << matrix.counts[0][0] << "  " << std::setw(15) << matrix.counts[0][1]
      << "\n";
  out << "actual human       " << std::setw(18) << matrix.counts[1][0] << "  " << std::setw(15) << matrix.counts[1][1]
      << "\n\n";
  out << "class      precision  recall\n";
  out << "computer   " << std::setw(9) << computer.precision << "  " << std::setw(6) << computer.recall << "\n";
  out << "human      " << std::setw(9) << human.precision << "  " << std::setw(6) << human.recall << "\n";
  out << "accuracy   " << std::setw(9) << accuracy << "\n";
  for (const auto& n : notes) out << "note: " << n << "\n";
  return out.str();
}

}  // namespace humor
