#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace humor {

enum class Source { kHuman, kComputer };

std::string_view to_string(Source source);
// Accepts "human"/"computer" and the single-letter answers "h"/"c".
std::optional<Source> parse_source(std::string_view text);

struct EvalItem {
  std::string joke_id;
  std::string text;
  Source source = Source::kHuman;
};

struct EvalRecord {
  std::string evaluator;
  std::string joke_id;
  Source source = Source::kHuman;
  Source guess = Source::kHuman;
  std::int64_t ts = 0;

  nlohmann::json to_json() const;
};

// Draws `n_items` without replacement; each draw first picks one of the
// non-exhausted pools uniformly. Throws UsageError on n_items == 0, an empty
// pool, or n_items beyond the combined pool.
std::vector<EvalItem> draw_items(const std::vector<EvalItem>& human, const std::vector<EvalItem>& generated,
                                 std::size_t n_items, std::uint64_t seed);

// Seconds since the epoch, or SOURCE_DATE_EPOCH when that is set.
std::int64_t current_timestamp();

struct BlindSessionOptions {
  std::string evaluator;
  std::filesystem::path session_file;  // append-only JSONL
  bool resume = false;
  std::function<std::int64_t()> clock = current_timestamp;
};

struct BlindSessionOutcome {
  std::vector<EvalRecord> records;  // answered during this run
  std::size_t skipped = 0;          // already answered in an earlier run
  bool interrupted = false;
};

// Presents items one at a time on `out`, reading h/c answers from `in`.
// Invalid answers re-prompt. Each answer is appended to the session file as
// soon as it is given; end of input appends a resumable status line.
BlindSessionOutcome run_blind_eval(const std::vector<EvalItem>& items, std::istream& in, std::ostream& out,
                                   const BlindSessionOptions& options);

// Reads session records from a JSONL file or every *.jsonl file in a
// directory. Status lines are skipped.
std::vector<EvalRecord> read_sessions(const std::filesystem::path& path);

struct ConfusionMatrix {
  // [actual][predicted], index 0 = computer, 1 = human.
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};

  void add(Source actual, Source predicted);
  std::size_t at(Source actual, Source predicted) const;
  std::size_t total() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
};

struct EvalReport {
  ConfusionMatrix matrix;
  ClassMetrics computer;
  ClassMetrics human;
  double accuracy = 0.0;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
  std::string table() const;
};

EvalReport report(const ConfusionMatrix& matrix);
EvalReport report(const std::vector<EvalRecord>& records);

// Adds a note when a reference value matches none of the four per-class
// metrics at four decimals.
void check_reference(EvalReport& report, std::optional<double> reference_precision,
                     std::optional<double> reference_recall);

}  // namespace humor
