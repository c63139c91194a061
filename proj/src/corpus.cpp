#include "humor/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "humor/csv.hpp"
#include "humor/error.hpp"
#include "humor/utf8.hpp"

namespace humor {

using nlohmann::json;

std::string_view to_string(SplitRule rule) {
  switch (rule) {
    case SplitRule::kEllipsis: return "ellipsis";
    case SplitRule::kQuestion: return "question";
    case SplitRule::kSentence: return "sentence";
    case SplitRule::kNone: return "none";
  }
  return "none";
}

std::string_view to_string(TokenLevel level) {
  return level == TokenLevel::kWord ? "word" : "char";
}

TokenLevel parse_token_level(std::string_view name) {
  if (name == "word") return TokenLevel::kWord;
  if (name == "char") return TokenLevel::kChar;
  throw UsageError("unknown token level '" + std::string(name) + "' (expected word|char)");
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  throw UsageError("unknown corpus format '" + std::string(name) + "' (expected jsonl|csv)");
}

namespace {

std::optional<int> parse_label(const json& value, std::size_t line) {
  if (value.is_null()) return std::nullopt;
  if (value.is_boolean()) return value.get<bool>() ? 1 : 0;
  if (value.is_number_integer()) {
    const auto v = value.get<long long>();
    if (v == 0 || v == 1) return static_cast<int>(v);
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s.empty()) return std::nullopt;
    if (s == "0" || s == "1") return s == "1" ? 1 : 0;
  }
  throw DataError("label must be 0 or 1", line);
}

// Assigns sequential ids to records that have none and rejects duplicates.
class IdAssigner {
 public:
  std::string assign(std::optional<std::string> explicit_id, std::size_t index, std::size_t line) {
    std::string id = explicit_id ? *explicit_id : std::to_string(index);
    if (id.empty()) throw DataError("empty id", line);
    if (!seen_.insert(id).second) throw DataError("duplicate id '" + id + "'", line);
    return id;
  }

 private:
  std::unordered_set<std::string> seen_;
};

}  // namespace

std::vector<Joke> read_jsonl_corpus(std::istream& in) {
  std::vector<Joke> jokes;
  IdAssigner ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw DataError("record is not a JSON object", line_no);
    const auto text_it = record.find("text");
    if (text_it == record.end() || !text_it->is_string()) {
      throw DataError("missing string field 'text'", line_no);
    }
    std::optional<std::string> explicit_id;
    if (const auto id_it = record.find("id"); id_it != record.end() && !id_it->is_null()) {
      if (id_it->is_string()) {
        explicit_id = id_it->get<std::string>();
      } else if (id_it->is_number_integer()) {
        explicit_id = std::to_string(id_it->get<long long>());
      } else {
        throw DataError("field 'id' must be a string", line_no);
      }
    }
    Joke joke;
    joke.id = ids.assign(explicit_id, jokes.size(), line_no);
    joke.text = text_it->get<std::string>();
    if (const auto label_it = record.find("label"); label_it != record.end()) {
      joke.label = parse_label(*label_it, line_no);
    }
    jokes.push_back(std::move(joke));
  }
  return jokes;
}

std::vector<Joke> read_csv_corpus(std::istream& in) {
  std::vector<Joke> jokes;
  std::vector<std::string> fields;
  CsvReader reader(in);
  if (!reader.next(fields)) return jokes;
  std::size_t record_line = reader.record_line();

  std::optional<std::size_t> id_col;
  std::optional<std::size_t> text_col;
  std::optional<std::size_t> label_col;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "id") id_col = i;
    if (fields[i] == "text") text_col = i;
    if (fields[i] == "label") label_col = i;
  }
  if (!text_col) throw DataError("CSV header has no 'text' column", record_line);
  const std::size_t width = fields.size();

  IdAssigner ids;
  while (reader.next(fields)) {
    record_line = reader.record_line();
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw DataError("expected " + std::to_string(width) + " fields, found " +
                          std::to_string(fields.size()),
                      record_line);
    }
    Joke joke;
    std::optional<std::string> explicit_id;
    if (id_col && !fields[*id_col].empty()) explicit_id = fields[*id_col];
    joke.id = ids.assign(explicit_id, jokes.size(), record_line);
    joke.text = fields[*text_col];
    if (label_col) joke.label = parse_label(json(fields[*label_col]), record_line);
    jokes.push_back(std::move(joke));
  }
  return jokes;
}

std::vector<Joke> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return format == CorpusFormat::kJsonl ? read_jsonl_corpus(in) : read_csv_corpus(in);
}

std::string clean_text(std::string_view raw) {
  std::string mapped;
  mapped.reserve(raw.size());
  for (char32_t cp : utf8::decode(raw)) {
    switch (cp) {
      case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x2032:
        mapped.push_back('\'');
        break;
      case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033: case 0x00AB: case 0x00BB:
        mapped.push_back('"');
        break;
      case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015: case 0x2212:
        mapped.push_back('-');
        break;
      case 0x2026:
        mapped += "...";
        break;
      case 0x200B: case 0x200C: case 0x200D: case 0xFEFF:
        break;
      default:
        if (utf8::is_space(cp)) {
          mapped.push_back(' ');
        } else {
          utf8::append(mapped, cp);
        }
    }
  }

  std::string collapsed;
  collapsed.reserve(mapped.size());
  for (char c : mapped) {
    if (c == ' ' && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed.push_back(c);
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();

  std::string_view view = collapsed;
  while (view.size() >= 2 && view.front() == '"' && view.back() == '"') {
    view.remove_prefix(1);
    view.remove_suffix(1);
    while (!view.empty() && view.front() == ' ') view.remove_prefix(1);
    while (!view.empty() && view.back() == ' ') view.remove_suffix(1);
  }
  if (view.empty()) throw DataError("content-free record (empty after cleaning)");
  return std::string(view);
}

namespace {

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')'; }

// Splits `text` after the terminator run ending at `end` (exclusive).
std::optional<SetupPunchline> split_after(std::string_view text, std::size_t end, SplitRule rule) {
  std::size_t rest = end;
  while (rest < text.size() && text[rest] == ' ') ++rest;
  if (rest >= text.size()) return std::nullopt;
  SetupPunchline out;
  out.setup = std::string(text.substr(0, end));
  out.separator = std::string(text.substr(end, rest - end));
  out.punchline = std::string(text.substr(rest));
  out.rule = rule;
  return out;
}

}  // namespace

SetupPunchline split_setup_punchline(std::string_view text) {
  constexpr std::string_view kEllipsis = " ... ";
  if (const auto pos = text.find(kEllipsis); pos != std::string_view::npos && pos > 0 &&
                                             pos + kEllipsis.size() < text.size()) {
    SetupPunchline out;
    out.setup = std::string(text.substr(0, pos));
    out.separator = std::string(kEllipsis);
    out.punchline = std::string(text.substr(pos + kEllipsis.size()));
    out.rule = SplitRule::kEllipsis;
    return out;
  }

  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '?') continue;
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '?' || text[end] == '!')) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;
    if (auto split = split_after(text, end, SplitRule::kQuestion)) return *split;
    i = end;
  }

  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '.' && text[i] != '!') continue;
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '!')) ++end;
    while (end < text.size() && is_closer(text[end])) ++end;
    if (end < text.size() && text[end] == ' ') {
      if (auto split = split_after(text, end, SplitRule::kSentence)) return *split;
    }
    i = end;
  }

  SetupPunchline none;
  none.setup = std::string(text);
  none.rule = SplitRule::kNone;
  return none;
}

std::vector<SpacedToken> tokenize_spaced(std::string_view text) {
  std::vector<SpacedToken> out;
  std::string current;
  auto flush = [&](bool space_after) {
    if (!current.empty()) {
      out.push_back({std::move(current), space_after});
      current.clear();
    }
  };
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_space(cp)) {
      flush(true);
      if (!out.empty()) out.back().space_after = true;
    } else if (utf8::is_word_char(cp)) {
      utf8::append(current, cp);
    } else {
      flush(false);
      std::string single;
      utf8::append(single, cp);
      out.push_back({std::move(single), false});
    }
  }
  flush(false);
  return out;
}

TokenSeq tokenize(std::string_view text, const TokenizeOptions& options) {
  TokenSeq seq;
  seq.level = options.level;
  seq.punct_mode = options.punct_mode;
  const bool drop = options.punct_mode == PunctMode::kDrop;
  auto emit = [&](std::string token) {
    if (token.empty()) return;
    if (drop && utf8::is_all_punct(token)) return;
    seq.tokens.push_back(options.lowercase ? utf8::to_lower(token) : std::move(token));
  };

  if (options.level == TokenLevel::kChar) {
    for (auto& ch : utf8::split_chars(text)) emit(std::move(ch));
    return seq;
  }

  std::string current;
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_word_char(cp)) {
      utf8::append(current, cp);
      continue;
    }
    emit(std::move(current));
    current.clear();
    if (utf8::is_space(cp)) continue;
    std::string single;
    utf8::append(single, cp);
    emit(std::move(single));
  }
  emit(std::move(current));
  return seq;
}

}  // namespace humor
