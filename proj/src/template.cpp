#include "humor/template.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>

#include "humor/error.hpp"
#include "humor/format.hpp"
#include "humor/utf8.hpp"

namespace humor {

using nlohmann::json;

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::string base_relation(std::string_view deprel) {
  return std::string(deprel.substr(0, deprel.find(':')));
}

bool is_nominal(Upos upos) {
  return upos == Upos::kNoun || upos == Upos::kPropn || upos == Upos::kPron || upos == Upos::kNum;
}

}  // namespace

MaskStrategy MaskStrategy::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("mask strategy must look like count:K, fraction:R or threshold:T");
  }
  const auto kind = spec.substr(0, colon);
  const auto value = spec.substr(colon + 1);
  MaskStrategy s;
  if (kind == "count") {
    const double k = parse_number(value, "mask count");
    if (k < 0 || k != std::floor(k)) throw UsageError("mask count must be a non-negative integer");
    s.kind = Kind::kCount;
    s.count = static_cast<int>(k);
  } else if (kind == "fraction") {
    s.kind = Kind::kFraction;
    s.fraction = parse_number(value, "mask fraction");
    if (s.fraction < 0.0 || s.fraction > 1.0) throw UsageError("mask fraction must lie in [0, 1]");
  } else if (kind == "threshold") {
    s.kind = Kind::kThreshold;
    s.threshold = parse_number(value, "mask threshold");
  } else {
    throw UsageError("unknown mask strategy '" + std::string(kind) + "'");
  }
  return s;
}

std::string MaskStrategy::to_string() const {
  switch (kind) {
    case Kind::kCount: return "count:" + std::to_string(count);
    case Kind::kFraction: return "fraction:" + format_double(fraction);
    case Kind::kThreshold: return "threshold:" + format_double(threshold);
  }
  return "";
}

void WeightConfig::validate() const {
  for (const auto& [name, w] : dep_weights) {
    if (!(w > 0.0)) throw UsageError("weight for '" + name + "' must be positive");
  }
  if (!(scale > 0.0)) throw UsageError("scale must be positive");
}

WeightConfig WeightConfig::from_json(const json& j) {
  WeightConfig cfg;
  if (!j.is_object()) throw UsageError("weight config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "dep_weights") {
      for (const auto& [name, w] : value.items()) {
        if (!cfg.dep_weights.count(name)) throw UsageError("unknown dependency category '" + name + "'");
        cfg.dep_weights[name] = w.get<double>();
      }
    } else if (key == "scale") {
      cfg.scale = value.get<double>();
    } else if (key == "mask_strategy") {
      cfg.mask_strategy = MaskStrategy::parse(value.get<std::string>());
    } else {
      throw UsageError("unknown weight config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double score_token(const std::string& category, int rank, int max_rank, const WeightConfig& cfg) {
  const auto it = cfg.dep_weights.find(category);
  if (it == cfg.dep_weights.end()) throw UsageError("unknown dependency category '" + category + "'");
  if (rank < 1 || rank > max_rank) {
    throw UsageError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(max_rank) + "]");
  }
  return it->second * std::log10(static_cast<double>(max_rank - rank + 1)) * cfg.scale;
}

bool is_attributive_adjective(const AnnotatedToken& token, const AnnotatedSentence& sentence) {
  if (token.upos != Upos::kAdj || base_relation(token.deprel) != "amod") return false;
  if (token.head < 1 || static_cast<std::size_t>(token.head) > sentence.size()) return false;
  const Upos head = sentence[static_cast<std::size_t>(token.head - 1)].upos;
  return head == Upos::kNoun || head == Upos::kPropn;
}

std::optional<std::string> token_category(const AnnotatedToken& token, const AnnotatedSentence& sentence) {
  if (token.upos == Upos::kPunct || token.upos == Upos::kSym || token.upos == Upos::kDet) return std::nullopt;
  if (token.is_entity) return "named_entity";
  if (token.upos == Upos::kAdj) {
    if (is_attributive_adjective(token, sentence)) return std::nullopt;
    return "adj_predicative";
  }
  if (is_nominal(token.upos)) {
    const auto rel = base_relation(token.deprel);
    if (rel == "nsubj" || rel == "nsubjpass" || rel == "csubj" || rel == "csubjpass") return "nsubj";
    if (rel == "iobj" || rel == "dative") return "iobj";
    if (rel == "obj" || rel == "dobj" || rel == "pobj" || rel == "obl") return "dobj";
    return std::nullopt;
  }
  if (token.upos == Upos::kVerb) return "verb";
  return std::nullopt;
}

std::vector<std::size_t> Template::mask_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].masked) out.push_back(i);
  }
  return out;
}

Template extract_template(const AnnotatedJoke& doc, const LexiconSet& lex, const WeightConfig& cfg) {
  cfg.validate();
  Template tpl;
  tpl.joke_id = doc.joke.id;
  const int max_rank = lex.max_rank();
  std::vector<std::size_t> candidates;
  for (const auto& sentence : doc.sentences) {
    for (const auto& token : sentence) {
      TemplateToken t;
      t.surface = token.surface;
      t.upos = token.upos;
      if (is_attributive_adjective(token, sentence)) {
        t.maskable = true;
        t.masked = true;
        t.reason = "amod";
      } else if (auto category = token_category(token, sentence)) {
        t.maskable = true;
        t.reason = *category;
        t.score = score_token(*category, lex.frequency_rank(token.surface), max_rank, cfg);
        candidates.push_back(tpl.tokens.size());
      }
      tpl.tokens.push_back(std::move(t));
    }
  }
  tpl.no_candidates = candidates.empty();

  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (tpl.tokens[a].score != tpl.tokens[b].score) return tpl.tokens[a].score < tpl.tokens[b].score;
    return a > b;
  });
  const auto& strategy = cfg.mask_strategy;
  std::size_t take = 0;
  switch (strategy.kind) {
    case MaskStrategy::Kind::kCount:
      take = std::min(candidates.size(), static_cast<std::size_t>(std::max(strategy.count, 0)));
      break;
    case MaskStrategy::Kind::kFraction:
      take = std::min(candidates.size(),
                      static_cast<std::size_t>(std::ceil(strategy.fraction * static_cast<double>(candidates.size()))));
      break;
    case MaskStrategy::Kind::kThreshold:
      while (take < candidates.size() && tpl.tokens[candidates[take]].score < strategy.threshold) ++take;
      break;
  }
  for (std::size_t k = 0; k < take; ++k) tpl.tokens[candidates[k]].masked = true;
  return tpl;
}

std::string render(const Template& tpl, std::string_view placeholder) {
  std::string out;
  for (const auto& t : tpl.tokens) {
    if (!out.empty()) out.push_back(' ');
    if (t.masked) {
      out += placeholder;
    } else {
      out += utf8::to_lower(t.surface);
    }
  }
  return out;
}

json template_to_json(const Template& tpl) {
  json tokens = json::array();
  for (const auto& t : tpl.tokens) {
    tokens.push_back({{"surface", t.surface},
                      {"upos", std::string(to_string(t.upos))},
                      {"masked", t.masked},
                      {"score", t.score},
                      {"reason", t.reason}});
  }
  return {{"joke_id", tpl.joke_id}, {"tokens", std::move(tokens)}, {"no_candidates", tpl.no_candidates}};
}

Template template_from_json(const json& j) {
  try {
    Template tpl;
    tpl.joke_id = j.at("joke_id").get<std::string>();
    for (const auto& tj : j.at("tokens")) {
      TemplateToken t;
      t.surface = tj.at("surface").get<std::string>();
      t.upos = tj.contains("upos") ? parse_upos(tj["upos"].get<std::string>()) : Upos::kX;
      t.masked = tj.at("masked").get<bool>();
      t.score = tj.value("score", 0.0);
      t.reason = tj.value("reason", "");
      t.maskable = t.masked || !t.reason.empty();
      if (t.surface.empty()) throw DataError("template token with empty surface");
      tpl.tokens.push_back(std::move(t));
    }
    tpl.no_candidates = j.value("no_candidates", false);
    return tpl;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed template record: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed template record: ") + e.what());
  }
}

std::vector<Template> read_templates(std::istream& in) {
  std::vector<Template> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(template_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
    } catch (const DataError& e) {
      throw DataError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace humor
