#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "humor/annotate.hpp"
#include "humor/lexicons.hpp"
#include "json.hpp"

namespace humor {

struct MaskStrategy {
  enum class Kind { kCount, kFraction, kThreshold };
  Kind kind = Kind::kCount;
  int count = 3;          // kCount: mask this many candidates
  double fraction = 0.5;  // kFraction: mask ceil(fraction * candidates)
  double threshold = 0.0; // kThreshold: mask candidates scoring below this

  static MaskStrategy parse(std::string_view spec);  // "count:3", "fraction:0.5", "threshold:20"
  std::string to_string() const;
};

struct WeightConfig {
  std::map<std::string, double> dep_weights{{"named_entity", 10.0}, {"nsubj", 5.0}, {"iobj", 4.0},
                                            {"dobj", 3.0},          {"adj_predicative", 2.0},
                                            {"verb", 1.0}};
  double scale = 2.5;
  MaskStrategy mask_strategy;

  // Throws UsageError on non-positive weights or scale.
  void validate() const;
  // Keys: dep_weights (partial overrides), scale, mask_strategy.
  static WeightConfig from_json(const nlohmann::json& j);
};

// w(category) * log10(R - rank + 1) * scale. Throws UsageError for unknown
// categories or ranks outside [1, R].
double score_token(const std::string& category, int rank, int max_rank, const WeightConfig& cfg);

// Category a token competes under, or nullopt when it is never masked by
// score. Entities win over their dependency label.
std::optional<std::string> token_category(const AnnotatedToken& token, const AnnotatedSentence& sentence);

// Adjectives modifying a noun through amod; these are always masked.
bool is_attributive_adjective(const AnnotatedToken& token, const AnnotatedSentence& sentence);

struct TemplateToken {
  std::string surface;
  Upos upos = Upos::kX;
  bool maskable = false;
  bool masked = false;
  double score = 0.0;
  std::string reason;  // category, "amod" for forced masks, empty otherwise
};

struct Template {
  std::string joke_id;
  std::vector<TemplateToken> tokens;
  // Set when no token qualified for score-based masking.
  bool no_candidates = false;

  std::vector<std::size_t> mask_positions() const;
  std::size_t mask_count() const { return mask_positions().size(); }
};

Template extract_template(const AnnotatedJoke& doc, const LexiconSet& lex, const WeightConfig& cfg = {});

// Lowercased tokens joined by single spaces, masks replaced by `placeholder`.
std::string render(const Template& tpl, std::string_view placeholder = "[MASK]");

nlohmann::json template_to_json(const Template& tpl);
Template template_from_json(const nlohmann::json& j);
std::vector<Template> read_templates(std::istream& in);

}  // namespace humor
