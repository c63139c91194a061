#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "humor/annotate.hpp"
#include "humor/error.hpp"
#include "humor/lexicons.hpp"
#include "humor/template.hpp"
#include "json.hpp"

namespace humor {

inline constexpr const char* kMaskToken = "[MASK]";

struct InfillRequest {
  std::vector<std::string> tokens;  // kMaskToken at every mask position
  std::vector<std::size_t> mask_positions;
  int top_k = 5;
  // Disallowed fills per mask position, lowercase.
  std::map<std::size_t, std::set<std::string>> forbid;
  // Part of speech of the original token; local use only, never sent.
  std::map<std::size_t, Upos> pos_hints;

  // Throws UsageError unless mask_positions are ascending and are exactly the
  // sentinel positions, and top_k >= 1.
  void validate() const;
  nlohmann::json to_wire() const;
};

struct Candidate {
  std::string token;
  double score = 0.0;
};

struct InfillResult {
  std::vector<std::string> filled_tokens;
  std::map<std::size_t, std::vector<Candidate>> candidates;
  std::string infiller_id;
};

// Failure while talking to an infilling backend; names the endpoint and the
// mask being resolved.
class InfillError : public Error {
 public:
  InfillError(const std::string& message, std::string endpoint, std::optional<std::size_t> mask_index)
      : Error(endpoint + (mask_index ? " (mask " + std::to_string(*mask_index) + ")" : "") + ": " + message),
        endpoint_(std::move(endpoint)),
        mask_index_(mask_index) {}

  const std::string& endpoint() const { return endpoint_; }
  std::optional<std::size_t> mask_index() const { return mask_index_; }

 private:
  std::string endpoint_;
  std::optional<std::size_t> mask_index_;
};

class Infiller {
 public:
  virtual ~Infiller() = default;
  virtual std::string id() const = 0;
  // Resolves masks left to right; never returns a forbidden fill.
  virtual InfillResult infill(const InfillRequest& request, std::uint64_t seed) const = 0;
};

// Lowercased corpus tokens bucketed by part of speech, with counts.
using PosVocabulary = std::map<Upos, std::map<std::string, std::size_t>>;

PosVocabulary build_pos_vocabulary(const std::vector<AnnotatedJoke>& docs);

// Samples each fill from corpus tokens sharing the original token's part of
// speech, weighted by frequency. Falls back to the whole vocabulary when the
// bucket has nothing allowed.
class BaselineInfiller : public Infiller {
 public:
  // Throws UsageError when the vocabulary is empty.
  explicit BaselineInfiller(PosVocabulary vocab);

  std::string id() const override { return "baseline"; }
  InfillResult infill(const InfillRequest& request, std::uint64_t seed) const override;

 private:
  PosVocabulary vocab_;
  std::map<std::string, std::size_t> all_;
};

// Client for the HTTP infill protocol: POST {endpoint}/infill, one round trip
// per mask.
class RemoteInfiller : public Infiller {
 public:
  explicit RemoteInfiller(std::string endpoint,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

  std::string id() const override { return "remote:" + endpoint_; }
  InfillResult infill(const InfillRequest& request, std::uint64_t seed) const override;

  // Value of HUMOR_MLM_URL, if set and non-empty.
  static std::optional<std::string> default_endpoint();

 private:
  std::string endpoint_;
  std::string host_;  // scheme://host:port
  std::string base_path_;
  std::chrono::milliseconds timeout_;
};

// Fills masks left to right with a fixed word list, skipping forbidden words.
class ListInfiller : public Infiller {
 public:
  explicit ListInfiller(std::vector<std::string> words) : words_(std::move(words)) {}
  std::string id() const override { return "list"; }
  InfillResult infill(const InfillRequest& request, std::uint64_t seed) const override;

 private:
  std::vector<std::string> words_;
};

// Builds the request for a template: lowercased tokens, sentinels at masks,
// the original surface forbidden at each mask.
InfillRequest make_request(const Template& tpl, int top_k = 5);

// Checks a response body against the protocol for the given request. Throws
// InfillError naming `endpoint`.
std::map<std::size_t, std::vector<Candidate>> parse_infill_response(const std::string& body,
                                                                    const InfillRequest& request,
                                                                    const std::string& endpoint);

struct HybridResult {
  std::string joke_id;
  std::string original;
  std::string template_string;
  std::string generated;
  std::size_t mask_count = 0;
  std::vector<double> mask_scores;
  std::string infiller_id;
  bool no_op = false;  // nothing was masked

  nlohmann::json to_json() const;
};

// Masks already chosen: render, infill and join.
HybridResult fill_template(const Template& tpl, const Infiller& infiller, std::uint64_t seed, int top_k = 5);

HybridResult hybrid_generate(const AnnotatedJoke& doc, const LexiconSet& lex, const WeightConfig& cfg,
                             const Infiller& infiller, std::uint64_t seed);

}  // namespace humor
