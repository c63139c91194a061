#include "humor/infill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "httplib.h"
#include "humor/rng.hpp"
#include "humor/utf8.hpp"

namespace humor {

using nlohmann::json;

void InfillRequest::validate() const {
  if (top_k < 1) throw UsageError("top_k must be at least 1");
  std::vector<std::size_t> sentinels;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == kMaskToken) sentinels.push_back(i);
  }
  if (sentinels != mask_positions) {
    throw UsageError("mask_positions must list exactly the sentinel positions in ascending order");
  }
}

json InfillRequest::to_wire() const {
  json forbid_json = json::object();
  for (std::size_t pos : mask_positions) {
    const auto it = forbid.find(pos);
    forbid_json[std::to_string(pos)] =
        it == forbid.end() ? std::vector<std::string>{} : std::vector<std::string>(it->second.begin(), it->second.end());
  }
  return {{"tokens", tokens}, {"mask_positions", mask_positions}, {"top_k", top_k}, {"forbid", forbid_json}};
}

namespace {

bool is_forbidden(const InfillRequest& req, std::size_t pos, const std::string& token) {
  const auto it = req.forbid.find(pos);
  return it != req.forbid.end() && it->second.count(utf8::to_lower(token));
}

bool looks_like_sentinel(const std::string& token) {
  return token.find(kMaskToken) != std::string::npos ||
         (token.size() >= 3 && token.front() == '[' && token.back() == ']');
}

std::vector<Candidate> top_candidates(const std::map<std::string, std::size_t>& pool, std::size_t total,
                                      const InfillRequest& req, std::size_t pos) {
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [tok, c] : pool) {
    if (!is_forbidden(req, pos, tok)) ranked.emplace_back(tok, c);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Candidate> out;
  for (std::size_t k = 0; k < ranked.size() && k < static_cast<std::size_t>(req.top_k); ++k) {
    out.push_back({ranked[k].first, static_cast<double>(ranked[k].second) / static_cast<double>(total)});
  }
  return out;
}

}  // namespace

PosVocabulary build_pos_vocabulary(const std::vector<AnnotatedJoke>& docs) {
  PosVocabulary vocab;
  for (const auto& doc : docs) {
    for (const auto& sentence : doc.sentences) {
      for (const auto& tok : sentence) {
        if (tok.upos == Upos::kPunct || tok.upos == Upos::kSym || utf8::is_all_punct(tok.surface)) continue;
        const std::string lowered = utf8::to_lower(tok.surface);
        if (looks_like_sentinel(lowered) || looks_like_sentinel(tok.surface)) continue;
        ++vocab[tok.upos][lowered];
      }
    }
  }
  return vocab;
}

BaselineInfiller::BaselineInfiller(PosVocabulary vocab) : vocab_(std::move(vocab)) {
  for (const auto& [upos, bucket] : vocab_) {
    for (const auto& [tok, c] : bucket) all_[tok] += c;
  }
  if (all_.empty()) throw UsageError("baseline infiller needs a non-empty vocabulary");
}

InfillResult BaselineInfiller::infill(const InfillRequest& req, std::uint64_t seed) const {
  req.validate();
  InfillResult result;
  result.infiller_id = id();
  result.filled_tokens = req.tokens;
  Rng rng(seed);
  static const std::map<std::string, std::size_t> kEmpty;
  for (std::size_t pos : req.mask_positions) {
    const auto hint = req.pos_hints.find(pos);
    const auto bucket_it = hint == req.pos_hints.end() ? vocab_.end() : vocab_.find(hint->second);
    const auto& bucket = bucket_it == vocab_.end() ? kEmpty : bucket_it->second;

    const std::map<std::string, std::size_t>* pool = &bucket;
    std::size_t allowed = 0;
    for (const auto& [tok, c] : bucket) {
      if (!is_forbidden(req, pos, tok)) allowed += c;
    }
    if (allowed == 0) {
      pool = &all_;
      for (const auto& [tok, c] : all_) {
        if (!is_forbidden(req, pos, tok)) allowed += c;
      }
    }
    if (allowed == 0) throw UsageError("every vocabulary token is forbidden at mask " + std::to_string(pos));

    std::uint64_t r = rng.below(allowed);
    for (const auto& [tok, c] : *pool) {
      if (is_forbidden(req, pos, tok)) continue;
      if (r < c) {
        result.filled_tokens[pos] = tok;
        break;
      }
      r -= c;
    }
    result.candidates[pos] = top_candidates(*pool, allowed, req, pos);
  }
  return result;
}

RemoteInfiller::RemoteInfiller(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  const auto scheme = endpoint_.find("://");
  if (scheme == std::string::npos || endpoint_.substr(0, scheme) != "http") {
    throw UsageError("infill endpoint must be an http:// URL, got '" + endpoint_ + "'");
  }
  const auto slash = endpoint_.find('/', scheme + 3);
  host_ = endpoint_.substr(0, slash);
  base_path_ = slash == std::string::npos ? "" : endpoint_.substr(slash);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (host_.size() <= scheme + 3) throw UsageError("infill endpoint has no host: '" + endpoint_ + "'");
}

std::optional<std::string> RemoteInfiller::default_endpoint() {
  const char* value = std::getenv("HUMOR_MLM_URL");
  if (!value || !*value) return std::nullopt;
  return std::string(value);
}

std::map<std::size_t, std::vector<Candidate>> parse_infill_response(const std::string& body,
                                                                    const InfillRequest& req,
                                                                    const std::string& endpoint) {
  const std::optional<std::size_t> first =
      req.mask_positions.empty() ? std::nullopt : std::optional<std::size_t>(req.mask_positions.front());
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw InfillError(std::string("malformed JSON response: ") + e.what(), endpoint, first);
  }
  if (!j.is_object() || !j.contains("candidates") || !j["candidates"].is_object()) {
    throw InfillError("response lacks a 'candidates' object", endpoint, first);
  }
  std::map<std::size_t, std::vector<Candidate>> out;
  for (std::size_t pos : req.mask_positions) {
    const auto key = std::to_string(pos);
    const auto& cands = j["candidates"];
    if (!cands.contains(key) || !cands[key].is_array()) {
      throw InfillError("no candidate list for position " + key, endpoint, pos);
    }
    const auto& list = cands[key];
    if (list.size() > static_cast<std::size_t>(req.top_k)) {
      throw InfillError("more than top_k candidates", endpoint, pos);
    }
    std::vector<Candidate> parsed;
    for (const auto& c : list) {
      if (!c.is_object() || !c.contains("token") || !c["token"].is_string() || !c.contains("score") ||
          !c["score"].is_number()) {
        throw InfillError("candidate must be {token: string, score: number}", endpoint, pos);
      }
      Candidate cand{c["token"].get<std::string>(), c["score"].get<double>()};
      if (cand.token.empty()) throw InfillError("empty candidate token", endpoint, pos);
      if (looks_like_sentinel(cand.token)) {
        throw InfillError("protocol violation: sentinel token '" + cand.token + "' in response", endpoint, pos);
      }
      if (!std::isfinite(cand.score)) throw InfillError("non-finite candidate score", endpoint, pos);
      if (!parsed.empty() && cand.score > parsed.back().score) {
        throw InfillError("candidate scores are not in descending order", endpoint, pos);
      }
      parsed.push_back(std::move(cand));
    }
    out[pos] = std::move(parsed);
  }
  return out;
}

InfillResult RemoteInfiller::infill(const InfillRequest& req, std::uint64_t) const {
  req.validate();
  InfillResult result;
  result.infiller_id = id();
  result.filled_tokens = req.tokens;

  httplib::Client client(host_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  for (std::size_t m = 0; m < req.mask_positions.size(); ++m) {
    const std::size_t pos = req.mask_positions[m];
    InfillRequest round = req;
    round.tokens = result.filled_tokens;
    round.mask_positions.assign(req.mask_positions.begin() + static_cast<std::ptrdiff_t>(m), req.mask_positions.end());
    const auto response = client.Post(base_path_ + "/infill", round.to_wire().dump(), "application/json");
    if (!response) {
      throw InfillError("request failed: " + httplib::to_string(response.error()), endpoint_, pos);
    }
    if (response->status != 200) {
      throw InfillError("HTTP " + std::to_string(response->status) + ": " + response->body, endpoint_, pos);
    }
    auto candidates = parse_infill_response(response->body, round, endpoint_);
    auto& list = candidates[pos];
    const auto chosen = std::find_if(list.begin(), list.end(),
                                     [&](const Candidate& c) { return !is_forbidden(req, pos, c.token); });
    if (chosen == list.end()) throw InfillError("no allowed candidate returned", endpoint_, pos);
    result.filled_tokens[pos] = chosen->token;
    result.candidates[pos] = std::move(list);
  }
  return result;
}

InfillResult ListInfiller::infill(const InfillRequest& req, std::uint64_t) const {
  req.validate();
  InfillResult result;
  result.infiller_id = id();
  result.filled_tokens = req.tokens;
  std::size_t next = 0;
  for (std::size_t pos : req.mask_positions) {
    while (next < words_.size() && is_forbidden(req, pos, words_[next])) ++next;
    if (next >= words_.size()) throw UsageError("word list exhausted at mask " + std::to_string(pos));
    result.filled_tokens[pos] = words_[next];
    result.candidates[pos] = {{words_[next], 1.0}};
    ++next;
  }
  return result;
}

InfillRequest make_request(const Template& tpl, int top_k) {
  InfillRequest req;
  req.top_k = top_k;
  for (std::size_t i = 0; i < tpl.tokens.size(); ++i) {
    const auto& t = tpl.tokens[i];
    if (t.masked) {
      req.tokens.emplace_back(kMaskToken);
      req.mask_positions.push_back(i);
      req.forbid[i].insert(utf8::to_lower(t.surface));
      req.pos_hints[i] = t.upos;
    } else {
      req.tokens.push_back(utf8::to_lower(t.surface));
    }
  }
  return req;
}

json HybridResult::to_json() const {
  return {{"joke_id", joke_id},
          {"original", original},
          {"template", template_string},
          {"generated", generated},
          {"diagnostics",
           {{"mask_count", mask_count}, {"mask_scores", mask_scores}, {"infiller", infiller_id}, {"no_op", no_op}}}};
}

HybridResult fill_template(const Template& tpl, const Infiller& infiller, std::uint64_t seed, int top_k) {
  HybridResult out;
  out.joke_id = tpl.joke_id;
  for (const auto& t : tpl.tokens) {
    if (!out.original.empty()) out.original.push_back(' ');
    out.original += t.surface;
  }
  out.template_string = render(tpl);
  const auto req = make_request(tpl, top_k);
  out.mask_count = req.mask_positions.size();
  for (std::size_t pos : req.mask_positions) out.mask_scores.push_back(tpl.tokens[pos].score);
  out.no_op = req.mask_positions.empty();
  out.infiller_id = infiller.id();
  const auto result = out.no_op ? InfillResult{req.tokens, {}, infiller.id()} : infiller.infill(req, seed);
  for (std::size_t pos : req.mask_positions) {
    const auto& filled = result.filled_tokens.at(pos);
    if (filled == kMaskToken || req.forbid.at(pos).count(utf8::to_lower(filled))) {
      throw InfillError("infiller returned a forbidden fill '" + filled + "'", infiller.id(), pos);
    }
  }
  for (const auto& t : result.filled_tokens) {
    if (!out.generated.empty()) out.generated.push_back(' ');
    out.generated += utf8::to_lower(t);
  }
  return out;
}

HybridResult hybrid_generate(const AnnotatedJoke& doc, const LexiconSet& lex, const WeightConfig& cfg,
                             const Infiller& infiller, std::uint64_t seed) {
  return fill_template(extract_template(doc, lex, cfg), infiller, seed);
}

}  // namespace humor
