#include "humor/markov.hpp"

#include <fstream>

#include "humor/error.hpp"
#include "humor/rng.hpp"

namespace humor {

using nlohmann::json;

namespace {

constexpr int kMarkovFormatVersion = 1;

}  // namespace

std::string escape_token(const std::string& token) {
  if (token == kBos || token == kEos || (!token.empty() && token.front() == '\\')) return "\\" + token;
  return token;
}

std::string unescape_token(const std::string& token) {
  if (!token.empty() && token.front() == '\\') return token.substr(1);
  return token;
}

NGramModel::NGramModel(TokenLevel level, int n) : level_(level), n_(n) {
  if (n < 2) throw UsageError("n-gram size must be at least 2, got " + std::to_string(n));
}

void NGramModel::add_sequence(const std::vector<std::string>& tokens) {
  std::vector<std::string> padded(static_cast<std::size_t>(n_ - 1), kBos);
  for (const auto& t : tokens) {
    padded.push_back(escape_token(t));
    vocab_.insert(padded.back());
  }
  padded.push_back(kEos);
  vocab_.insert(kEos);
  const auto order = static_cast<std::size_t>(n_ - 1);
  for (std::size_t i = 0; i + order < padded.size(); ++i) {
    Context ctx(padded.begin() + static_cast<std::ptrdiff_t>(i),
                padded.begin() + static_cast<std::ptrdiff_t>(i + order));
    ++counts_[std::move(ctx)][padded[i + order]];
  }
}

std::map<std::string, double> NGramModel::next_distribution(const Context& context) const {
  if (context.size() != static_cast<std::size_t>(n_ - 1)) {
    throw UsageError("context has length " + std::to_string(context.size()) + ", expected " +
                     std::to_string(n_ - 1));
  }
  std::map<std::string, double> out;
  const auto it = counts_.find(context);
  if (it == counts_.end()) return out;
  std::uint64_t total = 0;
  for (const auto& [tok, c] : it->second) total += c;
  for (const auto& [tok, c] : it->second) {
    out[tok] = static_cast<double>(c) / static_cast<double>(total);
  }
  return out;
}

json NGramModel::to_json() const {
  json contexts = json::array();
  for (const auto& [ctx, succ] : counts_) {
    json s = json::object();
    for (const auto& [tok, c] : succ) s[tok] = c;
    contexts.push_back({{"ctx", ctx}, {"succ", std::move(s)}});
  }
  return {{"format", "humor-markov"},
          {"version", kMarkovFormatVersion},
          {"level", std::string(to_string(level_))},
          {"n", n_},
          {"vocab", vocab_},
          {"contexts", std::move(contexts)}};
}

NGramModel NGramModel::from_json(const json& j) {
  try {
    if (j.value("format", "") != "humor-markov") throw DataError("not a markov model file");
    const int version = j.at("version").get<int>();
    if (version != kMarkovFormatVersion) {
      throw DataError("unsupported markov model version " + std::to_string(version));
    }
    NGramModel model(parse_token_level(j.at("level").get<std::string>()), j.at("n").get<int>());
    model.vocab_ = j.at("vocab").get<std::set<std::string>>();
    for (const auto& entry : j.at("contexts")) {
      auto ctx = entry.at("ctx").get<Context>();
      if (ctx.size() != static_cast<std::size_t>(model.n_ - 1)) {
        throw DataError("context of wrong length in markov model file");
      }
      auto& succ = model.counts_[std::move(ctx)];
      for (const auto& [tok, c] : entry.at("succ").items()) {
        const auto count = c.get<std::uint64_t>();
        if (count == 0) throw DataError("zero count in markov model file");
        succ[tok] = count;
      }
      if (succ.empty()) throw DataError("context without successors in markov model file");
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed markov model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed markov model: ") + e.what());
  }
}

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write markov model " + path.string());
  out << to_json().dump() << '\n';
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open markov model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed markov model: ") + e.what());
  }
  return from_json(j);
}

NGramModel fit_ngram(const std::vector<TokenSeq>& corpus, TokenLevel level, int n) {
  NGramModel model(level, n);
  if (corpus.empty()) throw UsageError("cannot fit an n-gram model on an empty corpus");
  for (const auto& seq : corpus) model.add_sequence(seq.tokens);
  return model;
}

namespace {

// Successor counts for the last `length` tokens of `context`, summed over all
// stored contexts that end with them.
SuccessorCounts backoff_counts(const NGramModel& model, const Context& context, std::size_t length) {
  SuccessorCounts merged;
  const std::size_t offset = context.size() - length;
  for (const auto& [ctx, succ] : model.counts()) {
    if (!std::equal(ctx.begin() + static_cast<std::ptrdiff_t>(offset), ctx.end(),
                    context.begin() + static_cast<std::ptrdiff_t>(offset))) {
      continue;
    }
    for (const auto& [tok, c] : succ) merged[tok] += c;
  }
  return merged;
}

const std::string* sample(const SuccessorCounts& succ, Rng& rng) {
  std::uint64_t total = 0;
  for (const auto& [tok, c] : succ) total += c;
  if (total == 0) return nullptr;
  std::uint64_t r = rng.below(total);
  for (const auto& [tok, c] : succ) {
    if (r < c) return &tok;
    r -= c;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> generate(const NGramModel& model, const std::vector<std::string>& seed,
                                  const MarkovGenerateOptions& options) {
  if (options.max_tokens < 1) throw UsageError("max_tokens must be at least 1");
  const auto order = static_cast<std::size_t>(model.n() - 1);
  Context context(order > seed.size() ? order - seed.size() : 0, kBos);
  for (std::size_t i = seed.size() > order ? seed.size() - order : 0; i < seed.size(); ++i) {
    context.push_back(escape_token(seed[i]));
  }

  std::vector<std::string> out = seed;
  Rng rng(options.seed);
  const auto& counts = model.counts();
  for (int step = 0; step < options.max_tokens; ++step) {
    const std::string* next = nullptr;
    SuccessorCounts backed_off;
    if (const auto it = counts.find(context); it != counts.end()) {
      next = sample(it->second, rng);
    } else if (options.backoff) {
      for (std::size_t length = order - 1;; --length) {
        if (length == 0) {
          for (const auto& tok : model.vocab()) backed_off[tok] = 1;
        } else {
          backed_off = backoff_counts(model, context, length);
        }
        if (!backed_off.empty() || length == 0) break;
      }
      next = sample(backed_off, rng);
    }
    if (!next || *next == kEos) break;
    out.push_back(unescape_token(*next));
    context.erase(context.begin());
    context.push_back(*next);
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, TokenLevel level) {
  std::string out;
  for (const auto& t : tokens) {
    if (level == TokenLevel::kWord && !out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace humor
