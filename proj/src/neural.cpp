#include "humor/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "humor/error.hpp"
#include "humor/format.hpp"
#include "humor/rng.hpp"

namespace humor {

using nlohmann::json;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// --- vocabulary --------------------------------------------------------------

Vocabulary::Vocabulary() {
  add("<unk>");
  add("</s>");
  add("<s>");
}

void Vocabulary::add(const std::string& token) {
  if (index_.count(token)) throw DataError("duplicate vocabulary token '" + token + "'");
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<TokenSeq>& corpus, std::size_t max_size,
                             std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus) {
    for (const auto& t : seq.tokens) ++counts[t];
  }
  Vocabulary vocab;
  for (const auto& reserved : vocab.tokens_) counts.erase(reserved);
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [tok, c] : ranked) {
    if (c < min_count) break;
    if (max_size && vocab.size() >= max_size) break;
    vocab.add(tok);
  }
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < kReserved || tokens[kUnk] != "<unk>" || tokens[kEos] != "</s>" ||
      tokens[kPad] != "<s>") {
    throw DataError("vocabulary must start with <unk>, </s>, <s>");
  }
  Vocabulary vocab;
  for (std::size_t i = kReserved; i < tokens.size(); ++i) vocab.add(tokens[i]);
  return vocab;
}

int Vocabulary::index(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= tokens_.size()) {
    throw UsageError("token index " + std::to_string(index) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(index)];
}

// --- config --------------------------------------------------------------------

void NeuralConfig::validate() const {
  if (vocab_size < 1 || embed_dim < 1 || hidden_dim < 1 || sequence_length < 1 || batch_size < 1) {
    throw UsageError("neural dimensions, sequence_length and batch_size must be at least 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw UsageError("dropout_rate must lie in [0, 1), got " + format_double(dropout_rate));
  }
  if (epochs < 0) throw UsageError("epochs must be non-negative");
  if (!(learning_rate >= 0.0)) throw UsageError("learning_rate must be non-negative");
  if (!(clip_norm > 0.0)) throw UsageError("clip_norm must be positive");
}

NeuralConfig NeuralConfig::from_json(const json& j) { return from_json(j, NeuralConfig{}); }

NeuralConfig NeuralConfig::from_json(const json& j, NeuralConfig c) {
  if (!j.is_object()) throw UsageError("neural config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "vocab_size") c.vocab_size = value.get<int>();
    else if (key == "embed_dim") c.embed_dim = value.get<int>();
    else if (key == "hidden_dim") c.hidden_dim = value.get<int>();
    else if (key == "dropout_rate") c.dropout_rate = value.get<double>();
    else if (key == "sequence_length") c.sequence_length = value.get<int>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "batch_size") c.batch_size = value.get<int>();
    else if (key == "clip_norm") c.clip_norm = value.get<double>();
    else throw UsageError("unknown neural config key '" + key + "'");
  }
  return c;
}

json NeuralConfig::to_json() const {
  return {{"vocab_size", vocab_size},       {"embed_dim", embed_dim},
          {"hidden_dim", hidden_dim},       {"dropout_rate", dropout_rate},
          {"sequence_length", sequence_length}, {"seed", seed},
          {"learning_rate", learning_rate}, {"epochs", epochs},
          {"batch_size", batch_size},       {"clip_norm", clip_norm}};
}

std::vector<Window> make_windows(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab,
                                 int sequence_length) {
  if (sequence_length < 1) throw UsageError("sequence_length must be at least 1");
  std::vector<Window> windows;
  for (const auto& seq : corpus) {
    std::vector<int> ids(static_cast<std::size_t>(sequence_length), Vocabulary::kPad);
    for (const auto& t : seq.tokens) ids.push_back(vocab.index(t));
    ids.push_back(Vocabulary::kEos);
    for (std::size_t t = static_cast<std::size_t>(sequence_length); t < ids.size(); ++t) {
      Window w;
      w.inputs.assign(ids.begin() + static_cast<std::ptrdiff_t>(t) - sequence_length,
                      ids.begin() + static_cast<std::ptrdiff_t>(t));
      w.target = ids[t];
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

Degeneration trailing_cycle(const std::vector<std::string>& tokens) {
  Degeneration best;
  const std::size_t n = tokens.size();
  for (std::size_t period = 1; 2 * period <= n; ++period) {
    std::size_t repeats = 1;
    while ((repeats + 1) * period <= n) {
      const std::size_t start = n - (repeats + 1) * period;
      if (!std::equal(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                      tokens.begin() + static_cast<std::ptrdiff_t>(start + period),
                      tokens.end() - static_cast<std::ptrdiff_t>(period))) {
        break;
      }
      ++repeats;
    }
    const auto span = static_cast<int>(period * repeats);
    if (repeats >= 2 && span > best.span) {
      best = {static_cast<int>(period), static_cast<int>(repeats), span};
    }
  }
  return best;
}

// --- model ---------------------------------------------------------------------

struct NeuralLM::Layout {
  Index v, d, h;
  Index emb, w1, u1, b1, w2, u2, b2, a, a_bias, b, b_bias, total;

  Layout(Index vocab, Index embed, Index hidden) : v(vocab), d(embed), h(hidden) {
    Index off = 0;
    auto take = [&off](Index size) {
      const Index start = off;
      off += size;
      return start;
    };
    emb = take(v * d);
    w1 = take(4 * h * d);
    u1 = take(4 * h * h);
    b1 = take(4 * h);
    w2 = take(4 * h * h);
    u2 = take(4 * h * h);
    b2 = take(4 * h);
    a = take(h * h);
    a_bias = take(h);
    b = take(v * h);
    b_bias = take(v);
    total = off;
  }
};

namespace {

using CMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;
using CVMap = Eigen::Map<const VectorXd>;
using VMap = Eigen::Map<VectorXd>;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Activations of one LSTM layer over a window. Index 0 holds the zero state.
struct LstmTrace {
  std::vector<VectorXd> x, i, f, g, o, c, tanh_c, h;
};

void lstm_forward(const CMap& w, const CMap& u, const CVMap& b, const std::vector<VectorXd>& inputs,
                  LstmTrace& tr) {
  const Index hd = u.cols();
  const std::size_t steps = inputs.size();
  tr.x = inputs;
  for (auto* v : {&tr.i, &tr.f, &tr.g, &tr.o, &tr.c, &tr.tanh_c, &tr.h}) v->assign(steps + 1, VectorXd::Zero(hd));
  for (std::size_t t = 1; t <= steps; ++t) {
    const VectorXd z = w * inputs[t - 1] + u * tr.h[t - 1] + b;
    tr.i[t] = z.segment(0, hd).unaryExpr(&sigmoid);
    tr.f[t] = z.segment(hd, hd).unaryExpr(&sigmoid);
    tr.g[t] = z.segment(2 * hd, hd).array().tanh();
    tr.o[t] = z.segment(3 * hd, hd).unaryExpr(&sigmoid);
    tr.c[t] = tr.f[t].cwiseProduct(tr.c[t - 1]) + tr.i[t].cwiseProduct(tr.g[t]);
    tr.tanh_c[t] = tr.c[t].array().tanh();
    tr.h[t] = tr.o[t].cwiseProduct(tr.tanh_c[t]);
  }
}

// Backpropagates `dh_out[t]` (gradient w.r.t. each output h_t, 0-based) and
// returns the gradient w.r.t. each input.
std::vector<VectorXd> lstm_backward(const CMap& w, const CMap& u, const LstmTrace& tr,
                                    const std::vector<VectorXd>& dh_out, Map dw, Map du, VMap db) {
  const Index hd = u.cols();
  const std::size_t steps = tr.x.size();
  std::vector<VectorXd> dx(steps);
  VectorXd dh_next = VectorXd::Zero(hd);
  VectorXd dc_next = VectorXd::Zero(hd);
  VectorXd dz(4 * hd);
  for (std::size_t t = steps; t >= 1; --t) {
    const VectorXd dh = dh_out[t - 1] + dh_next;
    const auto& i = tr.i[t];
    const auto& f = tr.f[t];
    const auto& g = tr.g[t];
    const auto& o = tr.o[t];
    const auto& tc = tr.tanh_c[t];
    const VectorXd dc = dc_next.array() + dh.array() * o.array() * (1.0 - tc.array().square());
    dz.segment(0, hd) = dc.array() * g.array() * i.array() * (1.0 - i.array());
    dz.segment(hd, hd) = dc.array() * tr.c[t - 1].array() * f.array() * (1.0 - f.array());
    dz.segment(2 * hd, hd) = dc.array() * i.array() * (1.0 - g.array().square());
    dz.segment(3 * hd, hd) = dh.array() * tc.array() * o.array() * (1.0 - o.array());
    dw.noalias() += dz * tr.x[t - 1].transpose();
    du.noalias() += dz * tr.h[t - 1].transpose();
    db += dz;
    dx[t - 1] = w.transpose() * dz;
    dh_next = u.transpose() * dz;
    dc_next = dc.cwiseProduct(f);
  }
  return dx;
}

VectorXd dropout_mask(Index size, double rate, Rng* rng) {
  if (!rng || rate <= 0.0) return VectorXd::Ones(size);
  VectorXd mask(size);
  const double keep = 1.0 - rate;
  for (Index k = 0; k < size; ++k) mask(k) = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
  return mask;
}

void softmax_inplace(VectorXd& logits) {
  logits.array() -= logits.maxCoeff();
  logits = logits.array().exp();
  logits /= logits.sum();
}

}  // namespace

NeuralLM::NeuralLM(const NeuralConfig& config, Vocabulary vocab) : config_(config), vocab_(std::move(vocab)) {
  if (config_.vocab_size == 0) config_.vocab_size = static_cast<int>(vocab_.size());
  config_.validate();
  if (static_cast<std::size_t>(config_.vocab_size) != vocab_.size()) {
    throw UsageError("vocab_size " + std::to_string(config_.vocab_size) + " does not match vocabulary of " +
                     std::to_string(vocab_.size()));
  }
  layout_ = std::make_shared<const Layout>(config_.vocab_size, config_.embed_dim, config_.hidden_dim);
  params_.resize(layout_->total);
  Rng rng(config_.seed);
  for (Index k = 0; k < params_.size(); ++k) params_(k) = rng.uniform(-0.08, 0.08);
}

const NeuralLM::Layout& NeuralLM::layout() const { return *layout_; }

Eigen::Map<const MatrixXd> NeuralLM::embedding() const {
  const auto& l = layout();
  return CMap(params_.data() + l.emb, l.v, l.d);
}

double NeuralLM::loss(const std::vector<Window>& batch, VectorXd* grad, Rng* dropout_rng) const {
  if (batch.empty()) throw UsageError("loss needs a non-empty batch");
  const auto& l = layout();
  const double* p = params_.data();
  const CMap emb(p + l.emb, l.v, l.d);
  const CMap w1(p + l.w1, 4 * l.h, l.d), u1(p + l.u1, 4 * l.h, l.h);
  const CVMap b1(p + l.b1, 4 * l.h);
  const CMap w2(p + l.w2, 4 * l.h, l.h), u2(p + l.u2, 4 * l.h, l.h);
  const CVMap b2(p + l.b2, 4 * l.h);
  const CMap a(p + l.a, l.h, l.h);
  const CVMap a_bias(p + l.a_bias, l.h);
  const CMap b(p + l.b, l.v, l.h);
  const CVMap b_bias(p + l.b_bias, l.v);

  if (grad) grad->setZero(l.total);
  const double rate = config_.dropout_rate;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;

  LstmTrace t1, t2;
  for (const auto& win : batch) {
    if (win.inputs.empty()) throw UsageError("window has no inputs");
    if (win.target < 0 || win.target >= l.v) throw UsageError("target index out of range");
    std::vector<VectorXd> xs;
    xs.reserve(win.inputs.size());
    for (int id : win.inputs) {
      if (id < 0 || id >= l.v) throw UsageError("input index out of range");
      xs.emplace_back(emb.row(id).transpose());
    }
    lstm_forward(w1, u1, b1, xs, t1);

    std::vector<VectorXd> m1(xs.size()), h1(xs.size());
    for (std::size_t s = 0; s < xs.size(); ++s) {
      m1[s] = dropout_mask(l.h, rate, dropout_rng);
      h1[s] = t1.h[s + 1].cwiseProduct(m1[s]);
    }
    lstm_forward(w2, u2, b2, h1, t2);

    const VectorXd m2 = dropout_mask(l.h, rate, dropout_rng);
    const VectorXd top = t2.h.back().cwiseProduct(m2);
    const VectorXd dense = (a * top + a_bias).array().tanh();
    VectorXd probs = b * dense + b_bias;
    softmax_inplace(probs);
    total += -std::log(std::max(probs(win.target), 1e-300));
    if (!grad) continue;

    double* gp = grad->data();
    Map g_emb(gp + l.emb, l.v, l.d);
    Map g_w1(gp + l.w1, 4 * l.h, l.d), g_u1(gp + l.u1, 4 * l.h, l.h);
    VMap g_b1(gp + l.b1, 4 * l.h);
    Map g_w2(gp + l.w2, 4 * l.h, l.h), g_u2(gp + l.u2, 4 * l.h, l.h);
    VMap g_b2(gp + l.b2, 4 * l.h);
    Map g_a(gp + l.a, l.h, l.h);
    VMap g_a_bias(gp + l.a_bias, l.h);
    Map g_b(gp + l.b, l.v, l.h);
    VMap g_b_bias(gp + l.b_bias, l.v);

    VectorXd dlogits = probs * scale;
    dlogits(win.target) -= scale;
    g_b.noalias() += dlogits * dense.transpose();
    g_b_bias += dlogits;
    const VectorXd dz = (b.transpose() * dlogits).array() * (1.0 - dense.array().square());
    g_a.noalias() += dz * top.transpose();
    g_a_bias += dz;
    std::vector<VectorXd> dh2(xs.size(), VectorXd::Zero(l.h));
    dh2.back() = (a.transpose() * dz).cwiseProduct(m2);
    auto dh1 = lstm_backward(w2, u2, t2, dh2, g_w2, g_u2, g_b2);
    for (std::size_t s = 0; s < xs.size(); ++s) dh1[s] = dh1[s].cwiseProduct(m1[s]);
    const auto dxs = lstm_backward(w1, u1, t1, dh1, g_w1, g_u1, g_b1);
    for (std::size_t s = 0; s < xs.size(); ++s) g_emb.row(win.inputs[s]) += dxs[s].transpose();
  }
  return total * scale;
}

VectorXd NeuralLM::predict(const std::vector<int>& inputs) const {
  const auto& l = layout();
  const double* p = params_.data();
  const CMap emb(p + l.emb, l.v, l.d);
  std::vector<VectorXd> xs;
  for (int id : inputs) {
    if (id < 0 || id >= l.v) throw UsageError("input index out of range");
    xs.emplace_back(emb.row(id).transpose());
  }
  LstmTrace t1, t2;
  lstm_forward(CMap(p + l.w1, 4 * l.h, l.d), CMap(p + l.u1, 4 * l.h, l.h), CVMap(p + l.b1, 4 * l.h), xs, t1);
  const std::vector<VectorXd> h1(t1.h.begin() + 1, t1.h.end());
  lstm_forward(CMap(p + l.w2, 4 * l.h, l.h), CMap(p + l.u2, 4 * l.h, l.h), CVMap(p + l.b2, 4 * l.h), h1, t2);
  const VectorXd dense =
      (CMap(p + l.a, l.h, l.h) * t2.h.back() + CVMap(p + l.a_bias, l.h)).array().tanh();
  VectorXd probs = CMap(p + l.b, l.v, l.h) * dense + CVMap(p + l.b_bias, l.v);
  softmax_inplace(probs);
  return probs;
}

std::vector<double> NeuralLM::train(const std::vector<Window>& windows) {
  if (windows.empty()) throw UsageError("no training windows");
  for (const auto& w : windows) {
    if (static_cast<int>(w.inputs.size()) != config_.sequence_length) {
      throw UsageError("window length does not match sequence_length");
    }
  }
  // Separate streams keep the batch order independent of the dropout draws.
  Rng order_rng(config_.seed ^ 0x5eedULL);
  Rng dropout_rng(config_.seed ^ 0xd50ULL);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  VectorXd grad;
  std::vector<Window> batch;
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[order_rng.below(k)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(windows[order[k]]);
      const double batch_loss = loss(batch, &grad, &dropout_rng);
      if (!std::isfinite(batch_loss) || !grad.allFinite()) {
        throw TrainingError("non-finite loss", static_cast<std::size_t>(epoch));
      }
      epoch_loss += batch_loss * static_cast<double>(end - start);
      const double norm = grad.norm();
      if (norm > config_.clip_norm) grad *= config_.clip_norm / norm;
      params_ -= config_.learning_rate * grad;
    }
    history.push_back(epoch_loss / static_cast<double>(windows.size()));
  }
  return history;
}

NeuralLM::Generation NeuralLM::generate(const std::vector<std::string>& seed, int max_tokens,
                                        std::uint64_t rng_seed, double temperature) const {
  if (max_tokens < 0) throw UsageError("max_tokens must be non-negative");
  if (!(temperature >= 0.0)) throw UsageError("temperature must be non-negative");
  Generation out;
  out.tokens = seed;
  const auto length = static_cast<std::size_t>(config_.sequence_length);
  std::vector<int> ids(length, Vocabulary::kPad);
  for (const auto& t : seed) ids.push_back(vocab_.index(t));
  Rng rng(rng_seed);
  for (int step = 0; step < max_tokens; ++step) {
    const std::vector<int> window(ids.end() - static_cast<std::ptrdiff_t>(length), ids.end());
    VectorXd probs = predict(window);
    probs(Vocabulary::kPad) = 0.0;
    int next = 0;
    if (temperature == 0.0) {
      probs.maxCoeff(&next);
    } else {
      VectorXd logits = (probs.array().max(1e-300).log() / temperature).matrix();
      logits(Vocabulary::kPad) = -std::numeric_limits<double>::infinity();
      softmax_inplace(logits);
      double r = rng.uniform();
      next = static_cast<int>(logits.size()) - 1;
      for (Index k = 0; k < logits.size(); ++k) {
        if (r < logits(k)) {
          next = static_cast<int>(k);
          break;
        }
        r -= logits(k);
      }
    }
    if (next == Vocabulary::kEos) break;
    ids.push_back(next);
    out.tokens.push_back(vocab_.token(next));
  }
  out.degeneration = trailing_cycle(out.tokens);
  return out;
}

json NeuralLM::to_json() const {
  return {{"format", "humor-neural"},
          {"version", 1},
          {"config", config_.to_json()},
          {"vocab", vocab_.tokens()},
          {"parameters", std::vector<double>(params_.data(), params_.data() + params_.size())}};
}

NeuralLM NeuralLM::from_json(const json& j) {
  try {
    if (j.value("format", "") != "humor-neural") throw DataError("not a neural model file");
    if (j.at("version").get<int>() != 1) throw DataError("unsupported neural model version");
    const auto config = NeuralConfig::from_json(j.at("config"));
    NeuralLM model(config, Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>()));
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (static_cast<Index>(params.size()) != model.params_.size()) {
      throw DataError("parameter count does not match the model shape");
    }
    model.params_ = CVMap(params.data(), static_cast<Index>(params.size()));
    if (!model.params_.allFinite()) throw DataError("non-finite parameter in neural model file");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed neural model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed neural model: ") + e.what());
  }
}

void NeuralLM::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write neural model " + path.string());
  out << to_json().dump() << '\n';
}

NeuralLM NeuralLM::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open neural model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed neural model: ") + e.what());
  }
  return from_json(j);
}

GradCheckResult grad_check(NeuralLM& model, const std::vector<Window>& batch,
                           const GradCheckOptions& options) {
  VectorXd analytic;
  model.loss(batch, &analytic);
  if (options.perturb) options.perturb(analytic);

  auto& params = model.parameters();
  const auto total = static_cast<std::size_t>(params.size());
  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), 0);
  Rng rng(options.seed);
  const auto wanted = std::min<std::size_t>(total, static_cast<std::size_t>(std::max(options.coordinates, 0)));
  for (std::size_t k = 0; k < wanted; ++k) std::swap(coords[k], coords[k + rng.below(total - k)]);

  GradCheckResult result;
  for (std::size_t k = 0; k < wanted; ++k) {
    const auto idx = static_cast<Index>(coords[k]);
    const double saved = params(idx);
    params(idx) = saved + options.epsilon;
    const double plus = model.loss(batch);
    params(idx) = saved - options.epsilon;
    const double minus = model.loss(batch);
    params(idx) = saved;
    const double numeric = (plus - minus) / (2.0 * options.epsilon);
    const double a = analytic(idx);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    ++result.coordinates;
  }
  return result;
}

void write_loss_history(const std::vector<double>& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write loss history " + path.string());
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out << e + 1 << ',' << format_double(history[e], 12) << '\n';
  }
}

}  // namespace humor
