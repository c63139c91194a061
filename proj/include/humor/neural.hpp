#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "humor/corpus.hpp"
#include "json.hpp"

namespace humor {

class Rng;

// Token <-> index map. Indices 0..2 are reserved for <unk>, </s> and the <s>
// padding token.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kEos = 1;
  static constexpr int kPad = 2;
  static constexpr int kReserved = 3;

  Vocabulary();

  // Most frequent tokens first, ties in lexicographic order. `max_size`
  // counts the reserved entries; 0 means unlimited.
  static Vocabulary build(const std::vector<TokenSeq>& corpus, std::size_t max_size = 0,
                          std::size_t min_count = 1);
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int index(const std::string& token) const;
  const std::string& token(int index) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct NeuralConfig {
  int vocab_size = 0;  // filled from the vocabulary when 0
  int embed_dim = 32;
  int hidden_dim = 64;
  double dropout_rate = 0.2;
  int sequence_length = 4;
  std::uint64_t seed = 0;
  double learning_rate = 0.5;
  int epochs = 20;
  int batch_size = 32;
  double clip_norm = 5.0;

  // Throws UsageError on zero dimensions or a dropout rate outside [0, 1).
  void validate() const;
  static NeuralConfig from_json(const nlohmann::json& j);
  static NeuralConfig from_json(const nlohmann::json& j, NeuralConfig base);
  nlohmann::json to_json() const;
};

// `inputs` holds sequence_length token indices; `target` is the next token.
struct Window {
  std::vector<int> inputs;
  int target = 0;
};

// Every next-token window of each sequence, left-padded with <s> and closed
// with </s>.
std::vector<Window> make_windows(const std::vector<TokenSeq>& corpus, const Vocabulary& vocab,
                                 int sequence_length);

struct Degeneration {
  int period = 0;   // cycle length in tokens
  int repeats = 0;  // consecutive copies at the end of the output
  int span = 0;     // period * repeats, 0 when no cycle repeats
};

// Longest trailing block of at least two identical consecutive cycles; ties
// go to the shorter period.
Degeneration trailing_cycle(const std::vector<std::string>& tokens);

// Embedding -> LSTM -> dropout -> LSTM -> dropout -> tanh dense -> dense ->
// softmax, predicting the token that follows a fixed-length window.
class NeuralLM {
 public:
  NeuralLM(const NeuralConfig& config, Vocabulary vocab);

  const NeuralConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }

  // All parameters in one flat vector.
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& parameters() { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

  Eigen::Map<const Eigen::MatrixXd> embedding() const;

  // Mean cross-entropy over `batch`. Dropout is active only when `dropout_rng`
  // is given. The gradient is written when `grad` is non-null.
  double loss(const std::vector<Window>& batch, Eigen::VectorXd* grad = nullptr,
              Rng* dropout_rng = nullptr) const;

  // Next-token probabilities for one window in eval mode.
  Eigen::VectorXd predict(const std::vector<int>& inputs) const;

  // Per-epoch mean training loss. Throws TrainingError on a non-finite loss.
  std::vector<double> train(const std::vector<Window>& windows);

  struct Generation {
    std::vector<std::string> tokens;  // seed followed by generated tokens
    Degeneration degeneration;
  };
  // Greedy when temperature is 0, otherwise temperature sampling.
  Generation generate(const std::vector<std::string>& seed, int max_tokens, std::uint64_t rng_seed,
                      double temperature) const;

  nlohmann::json to_json() const;
  static NeuralLM from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NeuralLM load(const std::filesystem::path& path);

 private:
  struct Layout;
  const Layout& layout() const;

  NeuralConfig config_;
  Vocabulary vocab_;
  Eigen::VectorXd params_;
  std::shared_ptr<const Layout> layout_;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  int coordinates = 256;
  std::uint64_t seed = 0;
  // Applied to the analytic gradient before comparison; used to confirm the
  // check catches a wrong gradient.
  std::function<void(Eigen::VectorXd&)> perturb;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  int coordinates = 0;
};

// Central differences on randomly chosen coordinates, eval mode.
// Relative error is |a - n| / max(|a|, |n|, 1e-12).
GradCheckResult grad_check(NeuralLM& model, const std::vector<Window>& batch,
                           const GradCheckOptions& options = {});

void write_loss_history(const std::vector<double>& history, const std::filesystem::path& path);

}  // namespace humor
