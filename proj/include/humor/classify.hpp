#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace humor {

struct Dataset {
  Eigen::MatrixXd x;  // n_docs x n_features
  std::vector<int> y;  // 0 / 1
  std::vector<std::string> feature_names;

  std::size_t size() const { return y.size(); }
  // Throws DataError on shape mismatch, non-binary labels or non-finite values.
  void validate() const;
};

enum class ModelKind { kLogReg, kGaussianNB, kSvm };
enum class KernelKind { kLinear, kRbf };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

struct TrainConfig {
  std::uint64_t seed = 0;
  int epochs = 500;
  double learning_rate = 0.1;
  double regularization = 1e-3;
  // RBF width; 0 picks 1 / (n_features * variance of the standardized inputs).
  double gamma = 0.0;
  KernelKind kernel = KernelKind::kRbf;
  // SMO box constraint and KKT tolerance.
  double c = 1.0;
  double tolerance = 1e-3;
  int max_passes = 10;

  static TrainConfig from_json(const nlohmann::json& j);
};

struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // strictly positive

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

struct LogisticParams {
  Eigen::VectorXd weights;
  double bias = 0.0;
  // Full-batch loss before each update, then the final loss.
  std::vector<double> loss_history;
};

struct GaussianNBParams {
  std::array<double, 2> priors{};
  Eigen::MatrixXd means;      // 2 x n_features
  Eigen::MatrixXd variances;  // 2 x n_features, smoothing included
  double epsilon = 0.0;
};

struct SvmParams {
  KernelKind kernel = KernelKind::kRbf;
  double gamma = 0.0;
  Eigen::VectorXd weights;             // linear kernel
  Eigen::MatrixXd support_vectors;     // rbf kernel, standardized rows
  Eigen::VectorXd coefficients;        // alpha_i * y_i per support vector
  double bias = 0.0;
};

struct Model {
  ModelKind kind = ModelKind::kLogReg;
  std::vector<std::string> feature_names;
  std::optional<Standardizer> standardizer;  // logreg and svm only
  std::variant<LogisticParams, GaussianNBParams, SvmParams> params;

  std::size_t feature_count() const { return feature_names.size(); }
};

Model train(ModelKind kind, const Dataset& data, const TrainConfig& config = {});

struct Prediction {
  int label = 0;
  // Class-1 probability (logreg, gnb) or signed margin (svm).
  double score = 0.0;
};

Prediction predict(const Model& model, const Eigen::VectorXd& x);
Prediction predict(const Model& model, const std::vector<double>& x);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);
Metrics evaluate(const Model& model, const Dataset& data);

// Mean log loss plus (l2 / 2) * |w|^2 and its gradient.
struct LogisticLoss {
  double loss = 0.0;
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
};

LogisticLoss logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const Eigen::VectorXd& weights, double bias, double l2);

// Class-balanced split: each class contributes round(fraction * count) rows to
// the test side.
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

nlohmann::json model_to_json(const Model& model);
// Refuses a model whose feature names differ from `expected_features` when given.
Model model_from_json(const nlohmann::json& j,
                      const std::vector<std::string>* expected_features = nullptr);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path,
                 const std::vector<std::string>* expected_features = nullptr);

// features.csv as written by export_feature_table.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<std::optional<int>> labels;
  Eigen::MatrixXd x;
  std::vector<std::string> feature_names;

  // Throws DataError if any row is unlabeled.
  Dataset to_dataset() const;
};

FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace humor
