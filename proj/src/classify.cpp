#include "humor/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "humor/csv.hpp"
#include "humor/error.hpp"
#include "humor/rng.hpp"

namespace humor {

using nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kGaussianNB: return "gnb";
    case ModelKind::kSvm: return "svm";
  }
  return "logreg";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logreg") return ModelKind::kLogReg;
  if (name == "gnb") return ModelKind::kGaussianNB;
  if (name == "svm") return ModelKind::kSvm;
  throw UsageError("unknown model kind '" + std::string(name) + "' (expected logreg|gnb|svm)");
}

std::string_view to_string(KernelKind kind) { return kind == KernelKind::kLinear ? "linear" : "rbf"; }

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  throw UsageError("unknown kernel '" + std::string(name) + "' (expected linear|rbf)");
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  if (!j.is_object()) throw UsageError("classifier config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "epochs") c.epochs = value.get<int>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "regularization") c.regularization = value.get<double>();
    else if (key == "gamma") c.gamma = value.get<double>();
    else if (key == "kernel") c.kernel = parse_kernel_kind(value.get<std::string>());
    else if (key == "c") c.c = value.get<double>();
    else if (key == "tolerance") c.tolerance = value.get<double>();
    else if (key == "max_passes") c.max_passes = value.get<int>();
    else throw UsageError("unknown classifier config key '" + key + "'");
  }
  return c;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DataError("dataset has " + std::to_string(x.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  }
  if (static_cast<std::size_t>(x.cols()) != feature_names.size()) {
    throw DataError("dataset has " + std::to_string(x.cols()) + " columns but " +
                    std::to_string(feature_names.size()) + " feature names");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  }
  if (!x.allFinite()) throw DataError("dataset contains NaN or Inf");
}

Standardizer Standardizer::fit(const MatrixXd& x) {
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.std.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.std(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

MatrixXd Standardizer::apply(const MatrixXd& x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

VectorXd Standardizer::apply(const VectorXd& x) const {
  return (x - mean).array() / std.array();
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void require_both_classes(const Dataset& data) {
  data.validate();
  if (data.size() < 2) throw UsageError("training needs at least two examples");
  const auto ones = std::count(data.y.begin(), data.y.end(), 1);
  if (ones == 0 || ones == static_cast<long>(data.size())) {
    throw DataError("training data contains a single class");
  }
}

LogisticParams train_logreg(const MatrixXd& x, const std::vector<int>& y, const TrainConfig& cfg) {
  LogisticParams p;
  p.weights = VectorXd::Zero(x.cols());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto lg = logistic_loss(x, y, p.weights, p.bias, cfg.regularization);
    if (!std::isfinite(lg.loss)) throw TrainingError("non-finite loss", static_cast<std::size_t>(epoch));
    p.loss_history.push_back(lg.loss);
    p.weights -= cfg.learning_rate * lg.grad_weights;
    p.bias -= cfg.learning_rate * lg.grad_bias;
  }
  const auto final_loss = logistic_loss(x, y, p.weights, p.bias, cfg.regularization).loss;
  if (!std::isfinite(final_loss)) throw TrainingError("non-finite loss", static_cast<std::size_t>(cfg.epochs));
  p.loss_history.push_back(final_loss);
  return p;
}

GaussianNBParams train_gnb(const MatrixXd& x, const std::vector<int>& y) {
  GaussianNBParams p;
  const auto n = x.rows();
  const auto d = x.cols();
  double max_var = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = x.col(j).mean();
    max_var = std::max(max_var, (x.col(j).array() - mean).square().sum() / static_cast<double>(n));
  }
  p.epsilon = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
  p.means = MatrixXd::Zero(2, d);
  p.variances = MatrixXd::Zero(2, d);
  std::array<double, 2> counts{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    counts[c] += 1.0;
    p.means.row(c) += x.row(i);
  }
  for (int c = 0; c < 2; ++c) p.means.row(c) /= counts[c];
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    p.variances.row(c) += (x.row(i) - p.means.row(c)).array().square().matrix();
  }
  for (int c = 0; c < 2; ++c) {
    p.variances.row(c) /= counts[c];
    p.variances.row(c).array() += p.epsilon;
    p.priors[c] = counts[c] / static_cast<double>(n);
  }
  return p;
}

SvmParams train_linear_svm(const MatrixXd& x, const std::vector<int>& y, const TrainConfig& cfg) {
  // Pegasos on the bias-augmented problem, with projection onto the ball of
  // radius 1/sqrt(lambda).
  const auto n = x.rows();
  const auto d = x.cols();
  const double lambda = cfg.regularization > 0 ? cfg.regularization : 1e-3;
  const double radius = 1.0 / std::sqrt(lambda);
  VectorXd w = VectorXd::Zero(d + 1);
  Rng rng(cfg.seed);
  const long long steps = static_cast<long long>(cfg.epochs) * n;
  VectorXd xi(d + 1);
  for (long long t = 1; t <= steps; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    xi.head(d) = x.row(i).transpose();
    xi(d) = 1.0;
    const double yi = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double margin = yi * w.dot(xi);
    w *= (1.0 - eta * lambda);
    if (margin < 1.0) w += eta * yi * xi;
    const double norm = w.norm();
    if (norm > radius) w *= radius / norm;
    if (!w.allFinite()) throw TrainingError("non-finite weights", static_cast<std::size_t>(t / n));
  }
  SvmParams p;
  p.kernel = KernelKind::kLinear;
  p.weights = w.head(d);
  p.bias = w(d);
  return p;
}

double rbf(const VectorXd& a, const VectorXd& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

SvmParams train_rbf_svm(const MatrixXd& x, const std::vector<int>& labels, const TrainConfig& cfg) {
  const auto n = x.rows();
  double gamma = cfg.gamma;
  if (gamma <= 0.0) {
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    gamma = 1.0 / (static_cast<double>(x.cols()) * (var > 0 ? var : 1.0));
  }

  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

  MatrixXd kernel(n, n);
  const VectorXd sq = x.rowwise().squaredNorm();
  kernel = x * x.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kernel(i, j) = std::exp(-gamma * std::max(0.0, sq(i) + sq(j) - 2.0 * kernel(i, j)));
    }
  }

  // Simplified SMO with an error cache: E_i = f(x_i) - y_i.
  VectorXd alpha = VectorXd::Zero(n);
  double b = 0.0;
  VectorXd errors = -y;
  Rng rng(cfg.seed);
  const double c = cfg.c;
  const double tol = cfg.tolerance;
  int passes = 0;
  int sweeps = 0;
  while (passes < cfg.max_passes && sweeps < cfg.epochs) {
    ++sweeps;
    int changed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ei = errors(i);
      if (!((y(i) * ei < -tol && alpha(i) < c) || (y(i) * ei > tol && alpha(i) > 0))) continue;
      auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      const double ej = errors(j);
      const double ai_old = alpha(i);
      const double aj_old = alpha(j);
      double lo, hi;
      if (y(i) != y(j)) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(c, c + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - c);
        hi = std::min(c, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      const double eta = 2.0 * kernel(i, j) - kernel(i, i) - kernel(j, j);
      if (eta >= 0) continue;
      double aj = aj_old - y(j) * (ei - ej) / eta;
      aj = std::clamp(aj, lo, hi);
      if (std::abs(aj - aj_old) < 1e-5) continue;
      const double ai = ai_old + y(i) * y(j) * (aj_old - aj);
      const double b1 = b - ei - y(i) * (ai - ai_old) * kernel(i, i) - y(j) * (aj - aj_old) * kernel(i, j);
      const double b2 = b - ej - y(i) * (ai - ai_old) * kernel(i, j) - y(j) * (aj - aj_old) * kernel(j, j);
      double b_new;
      if (ai > 0 && ai < c) b_new = b1;
      else if (aj > 0 && aj < c) b_new = b2;
      else b_new = 0.5 * (b1 + b2);
      errors += y(i) * (ai - ai_old) * kernel.col(i) + y(j) * (aj - aj_old) * kernel.col(j);
      errors.array() += b_new - b;
      alpha(i) = ai;
      alpha(j) = aj;
      b = b_new;
      ++changed;
    }
    if (!std::isfinite(b)) throw TrainingError("non-finite bias", static_cast<std::size_t>(sweeps));
    passes = changed == 0 ? passes + 1 : 0;
  }

  SvmParams p;
  p.kernel = KernelKind::kRbf;
  p.gamma = gamma;
  p.bias = b;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha(i) > 1e-12) support.push_back(i);
  }
  p.support_vectors.resize(static_cast<Eigen::Index>(support.size()), x.cols());
  p.coefficients.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    p.support_vectors.row(row) = x.row(support[k]);
    p.coefficients(row) = alpha(support[k]) * y(support[k]);
  }
  return p;
}

}  // namespace

LogisticLoss logistic_loss(const MatrixXd& x, const std::vector<int>& y, const VectorXd& weights,
                           double bias, double l2) {
  const auto n = x.rows();
  const VectorXd z = (x * weights).array() + bias;
  VectorXd residual(n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    loss += softplus(z(i)) - yi * z(i);
    residual(i) = sigmoid(z(i)) - yi;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  LogisticLoss out;
  out.loss = loss * inv_n + 0.5 * l2 * weights.squaredNorm();
  out.grad_weights = inv_n * (x.transpose() * residual) + l2 * weights;
  out.grad_bias = residual.sum() * inv_n;
  return out;
}

Model train(ModelKind kind, const Dataset& data, const TrainConfig& config) {
  require_both_classes(data);
  if (config.epochs < 0) throw UsageError("epochs must be non-negative");
  Model model;
  model.kind = kind;
  model.feature_names = data.feature_names;
  switch (kind) {
    case ModelKind::kGaussianNB:
      model.params = train_gnb(data.x, data.y);
      break;
    case ModelKind::kLogReg: {
      model.standardizer = Standardizer::fit(data.x);
      model.params = train_logreg(model.standardizer->apply(data.x), data.y, config);
      break;
    }
    case ModelKind::kSvm: {
      model.standardizer = Standardizer::fit(data.x);
      const MatrixXd xs = model.standardizer->apply(data.x);
      model.params = config.kernel == KernelKind::kLinear ? train_linear_svm(xs, data.y, config)
                                                          : train_rbf_svm(xs, data.y, config);
      break;
    }
  }
  return model;
}

Prediction predict(const Model& model, const VectorXd& raw) {
  if (static_cast<std::size_t>(raw.size()) != model.feature_count()) {
    throw UsageError("feature vector has " + std::to_string(raw.size()) + " values, model expects " +
                     std::to_string(model.feature_count()));
  }
  const VectorXd x = model.standardizer ? model.standardizer->apply(raw) : raw;
  Prediction out;
  if (const auto* lr = std::get_if<LogisticParams>(&model.params)) {
    out.score = sigmoid(lr->weights.dot(x) + lr->bias);
    out.label = out.score >= 0.5 ? 1 : 0;
  } else if (const auto* nb = std::get_if<GaussianNBParams>(&model.params)) {
    std::array<double, 2> joint{};
    for (int c = 0; c < 2; ++c) {
      double lj = std::log(nb->priors[c]);
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double var = nb->variances(c, j);
        const double diff = x(j) - nb->means(c, j);
        lj += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
      }
      joint[c] = lj;
    }
    out.score = sigmoid(joint[1] - joint[0]);
    out.label = out.score >= 0.5 ? 1 : 0;
  } else {
    const auto& svm = std::get<SvmParams>(model.params);
    if (svm.kernel == KernelKind::kLinear) {
      out.score = svm.weights.dot(x) + svm.bias;
    } else {
      double f = svm.bias;
      for (Eigen::Index k = 0; k < svm.support_vectors.rows(); ++k) {
        f += svm.coefficients(k) * rbf(svm.support_vectors.row(k).transpose(), x, svm.gamma);
      }
      out.score = f;
    }
    out.label = out.score >= 0.0 ? 1 : 0;
  }
  return out;
}

Prediction predict(const Model& model, const std::vector<double>& x) {
  return predict(model, Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
}

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  const std::size_t total = tp + fp + fn + tn;
  m.accuracy = total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Metrics evaluate(const Model& model, const Dataset& data) {
  data.validate();
  if (data.size() == 0) throw UsageError("cannot evaluate on an empty dataset");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const int predicted = predict(model, VectorXd(data.x.row(i).transpose())).label;
    const int actual = data.y[static_cast<std::size_t>(i)];
    if (predicted == 1 && actual == 1) ++tp;
    else if (predicted == 1) ++fp;
    else if (actual == 1) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
  data.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  std::vector<Eigen::Index> train_rows, test_rows;
  for (int c = 0; c < 2; ++c) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.y[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
    }
    // Fisher-Yates with the portable generator.
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.below(i)]);
    }
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  auto take = [&](const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out.x.row(static_cast<Eigen::Index>(k)) = data.x.row(rows[k]);
      out.y.push_back(data.y[static_cast<std::size_t>(rows[k])]);
    }
    return out;
  };
  return {take(train_rows), take(test_rows)};
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr int kModelFormatVersion = 1;

json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixXd mat_from(const json& j, Eigen::Index cols) {
  MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = vec_from(j[i]);
    if (row.size() != cols) throw DataError("matrix row width mismatch in model file");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

}  // namespace

json model_to_json(const Model& model) {
  json j;
  j["format"] = "humor-classifier";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind);
  j["feature_names"] = model.feature_names;
  if (model.standardizer) {
    j["standardizer"] = {{"mean", vec_json(model.standardizer->mean)},
                         {"std", vec_json(model.standardizer->std)}};
  }
  json params;
  if (const auto* lr = std::get_if<LogisticParams>(&model.params)) {
    params["weights"] = vec_json(lr->weights);
    params["bias"] = lr->bias;
  } else if (const auto* nb = std::get_if<GaussianNBParams>(&model.params)) {
    params["priors"] = {nb->priors[0], nb->priors[1]};
    params["means"] = mat_json(nb->means);
    params["variances"] = mat_json(nb->variances);
    params["epsilon"] = nb->epsilon;
  } else {
    const auto& svm = std::get<SvmParams>(model.params);
    params["kernel"] = to_string(svm.kernel);
    params["bias"] = svm.bias;
    if (svm.kernel == KernelKind::kLinear) {
      params["weights"] = vec_json(svm.weights);
    } else {
      params["gamma"] = svm.gamma;
      params["support_vectors"] = mat_json(svm.support_vectors);
      params["coefficients"] = vec_json(svm.coefficients);
    }
  }
  j["params"] = std::move(params);
  return j;
}

Model model_from_json(const json& j, const std::vector<std::string>* expected_features) {
  try {
    if (j.value("format", "") != "humor-classifier") throw DataError("not a classifier model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported classifier model version " + j.at("version").dump());
    }
    Model model;
    model.kind = parse_model_kind(j.at("kind").get<std::string>());
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (expected_features && *expected_features != model.feature_names) {
      throw DataError("model feature names do not match the input feature table");
    }
    const auto d = static_cast<Eigen::Index>(model.feature_names.size());
    if (j.contains("standardizer")) {
      Standardizer s;
      s.mean = vec_from(j["standardizer"].at("mean"));
      s.std = vec_from(j["standardizer"].at("std"));
      if (s.mean.size() != d || s.std.size() != d || (s.std.array() <= 0).any()) {
        throw DataError("invalid standardizer in model file");
      }
      model.standardizer = std::move(s);
    }
    const auto& params = j.at("params");
    switch (model.kind) {
      case ModelKind::kLogReg: {
        LogisticParams p;
        p.weights = vec_from(params.at("weights"));
        p.bias = params.at("bias").get<double>();
        if (p.weights.size() != d) throw DataError("weight length does not match feature count");
        model.params = std::move(p);
        break;
      }
      case ModelKind::kGaussianNB: {
        GaussianNBParams p;
        const auto priors = params.at("priors").get<std::vector<double>>();
        if (priors.size() != 2) throw DataError("gnb model needs two priors");
        p.priors = {priors[0], priors[1]};
        p.means = mat_from(params.at("means"), d);
        p.variances = mat_from(params.at("variances"), d);
        p.epsilon = params.at("epsilon").get<double>();
        if (p.means.rows() != 2 || p.variances.rows() != 2) throw DataError("gnb model needs two classes");
        model.params = std::move(p);
        break;
      }
      case ModelKind::kSvm: {
        SvmParams p;
        p.kernel = parse_kernel_kind(params.at("kernel").get<std::string>());
        p.bias = params.at("bias").get<double>();
        if (p.kernel == KernelKind::kLinear) {
          p.weights = vec_from(params.at("weights"));
          if (p.weights.size() != d) throw DataError("weight length does not match feature count");
        } else {
          p.gamma = params.at("gamma").get<double>();
          p.support_vectors = mat_from(params.at("support_vectors"), d);
          p.coefficients = vec_from(params.at("coefficients"));
          if (p.coefficients.size() != p.support_vectors.rows()) {
            throw DataError("support vector count mismatch");
          }
        }
        model.params = std::move(p);
        break;
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed classifier model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed classifier model: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << model_to_json(model).dump(1) << '\n';
}

Model load_model(const std::filesystem::path& path, const std::vector<std::string>* expected_features) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed classifier model: ") + e.what());
  }
  return model_from_json(j, expected_features);
}

Dataset FeatureTable::to_dataset() const {
  Dataset d;
  d.x = x;
  d.feature_names = feature_names;
  d.y.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) throw DataError("row '" + ids[i] + "' has no label");
    d.y.push_back(*labels[i]);
  }
  return d;
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature table " + path.string());
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() < 3 || fields[0] != "id" || fields[1] != "label") {
    throw DataError("feature table must start with an id,label,... header", 1);
  }
  FeatureTable table;
  table.feature_names.assign(fields.begin() + 2, fields.end());
  const std::size_t width = fields.size();
  std::vector<std::vector<double>> rows;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw DataError("expected " + std::to_string(width) + " columns", reader.record_line());
    }
    table.ids.push_back(fields[0]);
    if (fields[1].empty()) {
      table.labels.push_back(std::nullopt);
    } else if (fields[1] == "0" || fields[1] == "1") {
      table.labels.push_back(fields[1] == "1" ? 1 : 0);
    } else {
      throw DataError("label must be 0, 1 or empty", reader.record_line());
    }
    std::vector<double> row;
    for (std::size_t k = 2; k < width; ++k) {
      double v = 0.0;
      const char* b = fields[k].data();
      const char* e = b + fields[k].size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
        throw DataError("non-numeric feature value '" + fields[k] + "'", reader.record_line());
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  table.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 2));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      table.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return table;
}

}  // namespace humor
