#include "rcbench/readout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "rcbench/error.hpp"

namespace rcbench {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;
constexpr double kAbsentBias = -1e9;  // score of a class never seen in training

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho = 0.0;
};

/// Two-loop recursion: returns -H g.
Eigen::VectorXd lbfgs_direction(const std::deque<CurvaturePair>& history, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  if (!history.empty()) {
    const auto& last = history.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  } else {
    q /= std::max(1.0, g.norm());
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return -q;
}

void require_dimension(const ReadoutModel& model, std::size_t size) {
  if (size != model.dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature vector has " + std::to_string(size) + " entries, model expects " + std::to_string(model.dimension));
  }
}

}  // namespace

Eigen::VectorXd logistic_objectives(const FeatureMatrix& features, const Eigen::MatrixXd& targets, double l2_lambda,
                                    const Eigen::MatrixXd& params, Eigen::MatrixXd& gradients) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  const Eigen::Index k = params.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd z = features * params.topRows(d);
  z.rowwise() += params.row(d);

  Eigen::VectorXd loss = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd residual(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zi = z(i, c);
      acc += softplus(zi) - targets(i, c) * zi;
      residual(i, c) = sigmoid(zi) - targets(i, c);
    }
    loss[c] = acc * inv_n + 0.5 * l2_lambda * params.col(c).head(d).squaredNorm();
  }

  gradients.resize(d + 1, k);
  gradients.topRows(d).noalias() = features.transpose() * residual;
  gradients.topRows(d) *= inv_n;
  gradients.topRows(d) += l2_lambda * params.topRows(d);
  gradients.row(d) = residual.colwise().sum() * inv_n;
  return loss;
}

ReadoutModel train_ovr(const FeatureMatrix& raw_features, std::span<const Digit> labels, const TrainConfig& cfg) {
  const auto n = raw_features.rows();
  const auto d = raw_features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(n) + " feature rows but " + std::to_string(labels.size()) + " labels");
  }
  if (n == 0 || d == 0) throw Error(ErrorCode::DimensionMismatch, "empty feature matrix");
  if (cfg.max_iter < 1 || !(cfg.l2_lambda >= 0.0)) throw Error(ErrorCode::InvalidParams, "max_iter >= 1 and l2_lambda >= 0 required");
  if (!raw_features.allFinite()) throw Error(ErrorCode::NonFinite, "features contain non-finite values");

  std::array<bool, kNumClasses> present{};
  for (Digit y : labels) {
    if (y >= kNumClasses) throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(y));
    present[y] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw Error(ErrorCode::SingleClass, "training labels contain fewer than two classes");
  }

  ReadoutModel model;
  model.dimension = static_cast<std::size_t>(d);

  FeatureMatrix standardized;
  const FeatureMatrix* features = &raw_features;
  if (cfg.standardize) {
    model.shift = raw_features.colwise().mean().transpose();
    model.scale.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double var = (raw_features.col(j).array() - model.shift[j]).square().mean();
      model.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    standardized = (raw_features.rowwise() - model.shift.transpose()).array().rowwise() / model.scale.transpose().array();
    features = &standardized;
  }

  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, kNumClasses);
  for (Eigen::Index i = 0; i < n; ++i) targets(i, labels[static_cast<std::size_t>(i)]) = 1.0;

  Eigen::MatrixXd params = Eigen::MatrixXd::Zero(d + 1, kNumClasses);
  Eigen::MatrixXd grads;
  Eigen::VectorXd loss = logistic_objectives(*features, targets, cfg.l2_lambda, params, grads);

  model.stats.resize(kNumClasses);
  std::array<bool, kNumClasses> active{};
  std::array<std::deque<CurvaturePair>, kNumClasses> history;
  for (int c = 0; c < kNumClasses; ++c) {
    model.stats[c].grad_norm = present[c] ? grads.col(c).norm() : 0.0;
    active[c] = present[c] && model.stats[c].grad_norm > cfg.grad_tol;
    if (cfg.record_history && present[c]) model.stats[c].loss_history.push_back(loss[c]);
  }

  Eigen::MatrixXd directions = Eigen::MatrixXd::Zero(d + 1, kNumClasses);
  Eigen::MatrixXd trial_grads;
  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) break;

    std::array<double, kNumClasses> step{};
    std::array<double, kNumClasses> slope{};
    std::array<bool, kNumClasses> pending{};
    for (int c = 0; c < kNumClasses; ++c) {
      if (!active[c]) continue;
      directions.col(c) = lbfgs_direction(history[c], grads.col(c));
      slope[c] = directions.col(c).dot(grads.col(c));
      if (!(slope[c] < 0.0)) {
        history[c].clear();
        directions.col(c) = lbfgs_direction(history[c], grads.col(c));
        slope[c] = directions.col(c).dot(grads.col(c));
      }
      step[c] = 1.0;
      pending[c] = true;
    }

    // Backtracking; every round evaluates all ten columns so the product
    // shapes, and hence the rounding, never depend on which classes remain.
    while (std::any_of(pending.begin(), pending.end(), [](bool p) { return p; })) {
      Eigen::MatrixXd trial = params;
      for (int c = 0; c < kNumClasses; ++c) {
        if (pending[c]) trial.col(c) += step[c] * directions.col(c);
      }
      const Eigen::VectorXd trial_loss = logistic_objectives(*features, targets, cfg.l2_lambda, trial, trial_grads);
      for (int c = 0; c < kNumClasses; ++c) {
        if (!pending[c]) continue;
        if (trial_loss[c] <= loss[c] + kArmijo * step[c] * slope[c]) {
          pending[c] = false;
          CurvaturePair pair{trial.col(c) - params.col(c), trial_grads.col(c) - grads.col(c), 0.0};
          const double sy = pair.s.dot(pair.y);
          if (sy > 1e-12 * pair.y.squaredNorm() && sy > 0.0) {
            pair.rho = 1.0 / sy;
            history[c].push_back(std::move(pair));
            if (history[c].size() > cfg.history_size) history[c].pop_front();
          }
          params.col(c) = trial.col(c);
          grads.col(c) = trial_grads.col(c);
          loss[c] = trial_loss[c];
          auto& stats = model.stats[c];
          ++stats.iterations;
          stats.grad_norm = grads.col(c).norm();
          if (cfg.record_history) stats.loss_history.push_back(loss[c]);
          if (stats.grad_norm <= cfg.grad_tol) active[c] = false;
        } else {
          step[c] *= 0.5;
          if (step[c] < kMinStep) {
            // No representable decrease along this direction: converged to
            // working precision.
            pending[c] = false;
            active[c] = false;
          }
        }
      }
    }
  }

  model.weights = params.topRows(d);
  model.bias = params.row(d).transpose();
  for (int c = 0; c < kNumClasses; ++c) {
    if (!present[c]) model.bias[c] = kAbsentBias;
  }
  return model;
}

std::vector<double> decision_scores(const ReadoutModel& model, std::span<const double> x) {
  require_dimension(model, x.size());
  Eigen::Map<const Eigen::VectorXd> raw(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd scores;
  if (model.shift.size() != 0) {
    const Eigen::VectorXd standardized = (raw - model.shift).cwiseQuotient(model.scale);
    scores = model.weights.transpose() * standardized + model.bias;
  } else {
    scores = model.weights.transpose() * raw + model.bias;
  }
  return {scores.data(), scores.data() + scores.size()};
}

Digit predict(const ReadoutModel& model, std::span<const double> x) {
  const auto scores = decision_scores(model, x);
  return static_cast<Digit>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::vector<Digit> predict_all(const ReadoutModel& model, const FeatureMatrix& features) {
  require_dimension(model, static_cast<std::size_t>(features.cols()));
  Eigen::MatrixXd scores;
  if (model.shift.size() != 0) {
    const FeatureMatrix standardized =
        (features.rowwise() - model.shift.transpose()).array().rowwise() / model.scale.transpose().array();
    scores = standardized * model.weights;
  } else {
    scores = features * model.weights;
  }
  scores.rowwise() += model.bias.transpose();
  std::vector<Digit> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<Digit>(best);
  }
  return out;
}

void save_model(const ReadoutModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "rcbench-readout";
  j["version"] = 1;
  j["dimension"] = model.dimension;
  j["classes"] = nlohmann::json::array();
  for (Eigen::Index c = 0; c < model.weights.cols(); ++c) {
    const Eigen::VectorXd w = model.weights.col(c);
    nlohmann::json cls;
    cls["weights"] = std::vector<double>(w.data(), w.data() + w.size());
    cls["bias"] = model.bias[c];
    if (static_cast<std::size_t>(c) < model.stats.size()) {
      cls["iterations"] = model.stats[c].iterations;
      cls["grad_norm"] = model.stats[c].grad_norm;
    }
    j["classes"].push_back(std::move(cls));
  }
  if (model.shift.size() != 0) {
    j["shift"] = std::vector<double>(model.shift.data(), model.shift.data() + model.shift.size());
    j["scale"] = std::vector<double>(model.scale.data(), model.scale.data() + model.scale.size());
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump() << '\n';
}

ReadoutModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Corrupt, path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "rcbench-readout" || j.value("version", 0) != 1) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": not an rcbench-readout v1 record");
  }
  ReadoutModel model;
  model.dimension = j.at("dimension").get<std::size_t>();
  const auto& classes = j.at("classes");
  const auto d = static_cast<Eigen::Index>(model.dimension);
  model.weights.resize(d, static_cast<Eigen::Index>(classes.size()));
  model.bias.resize(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto w = classes[c].at("weights").get<std::vector<double>>();
    if (w.size() != model.dimension) throw Error(ErrorCode::Corrupt, path.string() + ": weight vector size mismatch");
    model.weights.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(w.data(), d);
    model.bias[static_cast<Eigen::Index>(c)] = classes[c].at("bias").get<double>();
    model.stats.push_back({classes[c].value("iterations", std::size_t{0}), classes[c].value("grad_norm", 0.0), {}});
  }
  if (j.contains("shift")) {
    const auto shift = j["shift"].get<std::vector<double>>();
    const auto scale = j["scale"].get<std::vector<double>>();
    model.shift = Eigen::Map<const Eigen::VectorXd>(shift.data(), static_cast<Eigen::Index>(shift.size()));
    model.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  }
  return model;
}

}  // namespace rcbench
