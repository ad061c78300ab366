// Copyright 2026 The DyadicOT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dyadicot/classifier.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dyadicot/error.h"

namespace dyadicot {

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Eigen::MatrixXd Standardized(const Eigen::MatrixXd& features,
                             const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& scale) {
  return (features.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

// Largest squared singular value of [X 1] by power iteration.
double SquaredSpectralNorm(const Eigen::MatrixXd& x) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols() + 1);
  v /= v.norm();
  double estimate = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd xv = x * v.head(x.cols()) +
                               Eigen::VectorXd::Constant(x.rows(), v(x.cols()));
    Eigen::VectorXd next(x.cols() + 1);
    next.head(x.cols()) = x.transpose() * xv;
    next(x.cols()) = xv.sum();
    const double norm = next.norm();
    if (!(norm > 0)) return 0.0;
    const bool settled = std::abs(norm - estimate) <= 1e-6 * norm;
    estimate = norm;
    v = next / norm;
    if (settled) break;
  }
  return estimate;
}

}  // namespace

double LogisticLoss(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                    const Eigen::VectorXd& weights, double bias, double l2,
                    Eigen::VectorXd* grad_weights, double* grad_bias) {
  const Eigen::Index n = features.rows();
  if (labels.size() != n || weights.size() != features.cols()) {
    throw InvalidArgumentError("logistic loss: shape mismatch");
  }
  if (n == 0) throw InvalidArgumentError("logistic loss: no samples");
  const Eigen::VectorXd margins =
      (features * weights).array() + bias;
  double loss = 0.0;
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // -y log s(m) - (1 - y) log(1 - s(m)) = softplus(m) - y m
    loss += Softplus(margins(i)) - labels(i) * margins(i);
    residual(i) = Sigmoid(margins(i)) - labels(i);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss = loss * inv_n + 0.5 * l2 * weights.squaredNorm();
  if (grad_weights) {
    *grad_weights = features.transpose() * residual * inv_n + l2 * weights;
  }
  if (grad_bias) *grad_bias = residual.sum() * inv_n;
  return loss;
}

Eigen::VectorXd LogisticModel::Scores(const Eigen::MatrixXd& features) const {
  if (features.cols() != weights.size()) {
    throw InvalidArgumentError("classifier: feature width " +
                               std::to_string(features.cols()) + ", model expects " +
                               std::to_string(weights.size()));
  }
  const Eigen::VectorXd margins =
      (Standardized(features, mean, scale) * weights).array() + bias;
  return margins.unaryExpr([](double m) { return Sigmoid(m); });
}

Eigen::VectorXi LogisticModel::Predict(const Eigen::MatrixXd& features) const {
  return (Scores(features).array() >= 0.5).cast<int>();
}

LogisticModel FitLogistic(const Eigen::MatrixXd& features,
                          const Eigen::VectorXi& labels,
                          const ClassifierParams& params) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (labels.size() != n) throw InvalidArgumentError("classifier: label count mismatch");
  if (n == 0) throw InvalidArgumentError("classifier: no samples");
  if (!features.allFinite()) throw InvalidArgumentError("classifier: non-finite features");
  if ((labels.array() != 0 && labels.array() != 1).any()) {
    throw InvalidArgumentError("classifier: binary labels must be 0 or 1");
  }
  if (!(params.l2 >= 0.0)) throw InvalidArgumentError("classifier: l2 must be >= 0");

  LogisticModel model;
  if (params.standardize) {
    model.mean = features.colwise().mean().transpose();
    model.scale =
        ((features.rowwise() - model.mean.transpose()).colwise().squaredNorm() /
         static_cast<double>(n))
            .cwiseSqrt()
            .transpose();
    for (Eigen::Index t = 0; t < d; ++t) {
      if (!(model.scale(t) > 1e-12)) model.scale(t) = 1.0;
    }
  } else {
    model.mean = Eigen::VectorXd::Zero(d);
    model.scale = Eigen::VectorXd::Ones(d);
  }
  const Eigen::MatrixXd x = Standardized(features, model.mean, model.scale);
  const Eigen::VectorXd y = labels.cast<double>();

  const double lipschitz =
      0.25 * SquaredSpectralNorm(x) / static_cast<double>(n) + params.l2;
  // Power iteration approaches the norm from below.
  const double step = lipschitz > 0 ? 1.0 / (1.05 * lipschitz) : 1.0;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  Eigen::VectorXd w_prev = w;
  double b_prev = b;
  double momentum_t = 1.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
  for (int it = 0; it < params.max_iters; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
    const double beta = (momentum_t - 1.0) / t_next;
    const Eigen::VectorXd yw = w + beta * (w - w_prev);
    const double yb = b + beta * (b - b_prev);
    LogisticLoss(x, y, yw, yb, params.l2, &grad_w, &grad_b);
    const double grad_norm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
    model.iterations = it + 1;
    if (grad_norm < params.tolerance) {
      w = yw;
      b = yb;
      model.converged = true;
      break;
    }
    Eigen::VectorXd w_next = yw - step * grad_w;
    const double b_next = yb - step * grad_b;
    // Restart momentum when the step points against the previous move.
    const double progress = (grad_w.dot(w_next - w)) + grad_b * (b_next - b);
    w_prev = w;
    b_prev = b;
    w = std::move(w_next);
    b = b_next;
    momentum_t = progress > 0 ? 1.0 : t_next;
  }
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

Eigen::VectorXi LinearClassifier::Predict(const Eigen::MatrixXd& features) const {
  Eigen::VectorXi out(features.rows());
  if (models.size() == 1) {
    const Eigen::VectorXi raw = models[0].Predict(features);
    for (Eigen::Index i = 0; i < raw.size(); ++i) out(i) = classes[raw(i)];
    return out;
  }
  Eigen::MatrixXd scores(features.rows(), static_cast<Eigen::Index>(models.size()));
  for (std::size_t k = 0; k < models.size(); ++k) {
    scores.col(static_cast<Eigen::Index>(k)) = models[k].Scores(features);
  }
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    Eigen::Index best;
    scores.row(i).maxCoeff(&best);
    out(i) = classes[best];
  }
  return out;
}

Eigen::VectorXd LinearClassifier::BinaryScores(const Eigen::MatrixXd& features) const {
  if (models.size() != 1) {
    throw InvalidArgumentError("classifier: binary scores need a two-class model");
  }
  return models[0].Scores(features);
}

LinearClassifier TrainClassifier(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXi& labels,
                                 const ClassifierParams& params) {
  const std::set<int> distinct(labels.data(), labels.data() + labels.size());
  if (distinct.size() < 2) {
    throw InvalidArgumentError("classifier: labels contain a single class");
  }
  LinearClassifier classifier;
  classifier.params = params;
  classifier.classes.assign(distinct.begin(), distinct.end());
  if (classifier.classes.size() == 2) {
    const Eigen::VectorXi binary = (labels.array() == classifier.classes[1]).cast<int>();
    classifier.models.push_back(FitLogistic(features, binary, params));
    return classifier;
  }
  for (int c : classifier.classes) {
    const Eigen::VectorXi binary = (labels.array() == c).cast<int>();
    classifier.models.push_back(FitLogistic(features, binary, params));
  }
  return classifier;
}

double Accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgumentError("accuracy: length mismatch");
  }
  if (truth.size() == 0) throw InvalidArgumentError("accuracy: empty input");
  return static_cast<double>((predicted.array() == truth.array()).count()) /
         static_cast<double>(truth.size());
}

}  // namespace dyadicot
