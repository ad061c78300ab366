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

#ifndef DYADICOT_CLASSIFIER_H_
#define DYADICOT_CLASSIFIER_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dyadicot {

struct ClassifierParams {
  double l2 = 1e-3;  // penalty on weights, not on the bias
  int max_iters = 1000;
  // Stop when the gradient norm drops below this.
  double tolerance = 1e-6;
  bool standardize = true;
  std::uint64_t seed = 0;
};

// Mean logistic loss of labels in {0, 1} plus (l2 / 2) |w|^2, with gradients.
double LogisticLoss(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                    const Eigen::VectorXd& weights, double bias, double l2,
                    Eigen::VectorXd* grad_weights = nullptr,
                    double* grad_bias = nullptr);

// Binary L2-regularised logistic regression.
struct LogisticModel {
  Eigen::VectorXd weights;  // in the standardised feature space
  double bias = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  int iterations = 0;
  bool converged = false;

  Eigen::VectorXd Scores(const Eigen::MatrixXd& features) const;  // P(y = 1)
  Eigen::VectorXi Predict(const Eigen::MatrixXd& features) const;  // score >= 0.5
};

// Full-batch Nesterov gradient descent with step 1/L and gradient restarts.
// Deterministic for given inputs.
LogisticModel FitLogistic(const Eigen::MatrixXd& features,
                          const Eigen::VectorXi& labels,
                          const ClassifierParams& params);

// Binary model for two classes, one-vs-rest otherwise.
struct LinearClassifier {
  std::vector<int> classes;
  std::vector<LogisticModel> models;  // 1 model for 2 classes
  ClassifierParams params;

  Eigen::VectorXi Predict(const Eigen::MatrixXd& features) const;
  // P(classes.back()) for binary problems.
  Eigen::VectorXd BinaryScores(const Eigen::MatrixXd& features) const;
};

LinearClassifier TrainClassifier(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXi& labels,
                                 const ClassifierParams& params);

double Accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

}  // namespace dyadicot

#endif  // DYADICOT_CLASSIFIER_H_
