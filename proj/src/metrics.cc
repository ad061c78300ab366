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

#include "dyadicot/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "dyadicot/error.h"
#include "dyadicot/ot.h"
#include "dyadicot/random.h"

namespace dyadicot {

void ValidateSample(const DyadicSample& sample) {
  const std::size_t n = sample.pairs.size();
  if (sample.xor_label.size() != n || sample.predicted.size() != n ||
      (!sample.link_label.empty() && sample.link_label.size() != n) ||
      (!sample.score.empty() && sample.score.size() != n)) {
    throw InvalidArgumentError("dyadic sample: field lengths differ");
  }
  auto binary = [](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0 || x == 1; });
  };
  if (!binary(sample.xor_label) || !binary(sample.predicted) ||
      !binary(sample.link_label)) {
    throw InvalidArgumentError("dyadic sample: labels must be 0 or 1");
  }
}

namespace {

struct GroupRates {
  std::size_t count[2] = {0, 0};
  std::size_t positive[2] = {0, 0};
};

GroupRates CountRates(const DyadicSample& sample) {
  ValidateSample(sample);
  GroupRates r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    ++r.count[sample.xor_label[i]];
    r.positive[sample.xor_label[i]] += sample.predicted[i];
  }
  return r;
}

double Rate(const GroupRates& r, int group) {
  return static_cast<double>(r.positive[group]) / static_cast<double>(r.count[group]);
}

}  // namespace

double Ddi(const DyadicSample& sample) {
  const GroupRates r = CountRates(sample);
  if (r.count[0] == 0 || r.count[1] == 0) {
    throw UndefinedMetricError("DDI undefined: an xor group is empty");
  }
  if (r.positive[0] == 0) {
    throw UndefinedMetricError("DDI undefined: no positive predictions for same-group pairs");
  }
  return Rate(r, 1) / Rate(r, 0);
}

double Dber(const DyadicSample& sample) {
  const GroupRates r = CountRates(sample);
  if (r.count[0] == 0 || r.count[1] == 0) {
    throw UndefinedMetricError("DBER undefined: an xor group is empty");
  }
  return 0.5 * ((1.0 - Rate(r, 1)) + Rate(r, 0));
}

double MinDberBruteForce(const Eigen::VectorXd& gamma0, const Eigen::VectorXd& gamma1) {
  if (gamma0.size() != gamma1.size()) {
    throw InvalidArgumentError("min_dber: distributions have different supports");
  }
  const Index k = gamma0.size();
  if (k == 0 || k > 20) throw InvalidArgumentError("min_dber: support size must be 1..20");
  double best = 1.0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    // Bit x set means g(x) = 1.
    double miss1 = 0.0;  // gamma1(g = 0)
    double miss0 = 0.0;  // gamma0(g = 1)
    for (Index x = 0; x < k; ++x) {
      if (mask & (1u << x)) {
        miss0 += gamma0(x);
      } else {
        miss1 += gamma1(x);
      }
    }
    best = std::min(best, 0.5 * (miss1 + miss0));
  }
  return best;
}

double TotalVariation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgumentError("total variation: size mismatch");
  return 0.5 * (a - b).cwiseAbs().sum();
}

double HammingWasserstein(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgumentError("hamming wasserstein: size mismatch");
  std::vector<Index> support(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.size(); ++i) support[i] = i;
  const Eigen::MatrixXd cost =
      HammingCost(std::span<const Index>(support), std::span<const Index>(support));
  return Wasserstein(cost, a, b, Solver::kExact);
}

double MinDberBound(const DyadicSample& sample) {
  const GroupRates r = CountRates(sample);
  if (r.count[0] == 0 || r.count[1] == 0) {
    throw UndefinedMetricError("min DBER bound undefined: an xor group is empty");
  }
  return 0.5 * (1.0 - std::abs(Rate(r, 0) - Rate(r, 1)));
}

AssortativityResult Assortativity(const Graph& graph) {
  std::map<int, Index> slot;
  for (int g : graph.Groups()) slot.emplace(g, static_cast<Index>(slot.size()));
  const Index k = static_cast<Index>(slot.size());
  Eigen::MatrixXd mixing = Eigen::MatrixXd::Zero(k, k);
  const Index n = graph.NumNodes();
  for (Index v = 0; v < n; ++v) {
    const Index sv = slot.at(graph.sensitive(v));
    for (Index u = 0; u < n; ++u) {
      const double w = graph.adjacency(u, v);
      if (w > 0 && u != v) mixing(slot.at(graph.sensitive(u)), sv) += w;
    }
  }
  const double total = mixing.sum();
  if (!(total > 0)) throw InvalidArgumentError("assortativity: graph has no edges");
  mixing /= total;
  const Eigen::VectorXd a = mixing.rowwise().sum();
  const Eigen::VectorXd b = mixing.colwise().sum().transpose();
  const double ab = a.dot(b);
  AssortativityResult result;
  if (std::abs(1.0 - ab) < 1e-15) {
    result.value = 1.0;
    result.degenerate = true;
    return result;
  }
  result.value = (mixing.trace() - ab) / (1.0 - ab);
  return result;
}

std::pair<std::vector<Index>, std::vector<Index>> StratifiedSplit(
    const Eigen::VectorXi& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgumentError("stratified split: train fraction must be in (0, 1)");
  }
  std::map<int, std::vector<Index>> members;
  for (Index i = 0; i < labels.size(); ++i) members[labels(i)].push_back(i);
  Rng rng(DeriveSeed(seed, 0x57a7));
  std::vector<Index> train, test;
  for (auto& [label, idx] : members) {
    if (idx.size() < 2) {
      throw InvalidArgumentError("stratified split: class " + std::to_string(label) +
                                 " has fewer than 2 members");
    }
    Shuffle(idx, rng);
    const std::size_t take = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(train_fraction * idx.size())), 1,
        idx.size() - 1);
    train.insert(train.end(), idx.begin(), idx.begin() + take);
    test.insert(test.end(), idx.begin() + take, idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

namespace {

Eigen::MatrixXd Rows(const Eigen::MatrixXd& m, const std::vector<Index>& idx) {
  Eigen::MatrixXd out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(r) = m.row(idx[r]);
  return out;
}

Eigen::VectorXi Entries(const Eigen::VectorXi& v, const std::vector<Index>& idx) {
  Eigen::VectorXi out(static_cast<Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) out(r) = v(idx[r]);
  return out;
}

}  // namespace

double RepresentationBias(const Eigen::MatrixXd& vectors,
                          const Eigen::VectorXi& sensitive, double train_fraction,
                          std::uint64_t seed, const ClassifierParams& params) {
  if (vectors.rows() != sensitive.size()) {
    throw InvalidArgumentError("representation bias: row count mismatch");
  }
  const std::set<int> distinct(sensitive.data(), sensitive.data() + sensitive.size());
  if (distinct.size() < 2) {
    throw InvalidArgumentError("representation bias: needs >= 2 sensitive classes");
  }
  const auto [train, test] = StratifiedSplit(sensitive, train_fraction, seed);
  const LinearClassifier clf =
      TrainClassifier(Rows(vectors, train), Entries(sensitive, train), params);
  return Accuracy(clf.Predict(Rows(vectors, test)), Entries(sensitive, test));
}

double DyadicRb(const Eigen::MatrixXd& vectors, const std::vector<NodePair>& edges,
                const Eigen::VectorXi& sensitive, double train_fraction,
                std::uint64_t seed, const ClassifierParams& params) {
  if (vectors.rows() != sensitive.size()) {
    throw InvalidArgumentError("dyadic rb: row count mismatch");
  }
  Eigen::VectorXi indicator(static_cast<Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    indicator(e) = sensitive(edges[e].u) != sensitive(edges[e].v) ? 1 : 0;
  }
  const Index inter = indicator.sum();
  if (inter == 0 || inter == indicator.size()) {
    throw InvalidArgumentError("dyadic rb: an edge group (same or different) is empty");
  }
  const Eigen::MatrixXd features = EdgeFeatures(vectors, edges, EdgeCombiner::kConcat);
  const auto [train, test] = StratifiedSplit(indicator, train_fraction, seed);
  const LinearClassifier clf =
      TrainClassifier(Rows(features, train), Entries(indicator, train), params);
  const Eigen::VectorXi truth = Entries(indicator, test);
  const Eigen::VectorXi predicted = clf.Predict(Rows(features, test));
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    Index seen = 0, correct = 0;
    for (Index i = 0; i < truth.size(); ++i) {
      if (truth(i) != s) continue;
      ++seen;
      if (predicted(i) == s) ++correct;
    }
    const double share = static_cast<double>(s == 1 ? inter : indicator.size() - inter) /
                         static_cast<double>(indicator.size());
    total += share * static_cast<double>(correct) / static_cast<double>(seen);
  }
  return total;
}

LinkPredictionResult LinkPredictionEval(const Eigen::MatrixXd& vectors,
                                        const Graph& graph, const EdgeSplit& split,
                                        EdgeCombiner combiner, std::uint64_t seed,
                                        const ClassifierParams& params) {
  const Index n = graph.NumNodes();
  if (vectors.rows() != n) {
    throw InvalidArgumentError("link prediction: embedding has " +
                               std::to_string(vectors.rows()) + " rows for " +
                               std::to_string(n) + " nodes");
  }
  if (split.train_edges.empty()) {
    throw InvalidArgumentError("link prediction: empty training edge set");
  }
  if (split.test_pos.empty() || split.test_neg.empty()) {
    throw InvalidArgumentError("link prediction: empty test set");
  }
  const std::set<NodePair> excluded(split.test_neg.begin(), split.test_neg.end());
  const std::size_t num_neg = split.train_edges.size();
  const double non_edges = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1) -
                           static_cast<double>(graph.NumEdges()) -
                           static_cast<double>(excluded.size());
  if (non_edges < static_cast<double>(num_neg)) {
    throw InvalidArgumentError("link prediction: not enough non-edges for training negatives");
  }
  Rng rng(DeriveSeed(seed, 0x11c));
  std::set<NodePair> chosen;
  std::vector<NodePair> train_pairs = split.train_edges;
  while (chosen.size() < num_neg) {
    const Index u = static_cast<Index>(UniformIndex(rng, n));
    const Index v = static_cast<Index>(UniformIndex(rng, n));
    if (u == v || graph.adjacency(u, v) > 0) continue;
    const NodePair p = NodePair::Canonical(u, v);
    if (excluded.count(p) || !chosen.insert(p).second) continue;
    train_pairs.push_back(p);
  }
  Eigen::VectorXi train_labels(static_cast<Index>(train_pairs.size()));
  train_labels.head(split.train_edges.size()).setOnes();
  train_labels.tail(num_neg).setZero();
  const LinearClassifier clf =
      TrainClassifier(EdgeFeatures(vectors, train_pairs, combiner), train_labels, params);

  LinkPredictionResult result;
  DyadicSample& sample = result.sample;
  for (const NodePair& p : split.test_pos) {
    sample.pairs.push_back(p);
    sample.link_label.push_back(1);
  }
  for (const NodePair& p : split.test_neg) {
    sample.pairs.push_back(p);
    sample.link_label.push_back(0);
  }
  const Eigen::MatrixXd test_features = EdgeFeatures(vectors, sample.pairs, combiner);
  const Eigen::VectorXd scores = clf.BinaryScores(test_features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const NodePair p = sample.pairs[i];
    sample.xor_label.push_back(graph.sensitive(p.u) != graph.sensitive(p.v) ? 1 : 0);
    sample.score.push_back(scores(static_cast<Index>(i)));
    sample.predicted.push_back(scores(static_cast<Index>(i)) >= 0.5 ? 1 : 0);
    if (sample.predicted.back() == sample.link_label[i]) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(sample.size());
  return result;
}

std::pair<double, double> WilsonInterval(std::size_t successes, std::size_t trials,
                                         double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

AssumptionDiagnostics DiagnoseAssumptions(const DyadicSample& sample) {
  ValidateSample(sample);
  AssumptionDiagnostics d;
  GroupRates r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    ++r.count[sample.xor_label[i]];
    r.positive[sample.xor_label[i]] += sample.predicted[i];
  }
  const std::size_t total = sample.size();
  d.xor_rate = total ? static_cast<double>(r.count[1]) / static_cast<double>(total) : 0.0;
  std::tie(d.xor_ci_low, d.xor_ci_high) = WilsonInterval(r.count[1], total);
  d.equivalence_holds = total > 0 && d.xor_ci_low <= 0.5 && 0.5 <= d.xor_ci_high;
  d.intra_rate = r.count[0] ? Rate(r, 0) : 0.0;
  d.inter_rate = r.count[1] ? Rate(r, 1) : 0.0;
  d.propensity_holds = d.intra_rate >= d.inter_rate;
  return d;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> XorConditionalJoints(
    const Eigen::VectorXd& p0, const Eigen::VectorXd& p1, double prior0) {
  if (p0.size() != p1.size()) {
    throw InvalidArgumentError("xor joints: distributions have different supports");
  }
  if (!(prior0 > 0.0 && prior0 < 1.0)) {
    throw InvalidArgumentError("xor joints: prior must lie in (0, 1)");
  }
  const double prior1 = 1.0 - prior0;
  const double same = prior0 * prior0 + prior1 * prior1;
  const double cross = 2.0 * prior0 * prior1;
  Eigen::MatrixXd joint_same =
      (prior0 * prior0 * p0 * p0.transpose() + prior1 * prior1 * p1 * p1.transpose()) /
      same;
  Eigen::MatrixXd joint_cross =
      (prior0 * prior1 * (p0 * p1.transpose() + p1 * p0.transpose())) / cross;
  return {std::move(joint_same), std::move(joint_cross)};
}

}  // namespace dyadicot
