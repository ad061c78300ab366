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

#ifndef DYADICOT_PIPELINE_H_
#define DYADICOT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "dyadicot/classifier.h"
#include "dyadicot/embed.h"
#include "dyadicot/error.h"
#include "dyadicot/graph.h"
#include "dyadicot/metrics.h"
#include "dyadicot/repair.h"

namespace dyadicot {

using Json = nlohmann::ordered_json;

// Version string baked in at build time.
std::string CodeVersion();

struct PipelineConfig {
  std::filesystem::path dataset;  // directory with node and edge files
  std::filesystem::path output;
  RepairConfig repair;
  WalkParams walks;
  SkipGramParams skipgram;
  EdgeCombiner combiner = EdgeCombiner::kHadamard;
  ClassifierParams classifier;
  double test_fraction = 0.1;
  double rb_train_fraction = 0.7;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int jobs = 1;
  bool write_embeddings = true;
  bool write_projections = true;
};

// Name recorded by a previous repair (meta.json), else the directory name.
std::string DatasetName(const std::filesystem::path& dir);
Json RepairMetaJson(const RepairMeta& meta);

void ValidatePipelineConfig(const PipelineConfig& config);
Json ConfigToJson(const PipelineConfig& config);

// Thrown by RunPipeline; `stage` names the step that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Seeds for the stochastic stages of one run seed.
struct SeedStreams {
  std::uint64_t split;
  std::uint64_t walks;
  std::uint64_t skipgram;
  std::uint64_t classifier;
  std::uint64_t rb;
};
SeedStreams StreamsFor(std::uint64_t seed);

struct SeedMetrics {
  std::uint64_t seed = 0;
  double acc = 0.0;
  std::optional<double> ddi;  // empty when undefined
  std::string ddi_note;
  std::optional<double> dber;
  std::optional<double> min_dber_bound;
  double rb = 0.0;
  double dyadic_rb = 0.0;
  AssumptionDiagnostics diagnostics;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for one value
  std::size_t count = 0;
};
MetricSummary Summarize(const std::vector<double>& values);

struct VariantReport {
  std::string name;  // "original" or "repaired"
  AssortativityResult assortativity;
  std::vector<SeedMetrics> seeds;
};

// Embeds `graph` with the test positives of `split` removed.
EmbeddingMatrix EmbedForSplit(const Graph& graph, const EdgeSplit& split,
                              const PipelineConfig& config, std::uint64_t seed);

// Link prediction, DDI, DBER, RB and DyadicRB of one embedding. The split,
// sensitive values and edge set always come from the original graph.
SeedMetrics EvaluateEmbedding(const Eigen::MatrixXd& vectors, const Graph& original,
                              const EdgeSplit& split, const PipelineConfig& config,
                              std::uint64_t seed);

Json VariantToJson(const VariantReport& variant);

// CSV of (id, proj_1..proj_k, label).
std::string ProjectionTable(const Eigen::MatrixXd& features,
                            const std::vector<std::string>& ids,
                            const std::vector<std::string>& labels, Index k = 2);

// Node projection coloured by group name and pair projection over the
// original edges coloured by same/different.
std::string NodeProjection(const Eigen::MatrixXd& vectors, const Graph& graph, Index k = 2);
std::string PairProjection(const Eigen::MatrixXd& vectors, const Graph& graph, Index k = 2);

// Loads, repairs, then per seed splits, embeds and evaluates both the
// original graph and the repaired one on the identical split. Writes
// report.json, report.csv, the repaired graph, embeddings and projection
// tables under config.output. On failure leaves a FAILED marker and throws
// StageError.
Json RunPipeline(const PipelineConfig& config);

// Flat CSV rows: variant, seed, metrics, plus mean and std rows.
std::string ReportCsv(const Json& report);

// Side-by-side mean +- std of ACC, DDI, DBER, RB, DyadicRB and AC, one
// column per variant of each report. Throws on dataset mismatch.
struct ComparisonTable {
  std::vector<std::string> columns;
  std::vector<std::string> metrics;
  // cells[metric][column]: mean and std, empty when missing.
  std::vector<std::vector<std::optional<MetricSummary>>> cells;

  std::string ToText() const;
  std::string ToCsv() const;
};
ComparisonTable CompareRuns(const std::vector<Json>& reports,
                            const std::vector<std::string>& names);

}  // namespace dyadicot

#endif  // DYADICOT_PIPELINE_H_
