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

#include "dyadicot/pipeline.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dyadicot/io.h"
#include "dyadicot/random.h"

#ifndef DYADICOT_CODE_VERSION
#define DYADICOT_CODE_VERSION "unknown"
#endif

namespace dyadicot {

std::string CodeVersion() { return DYADICOT_CODE_VERSION; }

void ValidatePipelineConfig(const PipelineConfig& config) {
  if (config.seeds.empty()) throw InvalidArgumentError("config: seeds must not be empty");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw InvalidArgumentError("config: test_fraction must lie in (0, 1)");
  }
  if (!(config.rb_train_fraction > 0.0 && config.rb_train_fraction < 1.0)) {
    throw InvalidArgumentError("config: rb_train_fraction must lie in (0, 1)");
  }
  if (config.jobs < 1) throw InvalidArgumentError("config: jobs must be >= 1");
  if (config.dataset.empty()) throw InvalidArgumentError("config: dataset is required");
  if (config.output.empty()) throw InvalidArgumentError("config: output is required");
  ValidateRepairConfig(config.repair);
  ValidateWalkParams(config.walks);
  ValidateSkipGramParams(config.skipgram);
}

Json ConfigToJson(const PipelineConfig& config) {
  Json j;
  j["dataset"] = config.dataset.string();
  j["output"] = config.output.string();
  const RepairConfig& r = config.repair;
  j["repair"] = {
      {"eta", r.eta},
      {"mode", ToString(r.mode)},
      {"solver", ToString(r.solver.kind)},
      {"exact_limit", r.solver.exact_limit},
      {"epsilon", r.solver.sinkhorn.epsilon},
      {"sinkhorn_max_iter", r.solver.sinkhorn.max_iter},
      {"sinkhorn_tol", r.solver.sinkhorn.tol},
      {"symmetrize", r.symmetrize},
      {"threshold", r.threshold ? Json(*r.threshold) : Json(nullptr)},
      {"normalize_attributes", r.normalize_attributes},
      {"seed", r.seed},
      {"barycenter_iters", r.barycenter_iters},
  };
  j["walks"] = {{"num_walks", config.walks.num_walks},
                {"walk_length", config.walks.walk_length},
                {"p", config.walks.p},
                {"q", config.walks.q}};
  j["skipgram"] = {{"dim", config.skipgram.dim},
                   {"window", config.skipgram.window},
                   {"negatives", config.skipgram.negatives},
                   {"epochs", config.skipgram.epochs},
                   {"learning_rate", config.skipgram.learning_rate}};
  j["combiner"] = ToString(config.combiner);
  j["classifier"] = {{"l2", config.classifier.l2},
                     {"max_iters", config.classifier.max_iters},
                     {"tolerance", config.classifier.tolerance},
                     {"standardize", config.classifier.standardize}};
  j["test_fraction"] = config.test_fraction;
  j["rb_train_fraction"] = config.rb_train_fraction;
  j["seeds"] = config.seeds;
  return j;
}

SeedStreams StreamsFor(std::uint64_t seed) {
  return {seed, DeriveSeed(seed, 101), DeriveSeed(seed, 102), DeriveSeed(seed, 103),
          DeriveSeed(seed, 104)};
}

MetricSummary Summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

EmbeddingMatrix EmbedForSplit(const Graph& graph, const EdgeSplit& split,
                              const PipelineConfig& config, std::uint64_t seed) {
  const SeedStreams streams = StreamsFor(seed);
  const Graph train_graph = RemovePairs(graph, split.test_pos);
  WalkParams walks = config.walks;
  walks.seed = streams.walks;
  walks.jobs = config.jobs;
  SkipGramParams skipgram = config.skipgram;
  skipgram.seed = streams.skipgram;
  return TrainSkipGram(RandomWalks(train_graph, walks), skipgram);
}

SeedMetrics EvaluateEmbedding(const Eigen::MatrixXd& vectors, const Graph& original,
                              const EdgeSplit& split, const PipelineConfig& config,
                              std::uint64_t seed) {
  const SeedStreams streams = StreamsFor(seed);
  ClassifierParams params = config.classifier;
  params.seed = streams.classifier;
  SeedMetrics m;
  m.seed = seed;
  const LinkPredictionResult lp =
      LinkPredictionEval(vectors, original, split, config.combiner, streams.classifier, params);
  m.acc = lp.accuracy;
  try {
    m.ddi = Ddi(lp.sample);
  } catch (const UndefinedMetricError& e) {
    m.ddi_note = e.what();
  }
  try {
    m.dber = Dber(lp.sample);
    m.min_dber_bound = MinDberBound(lp.sample);
  } catch (const UndefinedMetricError& e) {
    if (m.ddi_note.empty()) m.ddi_note = e.what();
  }
  m.diagnostics = DiagnoseAssumptions(lp.sample);
  params.seed = streams.rb;
  m.rb = RepresentationBias(vectors, original.sensitive, config.rb_train_fraction,
                            streams.rb, params);
  m.dyadic_rb = DyadicRb(vectors, original.Edges(), original.sensitive,
                         config.rb_train_fraction, streams.rb, params);
  return m;
}

namespace {

Json Optional(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json SummaryJson(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

template <typename Get>
MetricSummary SummarizeField(const std::vector<SeedMetrics>& seeds, Get get) {
  std::vector<double> values;
  for (const SeedMetrics& m : seeds) {
    const std::optional<double> v = get(m);
    if (v) values.push_back(*v);
  }
  return Summarize(values);
}

}  // namespace

Json VariantToJson(const VariantReport& variant) {
  Json j;
  j["name"] = variant.name;
  j["assortativity"] = {{"value", variant.assortativity.value},
                        {"degenerate", variant.assortativity.degenerate}};
  Json seeds = Json::array();
  for (const SeedMetrics& m : variant.seeds) {
    Json s;
    s["seed"] = m.seed;
    s["acc"] = m.acc;
    s["ddi"] = Optional(m.ddi);
    if (!m.ddi_note.empty()) s["ddi_note"] = m.ddi_note;
    s["dber"] = Optional(m.dber);
    s["min_dber_bound"] = Optional(m.min_dber_bound);
    s["rb"] = m.rb;
    s["dyadic_rb"] = m.dyadic_rb;
    const AssumptionDiagnostics& d = m.diagnostics;
    s["diagnostics"] = {{"xor_rate", d.xor_rate},
                        {"xor_ci", {d.xor_ci_low, d.xor_ci_high}},
                        {"equivalence_holds", d.equivalence_holds},
                        {"intra_rate", d.intra_rate},
                        {"inter_rate", d.inter_rate},
                        {"propensity_holds", d.propensity_holds}};
    seeds.push_back(std::move(s));
  }
  j["seeds"] = std::move(seeds);
  const auto& v = variant.seeds;
  Json summary;
  summary["acc"] = SummaryJson(SummarizeField(v, [](const SeedMetrics& m) {
    return std::optional<double>(m.acc);
  }));
  summary["ddi"] = SummaryJson(SummarizeField(v, [](const SeedMetrics& m) { return m.ddi; }));
  summary["dber"] = SummaryJson(SummarizeField(v, [](const SeedMetrics& m) { return m.dber; }));
  summary["min_dber_bound"] = SummaryJson(
      SummarizeField(v, [](const SeedMetrics& m) { return m.min_dber_bound; }));
  summary["rb"] = SummaryJson(SummarizeField(v, [](const SeedMetrics& m) {
    return std::optional<double>(m.rb);
  }));
  summary["dyadic_rb"] = SummaryJson(SummarizeField(v, [](const SeedMetrics& m) {
    return std::optional<double>(m.dyadic_rb);
  }));
  summary["ac"] = SummaryJson(Summarize({variant.assortativity.value}));
  j["summary"] = std::move(summary);
  return j;
}

std::string ProjectionTable(const Eigen::MatrixXd& features,
                            const std::vector<std::string>& ids,
                            const std::vector<std::string>& labels, Index k) {
  if (features.rows() == 0) throw InvalidArgumentError("projection: missing embedding");
  if (static_cast<Index>(ids.size()) != features.rows() ||
      static_cast<Index>(labels.size()) != features.rows()) {
    throw InvalidArgumentError("projection: id/label count does not match rows");
  }
  const PcaResult pca = Pca(features, k);
  std::string out = "id";
  for (Index c = 0; c < k; ++c) out += ",proj_" + std::to_string(c + 1);
  out += ",label\n";
  for (Index i = 0; i < features.rows(); ++i) {
    out += ids[i];
    for (Index c = 0; c < k; ++c) out += "," + FormatDouble(pca.projection(i, c));
    out += "," + labels[i] + "\n";
  }
  return out;
}

namespace {

std::string NodeId(const Graph& graph, Index i) {
  return graph.node_ids.empty() ? std::to_string(i) : graph.node_ids[i];
}

std::string GroupName(const Graph& graph, Index i) {
  const int s = graph.sensitive(i);
  return s >= 0 && s < static_cast<int>(graph.group_names.size()) ? graph.group_names[s]
                                                                   : std::to_string(s);
}

}  // namespace

std::string NodeProjection(const Eigen::MatrixXd& vectors, const Graph& graph, Index k) {
  std::vector<std::string> ids, labels;
  for (Index i = 0; i < graph.NumNodes(); ++i) {
    ids.push_back(NodeId(graph, i));
    labels.push_back(GroupName(graph, i));
  }
  return ProjectionTable(vectors, ids, labels, k);
}

std::string PairProjection(const Eigen::MatrixXd& vectors, const Graph& graph, Index k) {
  const std::vector<NodePair> edges = graph.Edges();
  std::vector<std::string> ids, labels;
  for (const NodePair& e : edges) {
    ids.push_back(NodeId(graph, e.u) + ":" + NodeId(graph, e.v));
    labels.push_back(graph.sensitive(e.u) == graph.sensitive(e.v) ? "same" : "different");
  }
  return ProjectionTable(EdgeFeatures(vectors, edges, EdgeCombiner::kConcat), ids, labels, k);
}

std::string DatasetName(const std::filesystem::path& dir) {
  const auto meta = dir / "meta.json";
  if (std::filesystem::exists(meta)) {
    const Json j = Json::parse(ReadTextFile(meta), nullptr, false);
    if (j.is_object() && j.contains("dataset") && j["dataset"].is_string()) {
      return j["dataset"].get<std::string>();
    }
  }
  auto name = dir.filename();
  if (name.empty()) name = dir.parent_path().filename();
  return name.string();
}

Json RepairMetaJson(const RepairMeta& meta) {
  return {{"mode", ToString(meta.mode)},
          {"eta", meta.eta},
          {"solvers", meta.solvers},
          {"plan_objectives", meta.plan_objectives},
          {"plans_converged", meta.plans_converged},
          {"barycenter_objectives", meta.barycenter_objectives},
          {"barycenter_iterations", meta.barycenter_iterations}};
}

Json RunPipeline(const PipelineConfig& config) {
  std::string stage = "config";
  const std::filesystem::path failed = config.output / "FAILED";
  try {
    ValidatePipelineConfig(config);
    std::filesystem::create_directories(config.output);
    std::filesystem::remove(failed);

    stage = "load";
    const DatasetFiles files = FindDatasetFiles(config.dataset);
    const Graph graph = LoadDataset(files.nodes, files.edges);
    ValidateGraph(graph);
    const std::string dataset_name = DatasetName(config.dataset);

    stage = "repair";
    RepairConfig repair_config = config.repair;
    repair_config.jobs = config.jobs;
    const RepairedGraph repaired = RepairGraph(graph, repair_config);
    WriteDataset(repaired.graph, config.output / "repaired", true);
    WriteStringToFile(config.output / "repaired" / "meta.json",
                      Json{{"dataset", dataset_name},
                           {"repair", RepairMetaJson(repaired.meta)}}
                              .dump(2) +
                          "\n");

    stage = "assortativity";
    VariantReport original{"original", Assortativity(graph), {}};
    VariantReport fixed{"repaired", Assortativity(repaired.graph), {}};

    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      const std::uint64_t seed = config.seeds[s];
      stage = "split (seed " + std::to_string(seed) + ")";
      const EdgeSplit split = SplitEdges(graph, config.test_fraction, StreamsFor(seed).split);
      for (VariantReport* variant : {&original, &fixed}) {
        const Graph& source = variant == &original ? graph : repaired.graph;
        stage = "embed " + variant->name + " (seed " + std::to_string(seed) + ")";
        const EmbeddingMatrix embedding = EmbedForSplit(source, split, config, seed);
        stage = "evaluate " + variant->name + " (seed " + std::to_string(seed) + ")";
        variant->seeds.push_back(
            EvaluateEmbedding(embedding.vectors, graph, split, config, seed));
        stage = "write " + variant->name + " (seed " + std::to_string(seed) + ")";
        if (config.write_embeddings) {
          WriteEmbeddingBinary(embedding.vectors, embedding.seed,
                               config.output / "embeddings" /
                                   (variant->name + "_seed" + std::to_string(seed) + ".emb"));
        }
        if (config.write_projections && s == 0) {
          const auto dir = config.output / "projections";
          WriteStringToFile(dir / (variant->name + "_nodes.csv"),
                            NodeProjection(embedding.vectors, graph));
          WriteStringToFile(dir / (variant->name + "_pairs.csv"),
                            PairProjection(embedding.vectors, graph));
        }
      }
    }

    stage = "report";
    Json report;
    report["tool"] = "dyadicot";
    report["code_version"] = CodeVersion();
    report["dataset"] = {{"name", dataset_name},
                         {"nodes", graph.NumNodes()},
                         {"edges", graph.NumEdges()},
                         {"attributes", graph.NumAttributes()},
                         {"groups", graph.Groups().size()}};
    report["config"] = ConfigToJson(config);
    report["repair"] = RepairMetaJson(repaired.meta);
    report["variants"] = Json::array({VariantToJson(original), VariantToJson(fixed)});
    WriteStringToFile(config.output / "report.json", report.dump(2) + "\n");
    WriteStringToFile(config.output / "report.csv", ReportCsv(report));
    return report;
  } catch (const std::exception& e) {
    if (!config.output.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(config.output, ec);
      std::ofstream marker(failed);
      marker << stage << ": " << e.what() << "\n";
    }
    throw StageError(stage, e.what());
  }
}

namespace {

std::string CsvNumber(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return FormatDouble(v.get<double>());
  return v.dump();
}

const char* kCsvMetrics[] = {"acc", "ddi", "dber", "min_dber_bound", "rb", "dyadic_rb"};

}  // namespace

std::string ReportCsv(const Json& report) {
  std::string out = "variant,seed,acc,ddi,dber,min_dber_bound,rb,dyadic_rb,ac\n";
  for (const Json& variant : report.at("variants")) {
    const std::string name = variant.at("name").get<std::string>();
    const std::string ac = CsvNumber(variant.at("assortativity").at("value"));
    for (const Json& s : variant.at("seeds")) {
      out += name + "," + CsvNumber(s.at("seed"));
      for (const char* m : kCsvMetrics) out += "," + CsvNumber(s.at(m));
      out += "," + ac + "\n";
    }
    for (const char* stat : {"mean", "std"}) {
      out += name + "," + stat;
      for (const char* m : kCsvMetrics) {
        const Json& summary = variant.at("summary").at(m);
        out += "," + (summary.at("count").get<std::size_t>() > 0
                          ? CsvNumber(summary.at(stat))
                          : std::string());
      }
      out += "," + CsvNumber(variant.at("summary").at("ac").at(stat)) + "\n";
    }
  }
  return out;
}

namespace {

const char* kCompareMetrics[] = {"acc", "ddi", "dber", "rb", "dyadic_rb", "ac"};
const char* kCompareLabels[] = {"ACC", "DDI", "DBER", "RB", "DyadicRB", "AC"};

std::string Fixed3(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", v);
  return buffer;
}

}  // namespace

ComparisonTable CompareRuns(const std::vector<Json>& reports,
                            const std::vector<std::string>& names) {
  if (reports.size() != names.size()) {
    throw InvalidArgumentError("compare: one name per report is required");
  }
  ComparisonTable table;
  for (std::size_t m = 0; m < std::size(kCompareMetrics); ++m) {
    table.metrics.push_back(kCompareLabels[m]);
  }
  table.cells.resize(table.metrics.size());
  std::optional<std::string> dataset;
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const Json& report = reports[r];
    if (!report.contains("variants") || !report.contains("dataset")) {
      throw FormatError("compare: " + names[r] + " is not a report");
    }
    const std::string name = report.at("dataset").at("name").get<std::string>();
    if (dataset && *dataset != name) {
      throw InvalidArgumentError("compare: dataset mismatch ('" + *dataset + "' vs '" +
                                 name + "')");
    }
    dataset = name;
    const Json& variants = report.at("variants");
    for (const Json& variant : variants) {
      std::string column = names[r];
      if (variants.size() > 1) column += "/" + variant.at("name").get<std::string>();
      table.columns.push_back(column);
      for (std::size_t m = 0; m < std::size(kCompareMetrics); ++m) {
        const Json& s = variant.at("summary").at(kCompareMetrics[m]);
        std::optional<MetricSummary> cell;
        if (s.at("count").get<std::size_t>() > 0) {
          cell = MetricSummary{s.at("mean").get<double>(), s.at("std").get<double>(),
                               s.at("count").get<std::size_t>()};
        }
        table.cells[m].push_back(cell);
      }
    }
  }
  if (table.columns.size() < 2) {
    throw InvalidArgumentError("compare: need at least two runs to compare");
  }
  return table;
}

std::string ComparisonTable::ToText() const {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"metric"});
  for (const auto& c : columns) grid.back().push_back(c);
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    grid.push_back({metrics[m]});
    for (const auto& cell : cells[m]) {
      grid.back().push_back(cell ? Fixed3(cell->mean) + " +- " + Fixed3(cell->std) : "n/a");
    }
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      out += grid[r][c] + std::string(width[c] - grid[r][c].size(), ' ');
      out += c + 1 < grid[r].size() ? "  " : "\n";
    }
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  return out;
}

std::string ComparisonTable::ToCsv() const {
  std::string out = "metric";
  for (const auto& c : columns) out += "," + c + "_mean," + c + "_std";
  out += "\n";
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    out += metrics[m];
    for (const auto& cell : cells[m]) {
      out += cell ? "," + FormatDouble(cell->mean) + "," + FormatDouble(cell->std) : ",,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace dyadicot
