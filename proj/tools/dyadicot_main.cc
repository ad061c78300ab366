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

// Command-line front end: ingest, repair, embed, evaluate, pipeline, compare,
// project and synth subcommands over the dyadicot library.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "dyadicot/embed.h"
#include "dyadicot/graph.h"
#include "dyadicot/io.h"
#include "dyadicot/metrics.h"
#include "dyadicot/pipeline.h"
#include "dyadicot/repair.h"

namespace dyadicot {
namespace {

namespace fs = std::filesystem;

struct Options {
  PipelineConfig config;
  std::string mode = "auto";
  std::string solver = "auto";
  std::string combiner = "hadamard";
  std::optional<double> threshold;

  // Subcommand-specific.
  std::uint64_t seed = 0;
  fs::path split_dataset;
  std::string format = "binary";
  bool no_holdout = false;
  fs::path embedding;
  fs::path graph;
  std::string name = "embedding";
  Index k = 2;
  std::vector<std::string> reports;
  std::vector<std::string> names;
  std::string kind = "ring";
  BlockModelParams block;
  RingGraphParams ring;
};

void Finalize(Options& o) {
  o.config.repair.mode = ParseRepairMode(o.mode);
  o.config.repair.solver.kind = ParseSolverKind(o.solver);
  o.config.combiner = ParseEdgeCombiner(o.combiner);
  o.config.repair.threshold = o.threshold;
  o.config.repair.jobs = o.config.jobs;
  o.config.walks.jobs = o.config.jobs;
}

Graph LoadGraph(const fs::path& dir) {
  const DatasetFiles files = FindDatasetFiles(dir);
  Graph graph = LoadDataset(files.nodes, files.edges);
  ValidateGraph(graph);
  return graph;
}

void RequireDataset(const Options& o) {
  if (o.config.dataset.empty()) throw InvalidArgumentError("--dataset is required");
}

void RequireOut(const Options& o) {
  if (o.config.output.empty()) throw InvalidArgumentError("--out is required");
}

int RunIngest(Options& o) {
  RequireDataset(o);
  const Graph graph = LoadGraph(o.config.dataset);
  Json stats = {{"dataset", DatasetName(o.config.dataset)},
                {"nodes", graph.NumNodes()},
                {"edges", graph.NumEdges()},
                {"attributes", graph.NumAttributes()},
                {"groups", graph.Groups().size()}};
  if (graph.NumEdges() > 0) stats["assortativity"] = Assortativity(graph).value;
  if (!o.config.output.empty()) {
    WriteDataset(graph, o.config.output, false);
    WriteStringToFile(o.config.output / "stats.json", stats.dump(2) + "\n");
  }
  std::cout << stats.dump(2) << "\n";
  return 0;
}

int RunRepair(Options& o) {
  RequireDataset(o);
  RequireOut(o);
  const Graph graph = LoadGraph(o.config.dataset);
  const RepairedGraph repaired = RepairGraph(graph, o.config.repair);
  WriteDataset(repaired.graph, o.config.output, true);
  const Json meta = {{"dataset", DatasetName(o.config.dataset)},
                     {"repair", RepairMetaJson(repaired.meta)},
                     {"assortativity",
                      {{"original", Assortativity(graph).value},
                       {"repaired", Assortativity(repaired.graph).value}}}};
  WriteStringToFile(o.config.output / "meta.json", meta.dump(2) + "\n");
  std::cout << meta.dump(2) << "\n";
  return 0;
}

void CheckSameNodes(const Graph& a, const Graph& b) {
  if (a.node_ids != b.node_ids) {
    throw InvalidArgumentError("graphs do not share the same node ids in the same order");
  }
}

int RunEmbed(Options& o) {
  RequireDataset(o);
  RequireOut(o);
  const Graph graph = LoadGraph(o.config.dataset);
  EdgeSplit split;
  if (!o.no_holdout) {
    const Graph reference =
        o.split_dataset.empty() ? graph : LoadGraph(o.split_dataset);
    CheckSameNodes(graph, reference);
    split = SplitEdges(reference, o.config.test_fraction, StreamsFor(o.seed).split);
  }
  const EmbeddingMatrix embedding = EmbedForSplit(graph, split, o.config, o.seed);
  if (o.format == "text") {
    WriteEmbeddingText(embedding.vectors, graph.node_ids, o.config.output);
  } else if (o.format == "binary") {
    WriteEmbeddingBinary(embedding.vectors, embedding.seed, o.config.output);
  } else {
    throw InvalidArgumentError("unknown format '" + o.format + "'");
  }
  std::cout << "wrote " << embedding.vectors.rows() << " x " << embedding.vectors.cols()
            << " embedding to " << o.config.output.string() << "\n";
  return 0;
}

// Embedding rows in the node order of `graph`.
Eigen::MatrixXd LoadEmbeddingFor(const fs::path& path, const Graph& graph) {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors = ReadEmbedding(path, &ids);
  if (vectors.rows() != graph.NumNodes()) {
    throw FormatError("embedding has " + std::to_string(vectors.rows()) + " rows, graph has " +
                      std::to_string(graph.NumNodes()) + " nodes");
  }
  if (ids.empty()) return vectors;
  std::unordered_map<std::string, Index> row_of;
  for (std::size_t r = 0; r < ids.size(); ++r) row_of.emplace(ids[r], static_cast<Index>(r));
  Eigen::MatrixXd ordered(vectors.rows(), vectors.cols());
  for (Index i = 0; i < graph.NumNodes(); ++i) {
    auto it = row_of.find(graph.node_ids[i]);
    if (it == row_of.end()) {
      throw FormatError("embedding lacks node id '" + graph.node_ids[i] + "'");
    }
    ordered.row(i) = vectors.row(it->second);
  }
  return ordered;
}

int RunEvaluate(Options& o) {
  RequireDataset(o);
  RequireOut(o);
  if (o.embedding.empty()) throw InvalidArgumentError("--embedding is required");
  const Graph original = LoadGraph(o.config.dataset);
  const Eigen::MatrixXd vectors = LoadEmbeddingFor(o.embedding, original);
  const EdgeSplit split =
      SplitEdges(original, o.config.test_fraction, StreamsFor(o.seed).split);
  VariantReport variant;
  variant.name = o.name;
  if (o.graph.empty()) {
    variant.assortativity = Assortativity(original);
  } else {
    const Graph embedded = LoadGraph(o.graph);
    CheckSameNodes(original, embedded);
    variant.assortativity = Assortativity(embedded);
  }
  variant.seeds.push_back(EvaluateEmbedding(vectors, original, split, o.config, o.seed));
  PipelineConfig echo = o.config;
  echo.seeds = {o.seed};
  Json report;
  report["tool"] = "dyadicot";
  report["code_version"] = CodeVersion();
  report["dataset"] = {{"name", DatasetName(o.config.dataset)},
                       {"nodes", original.NumNodes()},
                       {"edges", original.NumEdges()},
                       {"attributes", original.NumAttributes()},
                       {"groups", original.Groups().size()}};
  report["config"] = ConfigToJson(echo);
  report["embedding"] = o.embedding.string();
  report["variants"] = Json::array({VariantToJson(variant)});
  WriteStringToFile(o.config.output / "report.json", report.dump(2) + "\n");
  WriteStringToFile(o.config.output / "report.csv", ReportCsv(report));
  std::cout << ReportCsv(report);
  return 0;
}

int RunPipelineCommand(Options& o) {
  const Json report = RunPipeline(o.config);
  std::cout << CompareRuns({report}, {"run"}).ToText();
  std::cout << "report: " << (o.config.output / "report.json").string() << "\n";
  return 0;
}

int RunCompare(Options& o) {
  if (o.reports.empty()) throw InvalidArgumentError("compare: no reports given");
  std::vector<Json> reports;
  std::vector<std::string> names = o.names;
  if (!names.empty() && names.size() != o.reports.size()) {
    throw InvalidArgumentError("compare: --names needs one entry per report");
  }
  for (const std::string& path : o.reports) {
    Json j = Json::parse(ReadTextFile(path), nullptr, false);
    if (j.is_discarded()) throw FormatError("compare: " + path + " is not valid JSON");
    reports.push_back(std::move(j));
    if (o.names.empty()) {
      fs::path p(path);
      names.push_back(p.filename() == "report.json" ? p.parent_path().filename().string()
                                                    : p.stem().string());
    }
  }
  const ComparisonTable table = CompareRuns(reports, names);
  std::cout << table.ToText();
  if (!o.config.output.empty()) WriteStringToFile(o.config.output, table.ToCsv());
  return 0;
}

int RunProject(Options& o) {
  RequireDataset(o);
  RequireOut(o);
  if (o.embedding.empty()) throw InvalidArgumentError("--embedding is required");
  const Graph graph = LoadGraph(o.config.dataset);
  const Eigen::MatrixXd vectors = LoadEmbeddingFor(o.embedding, graph);
  WriteStringToFile(o.config.output / "nodes.csv", NodeProjection(vectors, graph, o.k));
  WriteStringToFile(o.config.output / "pairs.csv", PairProjection(vectors, graph, o.k));
  std::cout << "wrote " << (o.config.output / "nodes.csv").string() << " and "
            << (o.config.output / "pairs.csv").string() << "\n";
  return 0;
}

int RunSynth(Options& o) {
  RequireOut(o);
  Graph graph;
  if (o.kind == "block") {
    graph = SampleBlockModelGraph(o.block, o.seed);
  } else {
    o.ring.num_nodes = o.block.num_nodes;
    o.ring.num_groups = o.block.num_groups;
    o.ring.num_attributes = o.block.num_attributes;
    graph = SampleRingGraph(o.ring, o.seed);
  }
  WriteDataset(graph, o.config.output, false);
  std::cout << "wrote " << graph.NumNodes() << " nodes, " << graph.NumEdges()
            << " edges to " << o.config.output.string() << "\n";
  return 0;
}

void AddSharedOptions(CLI::App& app, Options& o) {
  PipelineConfig& c = o.config;
  app.set_config("--config", "", "Flat `key = value` file; command-line flags win");
  app.add_option("--dataset", c.dataset, "Dataset directory (nodes.tsv + edges.tsv or *.content + *.cites)");
  app.add_option("--out", c.output, "Output directory or file");
  app.add_option("--eta", c.repair.eta, "Attribute vs structure weight in the repair cost")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--mode", o.mode, "Repair mode")
      ->check(CLI::IsMember({"auto", "binary", "multiclass"}))
      ->capture_default_str();
  app.add_option("--solver", o.solver, "Transport solver")
      ->check(CLI::IsMember({"auto", "exact", "entropic"}))
      ->capture_default_str();
  app.add_option("--epsilon", c.repair.solver.sinkhorn.epsilon,
                 "Entropic regularisation (0 = 0.05 * median cost)")
      ->capture_default_str();
  app.add_option("--exact-limit", c.repair.solver.exact_limit,
                 "Largest side solved exactly when --solver auto")
      ->capture_default_str();
  app.add_option("--sinkhorn-max-iter", c.repair.solver.sinkhorn.max_iter)->capture_default_str();
  app.add_option("--sinkhorn-tol", c.repair.solver.sinkhorn.tol)->capture_default_str();
  app.add_option("--threshold", o.threshold, "Binarise repaired adjacency at this value")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--symmetrize", c.repair.symmetrize)->capture_default_str();
  app.add_option("--normalize-attributes", c.repair.normalize_attributes)->capture_default_str();
  app.add_option("--barycenter-iters", c.repair.barycenter_iters)->capture_default_str();
  app.add_option("--repair-seed", c.repair.seed, "Seed of the barycenter initialisation")
      ->capture_default_str();
  app.add_option("--seeds", c.seeds, "Run seeds")->delimiter(',')->capture_default_str();
  app.add_option("--test-fraction", c.test_fraction)->capture_default_str();
  app.add_option("--rb-train-fraction", c.rb_train_fraction)->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--dim", c.skipgram.dim)->capture_default_str();
  app.add_option("--num-walks", c.walks.num_walks)->capture_default_str();
  app.add_option("--walk-length", c.walks.walk_length)->capture_default_str();
  app.add_option("--p", c.walks.p, "Return parameter")->capture_default_str();
  app.add_option("--q", c.walks.q, "In-out parameter")->capture_default_str();
  app.add_option("--window", c.skipgram.window)->capture_default_str();
  app.add_option("--negatives", c.skipgram.negatives)->capture_default_str();
  app.add_option("--epochs", c.skipgram.epochs)->capture_default_str();
  app.add_option("--lr", c.skipgram.learning_rate)->capture_default_str();
  app.add_option("--combiner", o.combiner, "Pair features for link prediction")
      ->check(CLI::IsMember({"hadamard", "concat"}))
      ->capture_default_str();
  app.add_option("--l2", c.classifier.l2)->capture_default_str();
  app.add_option("--classifier-iters", c.classifier.max_iters)->capture_default_str();
  app.add_option("--write-embeddings", c.write_embeddings)->capture_default_str();
  app.add_option("--write-projections", c.write_projections)->capture_default_str();
}

}  // namespace
}  // namespace dyadicot

int main(int argc, char** argv) {
  using namespace dyadicot;
  CLI::App app{"dyadicot: optimal-transport graph repair for dyadic fairness"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  AddSharedOptions(app, o);
  app.set_config("--config", "", "Flat key = value file (keys are the long flag names)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto* ingest = app.add_subcommand("ingest", "Load, validate and summarise a dataset");
  auto* repair = app.add_subcommand("repair", "Repair a dataset and write the repaired graph");
  auto* embed = app.add_subcommand("embed", "Train a node embedding");
  embed->add_option("--seed", o.seed, "Run seed (split, walks, training)");
  embed->add_option("--split-dataset", o.split_dataset,
                    "Graph whose held-out edges are removed (default: --dataset)");
  embed->add_flag("--no-holdout", o.no_holdout, "Embed the full graph");
  embed->add_option("--format", o.format)->check(CLI::IsMember({"binary", "text"}));
  auto* evaluate = app.add_subcommand("evaluate", "Score an embedding against a dataset");
  evaluate->add_option("--embedding", o.embedding)->required();
  evaluate->add_option("--seed", o.seed);
  evaluate->add_option("--graph", o.graph, "Embedded graph, for its assortativity");
  evaluate->add_option("--name", o.name, "Column name in the report");
  auto* pipeline = app.add_subcommand("pipeline", "Repair, embed and evaluate with a control");
  auto* compare = app.add_subcommand("compare", "Tabulate reports side by side");
  compare->add_option("reports", o.reports, "report.json files")->required();
  compare->add_option("--names", o.names, "Column names")->delimiter(',');
  auto* project = app.add_subcommand("project", "PCA projection tables of an embedding");
  project->add_option("--embedding", o.embedding)->required();
  project->add_option("--k", o.k)->check(CLI::PositiveNumber);
  auto* synth = app.add_subcommand("synth", "Write a synthetic homophilous attributed graph");
  synth->add_option("--kind", o.kind, "ring: local ring lattice; block: stochastic block model")
      ->check(CLI::IsMember({"ring", "block"}));
  synth->add_option("--nodes", o.block.num_nodes);
  synth->add_option("--groups", o.block.num_groups);
  synth->add_option("--attributes", o.block.num_attributes);
  synth->add_option("--p-in", o.block.p_in);
  synth->add_option("--p-out", o.block.p_out);
  synth->add_option("--neighbors", o.ring.neighbors);
  synth->add_option("--p-local", o.ring.p_local);
  synth->add_option("--p-random", o.ring.p_random);
  synth->add_option("--mix", o.ring.mix, "Share of ring nodes with a random group");
  synth->add_option("--seed", o.seed);

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  try {
    Finalize(o);
    if (chosen == ingest) return RunIngest(o);
    if (chosen == repair) return RunRepair(o);
    if (chosen == embed) return RunEmbed(o);
    if (chosen == evaluate) return RunEvaluate(o);
    if (chosen == pipeline) return RunPipelineCommand(o);
    if (chosen == compare) return RunCompare(o);
    if (chosen == project) return RunProject(o);
    if (chosen == synth) return RunSynth(o);
  } catch (const StageError& e) {
    std::cerr << "dyadicot " << chosen->get_name() << " failed at stage [" << e.stage()
              << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dyadicot " << chosen->get_name() << " failed: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
