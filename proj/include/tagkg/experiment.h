#ifndef TAGKG_EXPERIMENT_H_
#define TAGKG_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tagkg/dataset.h"
#include "tagkg/kgbuild.h"
#include "tagkg/metrics.h"
#include "tagkg/ontology.h"
#include "tagkg/tagging.h"

namespace tagkg {

// One roster entry: a model variant plus the label-graph relations it sees.
struct ModelSpec {
  std::string name;
  ModelVariant variant = ModelVariant::kDgcn;
  std::vector<RelationSelector> relations;
};

// baseline_no_kg, gcn_temporal, gcn_ontology, gcn_merged, dgcn.
std::vector<ModelSpec> DefaultRoster();
ModelSpec FindRosterEntry(std::string_view name);

// Label graph for `relations` in dataset label order. Labels must all be
// ontology tags; tags that are not labels are dropped before normalization.
LabelGraph BuildLabelGraph(const TagOntology &ontology, const TemporalKG &kg,
                           const std::vector<std::string> &label_ids,
                           const std::vector<RelationSelector> &relations,
                           const AdjacencyOptions &opts);

struct ExperimentConfig {
  double fraction = 0.01;
  std::vector<uint64_t> seeds = {0, 1, 2};
  std::vector<std::string> models;  // empty = full roster
  int epochs = 30;
  int batch_size = 32;
  std::optional<double> learning_rate;  // default: per-variant
  ModelConfig model;  // variant, d_feat and n_labels are filled per run
  AdjacencyOptions adjacency;
  std::vector<double> group_bounds = {5, 20, 50};
  std::string reference_model = "baseline_no_kg";
  std::string target_model = "dgcn";
};

struct RunResult {
  std::string model;
  uint64_t seed = 0;
  EvalReport report;
  std::vector<EpochLog> log;
  size_t num_parameters = 0;
  double seconds = 0;  // wall time, not part of any written file
};

struct ModelSummary {
  std::string model;
  double map = 0, mauc = 0, micro_auprc = 0, macro_auprc = 0;  // seed means
  double map_std = 0;
  std::optional<double> rel_improvement;  // mAP vs the reference model, %
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // seed-major, roster order
  std::vector<ModelSummary> summary;
  std::vector<std::vector<long long>> train_counts;  // per seed, per class
  std::optional<GroupDelta> ap_delta;   // target vs reference, pooled seeds
  std::optional<GroupDelta> auc_delta;

  const ModelSummary *Find(std::string_view model) const;
  std::string TableCsv() const;
  std::string TableMarkdown(double fraction) const;
};

ExperimentResult RunExperiment(const SplitDataset &data, const TagOntology &ontology,
                               const TemporalKG &kg, const ExperimentConfig &config,
                               std::ostream *progress = nullptr);

// Writes per-run reports and logs, group deltas (CSV + SVG) and the
// comparison tables under dir.
void SaveExperiment(const ExperimentResult &result, const SplitDataset &data,
                    const ExperimentConfig &config, const std::string &dir);

}  // namespace tagkg

#endif  // TAGKG_EXPERIMENT_H_
