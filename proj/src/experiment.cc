#include "tagkg/experiment.h"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "tagkg/rng.h"

namespace tagkg {

std::vector<ModelSpec> DefaultRoster() {
  using R = RelationSelector;
  return {
      {"baseline_no_kg", ModelVariant::kBaselineNoKg, {}},
      {"gcn_temporal", ModelVariant::kGcnSingle, {R::kTemporal}},
      {"gcn_ontology", ModelVariant::kGcnSingle, {R::kOntologyIsa}},
      {"gcn_merged", ModelVariant::kGcnMerged, {R::kMerged}},
      {"dgcn", ModelVariant::kDgcn, {R::kOntologyIsa, R::kTemporal}},
  };
}

ModelSpec FindRosterEntry(std::string_view name) {
  for (auto &m : DefaultRoster()) {
    if (m.name == name) return m;
  }
  throw Error("unknown model '" + std::string(name) + "'");
}

namespace {

// Keeps the non-zero pattern of `full` on `idx` and renormalizes rows.
Matrix Restrict(const Matrix &full, const std::vector<int> &idx) {
  const int n = static_cast<int>(idx.size());
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && full(idx[i], idx[j]) != 0.0) edges.emplace_back(i, j);
  return NormalizedAdjacency(n, edges, false);
}

double Mean(const std::vector<double> &v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double StdDev(const std::vector<double> &v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string Fixed(double x, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

}  // namespace

LabelGraph BuildLabelGraph(const TagOntology &ontology, const TemporalKG &kg,
                           const std::vector<std::string> &label_ids,
                           const std::vector<RelationSelector> &relations,
                           const AdjacencyOptions &opts) {
  if (kg.num_nodes() != ontology.size()) {
    throw DimensionError("temporal KG has " + std::to_string(kg.num_nodes()) +
                         " nodes, ontology has " + std::to_string(ontology.size()));
  }
  std::vector<int> idx;
  for (const auto &id : label_ids) {
    const int i = ontology.IndexOf(id);
    if (i < 0) throw Error("label '" + id + "' is not an ontology tag");
    idx.push_back(i);
  }
  LabelGraph graph;
  for (RelationSelector r : relations) {
    graph.adjacency.push_back(Restrict(BuildAdjacency(kg, r, opts, &ontology).matrix, idx));
    graph.relation_names.push_back(RelationSelectorName(r));
  }
  return graph;
}

const ModelSummary *ExperimentResult::Find(std::string_view model) const {
  for (const auto &s : summary) {
    if (s.model == model) return &s;
  }
  return nullptr;
}

ExperimentResult RunExperiment(const SplitDataset &data, const TagOntology &ontology,
                               const TemporalKG &kg, const ExperimentConfig &config,
                               std::ostream *progress) {
  data.train.Validate();
  data.eval.Validate();
  if (config.seeds.empty()) throw Error("no seeds given");
  if (config.epochs < 1) throw Error("epochs must be >= 1");
  std::vector<ModelSpec> roster;
  if (config.models.empty()) {
    roster = DefaultRoster();
  } else {
    for (const auto &m : config.models) roster.push_back(FindRosterEntry(m));
  }

  std::vector<LabelGraph> graphs;
  for (const auto &m : roster) {
    graphs.push_back(BuildLabelGraph(ontology, kg, data.label_ids, m.relations, config.adjacency));
  }

  ExperimentResult res;
  for (uint64_t seed : config.seeds) {
    const SubsampleResult sub = Subsample(data.train, config.fraction, seed);
    res.train_counts.push_back(sub.per_class_counts);
    if (progress) {
      *progress << "seed " << seed << ": " << sub.train.num_samples() << " training samples\n";
    }
    for (size_t k = 0; k < roster.size(); ++k) {
      const auto start = std::chrono::steady_clock::now();
      ModelConfig mc = config.model;
      mc.variant = roster[k].variant;
      mc.d_feat = data.train.d_feat();
      mc.n_labels = data.train.num_labels();
      // Same init stream for every variant: shared encoder draws come first.
      Rng rng = MakeRng(seed, "model.init");
      TaggingModel model = TaggingModel::Create(mc, graphs[k], rng);
      TrainConfig tc;
      tc.epochs = config.epochs;
      tc.batch_size = config.batch_size;
      tc.learning_rate = config.learning_rate.value_or(DefaultLearningRate(mc.variant));
      tc.seed = seed;
      RunResult run;
      run.model = roster[k].name;
      run.seed = seed;
      run.log = Train(model, sub.train, nullptr, tc);
      run.report = Evaluate(model.Predict(data.eval.features), data.eval.labels);
      run.num_parameters = model.NumParameters();
      run.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (progress) {
        *progress << "  " << run.model << ": mAP " << Fixed(run.report.map, 4) << " ("
                  << Fixed(run.seconds, 1) << " s)\n";
      }
      res.runs.push_back(std::move(run));
    }
  }

  const ModelSummary *reference = nullptr;
  for (const auto &m : roster) {
    std::vector<double> map, mauc, micro, macro;
    for (const auto &r : res.runs) {
      if (r.model != m.name) continue;
      map.push_back(r.report.map);
      mauc.push_back(r.report.mauc);
      micro.push_back(r.report.micro_auprc);
      macro.push_back(r.report.macro_auprc);
    }
    ModelSummary s;
    s.model = m.name;
    s.map = Mean(map);
    s.map_std = StdDev(map);
    s.mauc = Mean(mauc);
    s.micro_auprc = Mean(micro);
    s.macro_auprc = Mean(macro);
    res.summary.push_back(s);
  }
  for (const auto &s : res.summary) {
    if (s.model == config.reference_model) reference = &s;
  }
  if (reference != nullptr && reference->map > 0) {
    const double base = reference->map;
    for (auto &s : res.summary) s.rel_improvement = 100.0 * (s.map - base) / base;
  }

  // Pool (seed, class) items across seeds for the per-group analysis.
  std::vector<std::optional<double>> ap_a, ap_b, auc_a, auc_b;
  std::vector<long long> counts;
  for (size_t si = 0; si < config.seeds.size(); ++si) {
    const RunResult *a = nullptr, *b = nullptr;
    for (const auto &r : res.runs) {
      if (r.seed != config.seeds[si]) continue;
      if (r.model == config.reference_model) a = &r;
      if (r.model == config.target_model) b = &r;
    }
    if (a == nullptr || b == nullptr) continue;
    ap_a.insert(ap_a.end(), a->report.per_class_ap.begin(), a->report.per_class_ap.end());
    ap_b.insert(ap_b.end(), b->report.per_class_ap.begin(), b->report.per_class_ap.end());
    auc_a.insert(auc_a.end(), a->report.per_class_auc.begin(), a->report.per_class_auc.end());
    auc_b.insert(auc_b.end(), b->report.per_class_auc.begin(), b->report.per_class_auc.end());
    counts.insert(counts.end(), res.train_counts[si].begin(), res.train_counts[si].end());
  }
  if (!counts.empty()) {
    res.ap_delta = ComputeGroupDelta(ap_a, ap_b, counts, config.group_bounds);
    res.auc_delta = ComputeGroupDelta(auc_a, auc_b, counts, config.group_bounds);
  }
  return res;
}

std::string ExperimentResult::TableCsv() const {
  std::string out = "model,mAP,mAP_std,mAUC,micro_AUPRC,macro_AUPRC,rel_improvement_pct\n";
  for (const auto &s : summary) {
    out += s.model + "," + FormatDouble(s.map) + "," + FormatDouble(s.map_std) + "," +
           FormatDouble(s.mauc) + "," + FormatDouble(s.micro_auprc) + "," +
           FormatDouble(s.macro_auprc) + "," +
           (s.rel_improvement ? FormatDouble(*s.rel_improvement) : "") + "\n";
  }
  return out;
}

std::string ExperimentResult::TableMarkdown(double fraction) const {
  std::ostringstream os;
  os << "Training fraction " << Fixed(100.0 * fraction, 2) << "%, " << train_counts.size()
     << " seed(s); metrics are seed means.\n\n";
  os << "| Model | mAP | mAUC | micro AUPRC | macro AUPRC | rel. improvement |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto &s : summary) {
    os << "| " << s.model << " | " << Fixed(s.map, 4) << " ± " << Fixed(s.map_std, 4) << " | "
       << Fixed(s.mauc, 4) << " | " << Fixed(s.micro_auprc, 4) << " | "
       << Fixed(s.macro_auprc, 4) << " | "
       << (s.rel_improvement ? Fixed(*s.rel_improvement, 2) + "%" : "-") << " |\n";
  }
  return os.str();
}

void SaveExperiment(const ExperimentResult &result, const SplitDataset &data,
                    const ExperimentConfig &config, const std::string &dir) {
  MakeDirs(dir);
  for (const auto &r : result.runs) {
    const std::string run_dir = JoinPath(dir, "seed_" + std::to_string(r.seed));
    MakeDirs(run_dir);
    WriteFile(JoinPath(run_dir, r.model + ".json"), r.report.ToJson(data.label_ids));
    WriteFile(JoinPath(run_dir, r.model + ".train_log.jsonl"), TrainLogToJsonl(r.log));
  }
  WriteFile(JoinPath(dir, "comparison.csv"), result.TableCsv());
  WriteFile(JoinPath(dir, "comparison.md"), result.TableMarkdown(config.fraction));
  if (result.ap_delta && result.auc_delta) {
    WriteFile(JoinPath(dir, "group_delta_ap.csv"), result.ap_delta->ToCsv());
    WriteFile(JoinPath(dir, "group_delta_auc.csv"), result.auc_delta->ToCsv());
    WriteFile(JoinPath(dir, "group_delta.svg"),
              GroupDeltaSvg({{"AP", *result.ap_delta}, {"AUC", *result.auc_delta}},
                            config.target_model + " minus " + config.reference_model +
                                " by training-sample count"));
  }
}

}  // namespace tagkg
