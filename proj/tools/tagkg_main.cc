// tagkg command-line driver.
//
//   tagkg build-kg --lexicon data/lexicon --ontology onto.json ...
//   tagkg experiment --data synth/dataset --ontology synth/ontology.json ...
//
// Every flag may also come from a key=value file given with --config (INI
// sections named after the subcommand, e.g. [build-kg]).

#include <unistd.h>

#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tagkg/alignment.h"
#include "tagkg/dataset.h"
#include "tagkg/error.h"
#include "tagkg/experiment.h"
#include "tagkg/io_util.h"
#include "tagkg/pipeline.h"
#include "tagkg/rng.h"
#include "tagkg/synthetic.h"
#include "tagkg/tagging.h"

namespace {

using namespace tagkg;

const std::map<std::string, OntologyFlavor> kFlavors = {
    {"audioset_json", OntologyFlavor::kAudioSetJson}, {"two_level", OntologyFlavor::kTwoLevel}};

struct PipelineFlags {
  PipelineConfig config;
  std::string selection = "manual";
  std::vector<std::string> keep = {"Conjunction", "Precedence"};

  void Add(CLI::App *cmd, bool needs_output) {
    cmd->add_option("--lexicon", config.lexicon_dir, "Lexicon directory")->required();
    cmd->add_option("--ontology", config.ontology_path, "Tag ontology file")->required();
    cmd->add_option("--flavor", config.flavor, "audioset_json or two_level")
        ->transform(CLI::CheckedTransformer(kFlavors, CLI::ignore_case));
    cmd->add_option("--events", config.events_path, "Eventuality JSONL")->required();
    cmd->add_option("--edges", config.edges_path, "Eventuality edge JSONL")->required();
    cmd->add_option("--annotations", config.annotations_path, "Annotation TSV (manual mode)");
    cmd->add_option("--exclude", config.exclude_path, "Excluded labels (auto mode)");
    cmd->add_option("--k", config.retrieval.k, "Results per query and scheme")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--verb-boost", config.retrieval.verb_boost, "Weight of verb-slot matches");
    cmd->add_option("--freq-weight", config.retrieval.freq_weight,
                    "Frequency weight of the text_plus_freq scheme");
    cmd->add_option("--min-frequency", config.min_frequency, "Noise filter threshold");
    cmd->add_option("--keep", keep, "Relation types kept in the temporal KG");
    cmd->add_flag("--symmetrize-precedence", config.adjacency.symmetrize_precedence);
    cmd->add_flag("--symmetrize-isa,!--directed-isa", config.adjacency.symmetrize_isa);
    auto *out = cmd->add_option("--out", config.output_dir, "Output directory");
    if (needs_output) out->required();
  }

  PipelineConfig Finish(uint64_t seed) {
    config.seed = seed;
    config.kept_relations = std::set<std::string>(keep.begin(), keep.end());
    config.selection = selection == "auto" ? SelectionMode::kAuto : SelectionMode::kManual;
    return config;
  }
};

struct ModelFlags {
  ModelConfig model;
  int epochs = 30;
  int batch_size = 32;
  double lr = 0;  // 0: per-variant default
  bool symmetrize_precedence = false;

  void Add(CLI::App *cmd) {
    cmd->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
    cmd->add_option("--lr", lr, "Learning rate (default 3e-4 for dgcn, 1e-3 otherwise)");
    cmd->add_option("--d-hidden", model.d_hidden)->check(CLI::PositiveNumber);
    cmd->add_option("--d-embed", model.d_embed)->check(CLI::PositiveNumber);
    cmd->add_option("--gcn-hidden", model.gcn_hidden)->check(CLI::PositiveNumber);
    cmd->add_option("--gcn-layers", model.gcn_layers)->check(CLI::PositiveNumber);
    cmd->add_flag("--symmetrize-precedence", symmetrize_precedence);
  }
};

void PrintCountSummary(const std::vector<long long> &counts, const std::vector<std::string> &ids) {
  int none = 0, at_most_5 = 0;
  for (long long c : counts) {
    if (c == 0) ++none;
    if (c <= 5) ++at_most_5;
  }
  std::cout << none << " of " << counts.size() << " classes have no training sample; "
            << at_most_5 << " have no more than 5\n";
  for (size_t i = 0; i < counts.size(); ++i) {
    std::cout << "  " << (i < ids.size() ? ids[i] : std::to_string(i)) << "\t" << counts[i]
              << "\n";
  }
}

int RunBuildKg(PipelineFlags &flags, uint64_t seed) {
  const PipelineResult res = BuildKg(flags.Finish(seed));
  std::cout << res.ReportText();
  std::cout << "wrote " << JoinPath(flags.config.output_dir, "temporal_kg.jsonl") << "\n";
  return 0;
}

int RunAnnotate(PipelineFlags &flags, uint64_t seed) {
  PipelineConfig config = flags.Finish(seed);
  if (config.annotations_path.empty()) throw Error("--annotations is required for annotate");
  if (config.output_dir.empty()) config.output_dir = ".";
  const RetrievalStage st = RunRetrieval(config);
  AnnotateSession session;
  session.candidates = &st.candidates;
  session.ontology = &st.ontology;
  session.graph = &st.graph;
  session.queries = &st.queries;
  session.annotations_path = config.annotations_path;
  session.terminal_available = isatty(STDIN_FILENO) != 0;
  const auto labels = AnnotateInteractive(session, std::cin, std::cout);
  const LabelDistribution d = CountLabels(labels);
  std::cout << "\n" << d.total() << " pairs labelled (" << d.related << " related, "
            << d.ambiguous << " ambiguous, " << d.unrelated << " unrelated)\n";
  return 0;
}

int RunAutoAlign(PipelineFlags &flags, uint64_t seed) {
  PipelineConfig config = flags.Finish(seed);
  config.selection = SelectionMode::kAuto;
  const RetrievalStage st = RunRetrieval(config);
  AutoSelectConfig cfg;
  if (!config.exclude_path.empty()) cfg = AutoSelectConfig::Load(config.exclude_path);
  const AutoSelectResult sel = AutoSelect(st.candidates, st.ontology, cfg);
  for (const auto &u : sel.unresolved) std::cerr << "warning: excluded label matches no tag: " << u << "\n";
  MakeDirs(config.output_dir);
  const std::string path = JoinPath(config.output_dir, "alignments.tsv");
  WriteFile(path, AnnotationsToTsv(sel.alignments));
  const LabelDistribution d = CountLabels(sel.alignments);
  std::cout << d.total() << " alignments (" << d.related << " related, " << d.unrelated
            << " unrelated); wrote " << path << "\n";
  return 0;
}

LabelGraph GraphFor(const ModelSpec &spec, const std::string &ontology_path, OntologyFlavor flavor,
                    const std::string &kg_path, const std::vector<std::string> &label_ids,
                    const AdjacencyOptions &opts) {
  if (spec.relations.empty()) return {};
  if (ontology_path.empty() || kg_path.empty()) {
    throw Error("model '" + spec.name + "' needs --ontology and --kg");
  }
  const TagOntology onto = TagOntology::Load(ontology_path, flavor);
  const TemporalKG kg = TemporalKgFromJsonl(ReadFile(kg_path), onto);
  return BuildLabelGraph(onto, kg, label_ids, spec.relations, opts);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Temporal knowledge graphs for audio tagging"};
  app.set_config("--config", "", "Key=value (INI/TOML) file supplying any flag");
  app.require_subcommand(1);
  app.fallthrough();
  uint64_t seed = 0;
  app.add_option("--seed", seed, "Run seed; every random stage derives from it");

  PipelineFlags build_flags;
  auto *build = app.add_subcommand("build-kg", "Expand, retrieve, select and transfer");
  build_flags.Add(build, true);
  build->add_option("--selection", build_flags.selection, "manual or auto")
      ->check(CLI::IsMember({"manual", "auto"}));

  auto *align = app.add_subcommand("align", "Alignment selection");
  align->require_subcommand(1);
  PipelineFlags annotate_flags, auto_flags;
  auto *annotate = align->add_subcommand("annotate", "Label candidates at the terminal");
  annotate_flags.Add(annotate, false);
  auto *autosel = align->add_subcommand("auto", "Rule-based selection for two-level taxonomies");
  auto_flags.Add(autosel, true);

  std::string sub_data, sub_out;
  double sub_fraction = 0.01;
  auto *subsample = app.add_subcommand("subsample", "Seeded low-resource training subset");
  subsample->add_option("--data", sub_data, "Dataset directory")->required();
  subsample->add_option("--fraction", sub_fraction)->required();
  subsample->add_option("--out", sub_out, "Output dataset directory")->required();

  std::string syn_spec, syn_out;
  SyntheticSpec spec;
  auto *synth = app.add_subcommand("generate-synthetic", "Planted-structure tagging dataset");
  synth->add_option("--spec", syn_spec, "SyntheticSpec JSON");
  synth->add_option("--out", syn_out)->required();
  synth->add_option("--n-labels", spec.n_labels);
  synth->add_option("--branching", spec.branching);
  synth->add_option("--n-train", spec.n_train);
  synth->add_option("--n-eval", spec.n_eval);
  synth->add_option("--d-feat", spec.d_feat);
  synth->add_option("--snr", spec.snr);
  synth->add_option("--auto-pairs", spec.auto_pairs);
  synth->add_option("--kg-noise", spec.kg_noise);

  std::string tr_data, tr_ontology, tr_kg, tr_model = "dgcn", tr_checkpoint, tr_log;
  OntologyFlavor tr_flavor = OntologyFlavor::kAudioSetJson;
  double tr_fraction = 1.0;
  ModelFlags tr_flags;
  auto *train = app.add_subcommand("train", "Train one model");
  train->add_option("--data", tr_data)->required();
  train->add_option("--ontology", tr_ontology);
  train->add_option("--flavor", tr_flavor)->transform(CLI::CheckedTransformer(kFlavors, CLI::ignore_case));
  train->add_option("--kg", tr_kg, "temporal_kg.jsonl");
  train->add_option("--model", tr_model, "Roster name")
      ->check(CLI::IsMember({"baseline_no_kg", "gcn_temporal", "gcn_ontology", "gcn_merged", "dgcn"}));
  train->add_option("--fraction", tr_fraction, "Training subsample fraction");
  train->add_option("--checkpoint", tr_checkpoint)->required();
  train->add_option("--log", tr_log, "Per-epoch JSONL log");
  tr_flags.Add(train);

  std::string ev_checkpoint, ev_data, ev_out;
  auto *evaluate = app.add_subcommand("evaluate", "Score a checkpoint on the eval split");
  evaluate->add_option("--checkpoint", ev_checkpoint)->required();
  evaluate->add_option("--data", ev_data)->required();
  evaluate->add_option("--out", ev_out, "EvalReport JSON");

  std::string ex_data, ex_ontology, ex_kg, ex_out;
  OntologyFlavor ex_flavor = OntologyFlavor::kAudioSetJson;
  ExperimentConfig ex;
  ModelFlags ex_flags;
  auto *experiment = app.add_subcommand("experiment", "Train and compare the model roster");
  experiment->add_option("--data", ex_data)->required();
  experiment->add_option("--ontology", ex_ontology)->required();
  experiment->add_option("--flavor", ex_flavor)->transform(CLI::CheckedTransformer(kFlavors, CLI::ignore_case));
  experiment->add_option("--kg", ex_kg)->required();
  experiment->add_option("--out", ex_out)->required();
  experiment->add_option("--fraction", ex.fraction);
  experiment->add_option("--seeds", ex.seeds, "Run seeds (overrides --seed)");
  experiment->add_option("--models", ex.models, "Subset of the roster");
  experiment->add_option("--group-bounds", ex.group_bounds, "Inclusive bucket upper edges");
  ex_flags.Add(experiment);

  std::vector<std::string> pg_inputs;
  std::string pg_out, pg_title = "Per-group improvement";
  auto *plot = app.add_subcommand("plot-groups", "SVG bar chart from group delta CSVs");
  plot->add_option("--input", pg_inputs, "name=path.csv, repeatable")->required();
  plot->add_option("--out", pg_out)->required();
  plot->add_option("--title", pg_title);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) return RunBuildKg(build_flags, seed);
    if (*annotate) return RunAnnotate(annotate_flags, seed);
    if (*autosel) return RunAutoAlign(auto_flags, seed);

    if (*subsample) {
      SplitDataset data = SplitDataset::Load(sub_data);
      SubsampleResult sub = Subsample(data.train, sub_fraction, seed);
      data.train = sub.train;
      data.Save(sub_out);
      std::string idx;
      for (int i : sub.indices) idx += std::to_string(i) + "\n";
      WriteFile(JoinPath(sub_out, "train_indices.txt"), idx);
      std::cout << sub.train.num_samples() << " training samples kept\n";
      PrintCountSummary(sub.per_class_counts, data.label_ids);
      return 0;
    }

    if (*synth) {
      SyntheticSpec s = syn_spec.empty() ? SyntheticSpec{} : SyntheticSpec::FromJson(ReadFile(syn_spec));
      // Command-line values override the spec file.
      for (const auto *opt : synth->get_options()) {
        if (opt->count() == 0) continue;
        const std::string n = opt->get_name();
        if (n == "--n-labels") s.n_labels = spec.n_labels;
        if (n == "--branching") s.branching = spec.branching;
        if (n == "--n-train") s.n_train = spec.n_train;
        if (n == "--n-eval") s.n_eval = spec.n_eval;
        if (n == "--d-feat") s.d_feat = spec.d_feat;
        if (n == "--snr") s.snr = spec.snr;
        if (n == "--auto-pairs") s.auto_pairs = spec.auto_pairs;
        if (n == "--kg-noise") s.kg_noise = spec.kg_noise;
      }
      if (app.get_option("--seed")->count() > 0 || syn_spec.empty()) s.seed = seed;
      const SyntheticData data = GenerateSynthetic(s);
      SaveSynthetic(data, s, syn_out);
      std::cout << data.dataset.train.num_samples() << " train / " << data.dataset.eval.num_samples()
                << " eval samples, " << s.n_labels << " labels, " << data.kg.edges.size()
                << " KG edges; wrote " << syn_out << "\n";
      return 0;
    }

    if (*train) {
      const SplitDataset data = SplitDataset::Load(tr_data);
      const ModelSpec ms = FindRosterEntry(tr_model);
      AdjacencyOptions adj;
      adj.symmetrize_precedence = tr_flags.symmetrize_precedence;
      const LabelGraph graph = GraphFor(ms, tr_ontology, tr_flavor, tr_kg, data.label_ids, adj);
      const SubsampleResult sub = Subsample(data.train, tr_fraction, seed);
      ModelConfig mc = tr_flags.model;
      mc.variant = ms.variant;
      mc.d_feat = data.train.d_feat();
      mc.n_labels = data.train.num_labels();
      Rng rng = MakeRng(seed, "model.init");
      TaggingModel model = TaggingModel::Create(mc, graph, rng);
      TrainConfig tc;
      tc.epochs = tr_flags.epochs;
      tc.batch_size = tr_flags.batch_size;
      tc.learning_rate = tr_flags.lr > 0 ? tr_flags.lr : DefaultLearningRate(ms.variant);
      tc.seed = seed;
      const auto log = Train(model, sub.train, &data.eval, tc);
      model.SaveCheckpoint(tr_checkpoint);
      if (!tr_log.empty()) WriteFile(tr_log, TrainLogToJsonl(log));
      for (const auto &e : log) {
        std::cout << "epoch " << e.epoch << "  loss " << e.loss;
        if (e.eval_map) std::cout << "  eval mAP " << *e.eval_map;
        std::cout << "\n";
      }
      std::cout << model.NumParameters() << " parameters; wrote " << tr_checkpoint << "\n";
      return 0;
    }

    if (*evaluate) {
      const TaggingModel model = TaggingModel::LoadCheckpoint(ev_checkpoint);
      const SplitDataset data = SplitDataset::Load(ev_data);
      const EvalReport report = Evaluate(model.Predict(data.eval.features), data.eval.labels);
      const std::string json = report.ToJson(data.label_ids);
      if (ev_out.empty()) {
        std::cout << json;
      } else {
        WriteFile(ev_out, json);
        std::cout << "mAP " << report.map << "  mAUC " << report.mauc << "  micro AUPRC "
                  << report.micro_auprc << "  macro AUPRC " << report.macro_auprc << "\n";
      }
      return 0;
    }

    if (*experiment) {
      if (experiment->get_option("--seeds")->count() == 0) ex.seeds = {seed, seed + 1, seed + 2};
      ex.epochs = ex_flags.epochs;
      ex.batch_size = ex_flags.batch_size;
      if (ex_flags.lr > 0) ex.learning_rate = ex_flags.lr;
      ex.model = ex_flags.model;
      ex.adjacency.symmetrize_precedence = ex_flags.symmetrize_precedence;
      const SplitDataset data = SplitDataset::Load(ex_data);
      const TagOntology onto = TagOntology::Load(ex_ontology, ex_flavor);
      const TemporalKG kg = TemporalKgFromJsonl(ReadFile(ex_kg), onto);
      const ExperimentResult res = RunExperiment(data, onto, kg, ex, &std::cout);
      SaveExperiment(res, data, ex, ex_out);
      std::cout << "\n" << res.TableMarkdown(ex.fraction);
      return 0;
    }

    if (*plot) {
      std::vector<std::pair<std::string, GroupDelta>> series;
      for (const auto &in : pg_inputs) {
        const auto eq = in.find('=');
        const std::string name = eq == std::string::npos ? in : in.substr(0, eq);
        const std::string path = eq == std::string::npos ? in : in.substr(eq + 1);
        series.emplace_back(name, GroupDelta::FromCsv(ReadFile(path), path));
      }
      WriteFile(pg_out, GroupDeltaSvg(series, pg_title));
      std::cout << "wrote " << pg_out << "\n";
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
