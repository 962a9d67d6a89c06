#ifndef TAGKG_PIPELINE_H_
#define TAGKG_PIPELINE_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tagkg/alignment.h"
#include "tagkg/eventuality.h"
#include "tagkg/kgbuild.h"
#include "tagkg/lexicon.h"
#include "tagkg/ontology.h"
#include "tagkg/retrieval.h"

namespace tagkg {

enum class SelectionMode { kManual, kAuto };

struct PipelineConfig {
  std::string lexicon_dir;
  std::string ontology_path;
  OntologyFlavor flavor = OntologyFlavor::kAudioSetJson;
  std::string events_path;
  std::string edges_path;
  std::string annotations_path;  // manual mode; may be absent
  std::string exclude_path;      // auto mode; optional
  SelectionMode selection = SelectionMode::kManual;
  std::string output_dir;
  RetrievalParams retrieval;
  long long min_frequency = 5;
  std::set<std::string> kept_relations = DefaultKeptRelations();
  AdjacencyOptions adjacency;
  uint64_t seed = 0;

  // Throws Error naming the first missing path or out-of-range parameter.
  void Validate() const;
};

// Outputs of the stages up to and including candidate retrieval.
struct RetrievalStage {
  TagOntology ontology;
  EventualityGraph raw_graph;
  EventualityGraph graph;  // after noise filtering
  std::map<std::string, std::vector<Query>> queries;
  CandidateMap candidates;
};

RetrievalStage RunRetrieval(const PipelineConfig &config);

// Everything the construction stages produced, plus their statistics.
struct PipelineResult {
  TagOntology ontology;
  std::map<std::string, std::vector<Query>> queries;
  CandidateMap candidates;
  std::vector<Alignment> alignments;
  std::set<AlignedPair> related;
  TemporalKG aggregated;  // before relation restriction
  TemporalKG kg;          // after restriction
  std::vector<std::string> warnings;

  size_t events_before_filter = 0, events_after_filter = 0;
  size_t edges_before_filter = 0, edges_after_filter = 0;
  CandidateStats candidate_stats;
  LabelDistribution labels;

  std::string ReportJson() const;
  std::string ReportText() const;
};

// Expansion, retrieval, selection and relation transfer in one run. Any
// stage failure is rethrown as Error("<stage>: <cause>").
PipelineResult RunPipeline(const PipelineConfig &config);

// Runs the pipeline and writes queries.jsonl, candidates.jsonl,
// alignments.tsv, temporal_kg.jsonl, stage_report.json and adjacency CSVs to
// config.output_dir.
PipelineResult BuildKg(const PipelineConfig &config);

}  // namespace tagkg

#endif  // TAGKG_PIPELINE_H_
