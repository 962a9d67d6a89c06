#include "tagkg/pipeline.h"

#include <sstream>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

namespace {

// Full-scale AudioSet alignment statistics, printed next to the fixture
// numbers for orientation only.
constexpr double kReferenceMeanCandidates = 31.3;
constexpr int kReferenceMinCandidates = 2;
constexpr int kReferenceMaxCandidates = 190;
constexpr double kReferenceRelated = 0.3196;
constexpr double kReferenceAmbiguous = 0.1352;
constexpr double kReferenceUnrelated = 0.5451;

template <typename F>
auto Stage(const char *name, F &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception &e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

double Share(size_t part, size_t total) {
  return total ? static_cast<double>(part) / static_cast<double>(total) : 0.0;
}

}  // namespace

void PipelineConfig::Validate() const {
  auto need = [](const std::string &path, const char *what) {
    if (path.empty()) throw Error(std::string(what) + " path not set");
    if (!FileExists(path)) throw Error(std::string(what) + " not found: " + path);
  };
  need(lexicon_dir, "lexicon");
  need(ontology_path, "ontology");
  need(events_path, "events");
  need(edges_path, "edges");
  if (selection == SelectionMode::kAuto && !exclude_path.empty()) need(exclude_path, "exclude list");
  if (output_dir.empty()) throw Error("output directory not set");
  if (retrieval.k < 1) throw Error("k must be >= 1");
  if (!(retrieval.verb_boost > 0)) throw Error("verb_boost must be positive");
  if (!(retrieval.freq_weight >= 0)) throw Error("freq_weight must be non-negative");
  if (min_frequency < 0) throw Error("min_frequency must be non-negative");
}

RetrievalStage RunRetrieval(const PipelineConfig &config) {
  Stage("config", [&] { config.Validate(); return 0; });
  RetrievalStage st;
  const Lexicon lex = Stage("lexicon", [&] { return Lexicon::Load(config.lexicon_dir); });
  st.ontology =
      Stage("ontology", [&] { return TagOntology::Load(config.ontology_path, config.flavor); });
  st.raw_graph = Stage("eventuality", [&] {
    return EventualityGraph::Load(config.events_path, config.edges_path);
  });
  st.graph = Stage("filter", [&] { return FilterEvents(st.raw_graph, config.min_frequency); });
  st.queries = Stage("expand", [&] { return ExpandAll(st.ontology, lex); });
  st.candidates = Stage("retrieve", [&] {
    const InvertedIndex index = InvertedIndex::Build(st.graph);
    return GatherAll(index, st.ontology, st.queries, config.retrieval);
  });
  return st;
}

PipelineResult RunPipeline(const PipelineConfig &config) {
  RetrievalStage st = RunRetrieval(config);
  PipelineResult res;
  const TagOntology &onto = st.ontology;
  const EventualityGraph &graph = st.graph;
  res.events_before_filter = st.raw_graph.num_events();
  res.events_after_filter = graph.num_events();
  res.edges_before_filter = st.raw_graph.num_edges();
  res.edges_after_filter = graph.num_edges();
  res.queries = std::move(st.queries);
  res.candidates = std::move(st.candidates);
  res.candidate_stats = ComputeCandidateStats(onto, res.candidates);

  Stage("select", [&] {
    if (config.selection == SelectionMode::kManual) {
      if (config.annotations_path.empty() || !FileExists(config.annotations_path)) {
        res.warnings.push_back("no annotations file; manual selection yields no alignments");
      } else {
        res.alignments = LoadAnnotations(config.annotations_path, res.candidates);
        if (res.alignments.empty()) res.warnings.push_back("annotations file has no rows");
      }
    } else {
      AutoSelectConfig cfg;
      if (!config.exclude_path.empty()) cfg = AutoSelectConfig::Load(config.exclude_path);
      AutoSelectResult sel = AutoSelect(res.candidates, onto, cfg);
      for (const auto &u : sel.unresolved) {
        res.warnings.push_back("excluded label matches no tag: " + u);
      }
      res.alignments = std::move(sel.alignments);
    }
    return 0;
  });
  res.labels = CountLabels(res.alignments);
  res.related = SelectRelated(res.alignments);

  Stage("transfer", [&] {
    res.aggregated = AggregateRelations(graph, res.related, onto);
    res.kg = RestrictRelations(res.aggregated, config.kept_relations);
    return 0;
  });
  if (res.kg.edges.empty()) res.warnings.push_back("temporal KG has no edges");
  res.ontology = std::move(st.ontology);
  return res;
}

PipelineResult BuildKg(const PipelineConfig &config) {
  PipelineResult res = RunPipeline(config);
  const TagOntology &onto = res.ontology;
  Stage("write", [&] {
    const std::string &dir = config.output_dir;
    MakeDirs(dir);
    WriteFile(JoinPath(dir, "queries.jsonl"), QueriesToJsonl(onto, res.queries));
    WriteFile(JoinPath(dir, "candidates.jsonl"), CandidatesToJsonl(onto, res.candidates));
    WriteFile(JoinPath(dir, "alignments.tsv"), AnnotationsToTsv(res.alignments));
    WriteFile(JoinPath(dir, "temporal_kg.jsonl"), TemporalKgToJsonl(res.kg));
    WriteFile(JoinPath(dir, "stage_report.json"), res.ReportJson());
    std::vector<std::string> labels;
    for (const auto &t : onto.tags()) labels.push_back(t.id);
    for (auto sel : {RelationSelector::kConjunction, RelationSelector::kPrecedence}) {
      WriteFile(JoinPath(dir, std::string("adjacency_") + RelationSelectorName(sel) + ".csv"),
                AdjacencyToCsv(BuildAdjacency(res.kg, sel, config.adjacency), labels));
    }
    WriteFile(JoinPath(dir, "adjacency_ontology_isa.csv"),
              AdjacencyToCsv(BuildAdjacency(onto, config.adjacency), labels));
    return 0;
  });
  return res;
}

std::string PipelineResult::ReportJson() const {
  nlohmann::ordered_json j;
  j["events"] = {{"before_filter", events_before_filter}, {"after_filter", events_after_filter}};
  j["edges"] = {{"before_filter", edges_before_filter}, {"after_filter", edges_after_filter}};
  std::map<std::string, size_t> by_source;
  size_t total_queries = 0;
  for (const auto &[tag, qs] : queries) {
    for (const auto &q : qs) {
      ++by_source[QuerySourceName(q.source)];
      ++total_queries;
    }
  }
  j["queries"] = {{"total", total_queries}, {"by_source", by_source}};
  j["candidates"] = {{"total", candidate_stats.total},
                     {"tags", candidate_stats.tags},
                     {"mean_per_tag", candidate_stats.mean},
                     {"min_per_tag", candidate_stats.min},
                     {"max_per_tag", candidate_stats.max},
                     {"full_scale_reference",
                      {{"mean_per_tag", kReferenceMeanCandidates},
                       {"min_per_tag", kReferenceMinCandidates},
                       {"max_per_tag", kReferenceMaxCandidates}}}};
  const size_t n = labels.total();
  j["alignments"] = {{"total", n},
                     {"related", labels.related},
                     {"ambiguous", labels.ambiguous},
                     {"unrelated", labels.unrelated},
                     {"related_share", Share(labels.related, n)},
                     {"ambiguous_share", Share(labels.ambiguous, n)},
                     {"unrelated_share", Share(labels.unrelated, n)},
                     {"full_scale_reference",
                      {{"related_share", kReferenceRelated},
                       {"ambiguous_share", kReferenceAmbiguous},
                       {"unrelated_share", kReferenceUnrelated}}}};
  j["related_pairs"] = related.size();
  auto relation_totals = [](const TemporalKG &kg) {
    std::map<std::string, long long> totals;
    for (const auto &[pair, counts] : kg.edges)
      for (const auto &[type, c] : counts) totals[type] += c;
    return totals;
  };
  j["kg"] = {{"edges_before_restriction", aggregated.edges.size()},
             {"edges", kg.edges.size()},
             {"relations_before_restriction", relation_totals(aggregated)},
             {"relations", relation_totals(kg)}};
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string PipelineResult::ReportText() const {
  std::ostringstream os;
  const size_t n = labels.total();
  auto pct = [](double x) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << 100.0 * x << "%";
    return s.str();
  };
  os << "events:      " << events_before_filter << " -> " << events_after_filter
     << " after noise filter\n";
  os << "edges:       " << edges_before_filter << " -> " << edges_after_filter << "\n";
  size_t total_queries = 0;
  for (const auto &[tag, qs] : queries) total_queries += qs.size();
  os << "queries:     " << total_queries << " over " << queries.size() << " tags\n";
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "candidates:  " << candidate_stats.total << " total, " << candidate_stats.mean
     << " per tag (min " << candidate_stats.min << ", max " << candidate_stats.max << ")"
     << "   [full-scale AudioSet: " << kReferenceMeanCandidates << ", min "
     << kReferenceMinCandidates << ", max " << kReferenceMaxCandidates << "]\n";
  os << "alignments:  " << n << " (related " << pct(Share(labels.related, n)) << ", ambiguous "
     << pct(Share(labels.ambiguous, n)) << ", unrelated " << pct(Share(labels.unrelated, n))
     << ")   [full-scale AudioSet: " << pct(kReferenceRelated) << " / "
     << pct(kReferenceAmbiguous) << " / " << pct(kReferenceUnrelated) << "]\n";
  os << "related:     " << related.size() << " pairs\n";
  os << "temporal KG: " << kg.edges.size() << " edges (" << aggregated.edges.size()
     << " before relation restriction)\n";
  for (const auto &w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace tagkg
