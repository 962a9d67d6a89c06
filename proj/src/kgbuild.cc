#include "tagkg/kgbuild.h"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

int TemporalKG::IndexOf(std::string_view tag_id) const {
  for (size_t i = 0; i < tag_ids.size(); ++i) {
    if (tag_ids[i] == tag_id) return static_cast<int>(i);
  }
  return -1;
}

const RelationCounts *TemporalKG::Find(std::string_view head, std::string_view tail) const {
  const int h = IndexOf(head), t = IndexOf(tail);
  if (h < 0 || t < 0) return nullptr;
  auto it = edges.find({h, t});
  return it == edges.end() ? nullptr : &it->second;
}

TemporalKG AggregateRelations(const EventualityGraph &graph,
                              const std::set<AlignedPair> &related,
                              const TagOntology &ontology) {
  TemporalKG kg;
  for (const auto &t : ontology.tags()) kg.tag_ids.push_back(t.id);

  std::unordered_map<std::string, std::vector<int>> tags_of_event;
  for (const auto &[tag, event] : related) {
    const int idx = ontology.IndexOf(tag);
    if (idx < 0) throw IntegrityError("alignment names unknown tag '" + tag + "'");
    if (graph.Find(event) == nullptr) {
      throw IntegrityError("alignment names unknown event '" + event + "'");
    }
    tags_of_event[event].push_back(idx);
  }

  for (const auto &edge : graph.edges()) {
    auto h = tags_of_event.find(edge.head_id);
    auto t = tags_of_event.find(edge.tail_id);
    if (h == tags_of_event.end() || t == tags_of_event.end()) continue;
    for (int a1 : h->second) {
      for (int a2 : t->second) {
        if (a1 == a2) continue;
        auto &counts = kg.edges[{a1, a2}];
        for (const auto &[type, count] : edge.relations) counts[type] += count;
      }
    }
  }
  return kg;
}

TemporalKG RestrictRelations(const TemporalKG &kg, const std::set<std::string> &kept) {
  TemporalKG out;
  out.tag_ids = kg.tag_ids;
  out.kept_relations = kept;
  for (const auto &[pair, counts] : kg.edges) {
    RelationCounts r;
    for (const auto &[type, count] : counts) {
      if (kept.count(type)) r[type] = count;
    }
    if (!r.empty()) out.edges[pair] = std::move(r);
  }
  return out;
}

TemporalKG TransferRelations(const EventualityGraph &graph,
                             const std::set<AlignedPair> &related,
                             const TagOntology &ontology,
                             const std::set<std::string> &kept) {
  return RestrictRelations(AggregateRelations(graph, related, ontology), kept);
}

std::string TemporalKgToJsonl(const TemporalKG &kg) {
  std::string out;
  for (const auto &[pair, counts] : kg.edges) {
    nlohmann::ordered_json obj;
    obj["head_tag"] = kg.tag_ids[pair.first];
    obj["tail_tag"] = kg.tag_ids[pair.second];
    nlohmann::ordered_json rel = nlohmann::ordered_json::object();
    for (const auto &[type, count] : counts) rel[type] = count;
    obj["relations"] = std::move(rel);
    out += obj.dump() + "\n";
  }
  return out;
}

TemporalKG TemporalKgFromJsonl(std::string_view text, const TagOntology &ontology) {
  TemporalKG kg;
  for (const auto &t : ontology.tags()) kg.tag_ids.push_back(t.id);
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const int lineno = static_cast<int>(i + 1);
    try {
      auto obj = nlohmann::json::parse(lines[i]);
      const auto head = obj.at("head_tag").get<std::string>();
      const auto tail = obj.at("tail_tag").get<std::string>();
      const int h = ontology.IndexOf(head), t = ontology.IndexOf(tail);
      if (h < 0 || t < 0) throw Error("unknown tag in edge " + head + " -> " + tail);
      if (h == t) throw Error("self-loop on " + head);
      auto &counts = kg.edges[{h, t}];
      for (const auto &[type, count] : obj.at("relations").items()) {
        const long long c = count.get<long long>();
        if (c <= 0) throw Error("non-positive count for " + type);
        counts[type] += c;
      }
    } catch (const std::exception &e) {
      throw ParseError("temporal_kg.jsonl", lineno, e.what());
    }
  }
  return kg;
}

const char *RelationSelectorName(RelationSelector r) {
  switch (r) {
    case RelationSelector::kOntologyIsa: return "ontology_isa";
    case RelationSelector::kConjunction: return "conjunction";
    case RelationSelector::kPrecedence: return "precedence";
    case RelationSelector::kTemporal: return "temporal";
    case RelationSelector::kMerged: return "merged";
  }
  return "merged";
}

RelationSelector ParseRelationSelector(std::string_view s) {
  if (s == "ontology_isa" || s == "isa") return RelationSelector::kOntologyIsa;
  if (s == "conjunction") return RelationSelector::kConjunction;
  if (s == "precedence") return RelationSelector::kPrecedence;
  if (s == "temporal") return RelationSelector::kTemporal;
  if (s == "merged") return RelationSelector::kMerged;
  throw Error("unknown relation selector '" + std::string(s) + "'");
}

Matrix NormalizedAdjacency(int n, const std::vector<std::pair<int, int>> &edges, bool symmetrize) {
  Matrix a = Matrix::Identity(n);
  for (const auto &[i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionError("edge endpoint out of range");
    a(i, j) = 1.0;
    if (symmetrize) a(j, i) = 1.0;
  }
  for (int i = 0; i < n; ++i) {
    double degree = 0.0;
    for (int j = 0; j < n; ++j) degree += a(i, j);
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) a(i, j) = 1.0 / degree;
    }
  }
  return a;
}

namespace {

std::vector<std::pair<int, int>> IsaEdges(const TagOntology &ontology) {
  std::vector<std::pair<int, int>> edges;
  for (const auto &t : ontology.tags()) {
    for (const auto &c : t.child_ids) edges.emplace_back(ontology.IndexOf(c), ontology.IndexOf(t.id));
  }
  return edges;
}

std::vector<std::pair<int, int>> KgEdges(const TemporalKG &kg, std::string_view type) {
  std::vector<std::pair<int, int>> edges;
  for (const auto &[pair, counts] : kg.edges) {
    if (counts.count(std::string(type))) edges.push_back(pair);
  }
  return edges;
}

void AddEdges(Matrix &binary, const std::vector<std::pair<int, int>> &edges, bool symmetrize) {
  for (const auto &[i, j] : edges) {
    binary(i, j) = 1.0;
    if (symmetrize) binary(j, i) = 1.0;
  }
}

std::vector<std::pair<int, int>> NonZero(const Matrix &binary) {
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < binary.rows(); ++i)
    for (int j = 0; j < binary.cols(); ++j)
      if (binary(i, j) != 0.0) all.emplace_back(i, j);
  return all;
}

}  // namespace

RelationAdjacency BuildAdjacency(const TagOntology &ontology, const AdjacencyOptions &opts) {
  RelationAdjacency adj;
  adj.relation = RelationSelector::kOntologyIsa;
  adj.matrix = NormalizedAdjacency(static_cast<int>(ontology.size()), IsaEdges(ontology),
                                   opts.symmetrize_isa);
  return adj;
}

RelationAdjacency BuildAdjacency(const TemporalKG &kg, RelationSelector relation,
                                 const AdjacencyOptions &opts, const TagOntology *ontology) {
  const int n = static_cast<int>(kg.num_nodes());
  RelationAdjacency adj;
  adj.relation = relation;
  switch (relation) {
    case RelationSelector::kConjunction:
      adj.matrix = NormalizedAdjacency(n, KgEdges(kg, kConjunction), true);
      break;
    case RelationSelector::kPrecedence:
      adj.matrix = NormalizedAdjacency(n, KgEdges(kg, kPrecedence), opts.symmetrize_precedence);
      break;
    case RelationSelector::kTemporal: {
      Matrix binary(n, n);
      AddEdges(binary, KgEdges(kg, kConjunction), true);
      AddEdges(binary, KgEdges(kg, kPrecedence), opts.symmetrize_precedence);
      adj.matrix = NormalizedAdjacency(n, NonZero(binary), false);
      break;
    }
    case RelationSelector::kOntologyIsa:
      if (ontology == nullptr) throw Error("ontology_isa adjacency needs the ontology");
      return BuildAdjacency(*ontology, opts);
    case RelationSelector::kMerged: {
      if (ontology == nullptr) throw Error("merged adjacency needs the ontology");
      if (static_cast<int>(ontology->size()) != n) {
        throw DimensionError("ontology and temporal KG disagree on node count");
      }
      Matrix binary(n, n);
      AddEdges(binary, IsaEdges(*ontology), opts.symmetrize_isa);
      AddEdges(binary, KgEdges(kg, kConjunction), true);
      AddEdges(binary, KgEdges(kg, kPrecedence), opts.symmetrize_precedence);
      adj.matrix = NormalizedAdjacency(n, NonZero(binary), false);
      break;
    }
  }
  return adj;
}

std::string AdjacencyToCsv(const RelationAdjacency &adj, const std::vector<std::string> &labels) {
  std::string out = "node";
  for (const auto &l : labels) out += "," + l;
  out += "\n";
  for (int i = 0; i < adj.n(); ++i) {
    out += i < static_cast<int>(labels.size()) ? labels[i] : std::to_string(i);
    for (int j = 0; j < adj.n(); ++j) out += "," + FormatDouble(adj.matrix(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace tagkg
