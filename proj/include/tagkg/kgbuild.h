#ifndef TAGKG_KGBUILD_H_
#define TAGKG_KGBUILD_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tagkg/alignment.h"
#include "tagkg/eventuality.h"
#include "tagkg/ontology.h"
#include "tagkg/tensor.h"

namespace tagkg {

using RelationCounts = std::map<std::string, long long>;

// Tag-level graph obtained by pushing eventuality relations through the
// related alignments. Node i is tag_ids[i].
struct TemporalKG {
  std::vector<std::string> tag_ids;
  std::map<std::pair<int, int>, RelationCounts> edges;  // (head, tail) -> type -> count
  std::set<std::string> kept_relations;  // empty = unrestricted

  size_t num_nodes() const { return tag_ids.size(); }
  int IndexOf(std::string_view tag_id) const;
  // Relations on head->tail, or nullptr.
  const RelationCounts *Find(std::string_view head, std::string_view tail) const;
};

inline const std::set<std::string> &DefaultKeptRelations() {
  static const std::set<std::string> kKept = {std::string(kConjunction),
                                              std::string(kPrecedence)};
  return kKept;
}

// Sums, for every tag pair a1 != a2, the relation counts of all edges e1->e2
// with e1 aligned to a1 and e2 aligned to a2. No restriction is applied.
// Throws IntegrityError if a pair names an unknown tag or event.
TemporalKG AggregateRelations(const EventualityGraph &graph,
                              const std::set<AlignedPair> &related,
                              const TagOntology &ontology);

// Keeps only `kept` relation types and drops edges left empty.
TemporalKG RestrictRelations(const TemporalKG &kg, const std::set<std::string> &kept);

// Aggregate then restrict (default: Conjunction and Precedence).
TemporalKG TransferRelations(const EventualityGraph &graph,
                             const std::set<AlignedPair> &related,
                             const TagOntology &ontology,
                             const std::set<std::string> &kept = DefaultKeptRelations());

// head_tag, tail_tag, relations; ordered by (head index, tail index).
std::string TemporalKgToJsonl(const TemporalKG &kg);
// Node order comes from the ontology; unknown tags are an error.
TemporalKG TemporalKgFromJsonl(std::string_view text, const TagOntology &ontology);

// kTemporal is Conjunction and Precedence together as one relation (the
// temporal side of the label graph); kMerged adds the ontology IsA edges.
enum class RelationSelector { kOntologyIsa, kConjunction, kPrecedence, kTemporal, kMerged };

const char *RelationSelectorName(RelationSelector r);
RelationSelector ParseRelationSelector(std::string_view s);

// Row-normalized adjacency with self-loops: A(i,j) = 1/|N_i| for j in N_i,
// N_i = {i} union neighbours of i under the relation.
struct RelationAdjacency {
  RelationSelector relation = RelationSelector::kConjunction;
  Matrix matrix;
  int n() const { return matrix.rows(); }
};

struct AdjacencyOptions {
  bool symmetrize_precedence = false;
  bool symmetrize_isa = true;
};

// Normalizes a binary directed edge list over n nodes. Edge (i, j) makes j a
// neighbour of i; `symmetrize` also adds (j, i).
Matrix NormalizedAdjacency(int n, const std::vector<std::pair<int, int>> &edges, bool symmetrize);

// IsA edges child -> father over the ontology's tag order.
RelationAdjacency BuildAdjacency(const TagOntology &ontology, const AdjacencyOptions &opts = {});

// Conjunction edges are always symmetrized; Precedence only if requested.
// kMerged takes the union of ontology IsA, Conjunction and Precedence edges
// as a single relation and therefore also needs the ontology. Throws Error
// for a selector the source cannot provide.
RelationAdjacency BuildAdjacency(const TemporalKG &kg, RelationSelector relation,
                                 const AdjacencyOptions &opts = {},
                                 const TagOntology *ontology = nullptr);

std::string AdjacencyToCsv(const RelationAdjacency &adj, const std::vector<std::string> &labels);

}  // namespace tagkg

#endif  // TAGKG_KGBUILD_H_
