#ifndef TAGKG_EVENTUALITY_H_
#define TAGKG_EVENTUALITY_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tagkg {

// Relation names as they appear in ASER-style edge files.
inline constexpr std::string_view kPrecedence = "Precedence";
inline constexpr std::string_view kConjunction = "Conjunction";
inline constexpr std::string_view kCoOccurrence = "Co_Occurrence";

// True for the fifteen relation types of the ASER core release. Unknown types
// are still loaded and carried through verbatim.
bool IsKnownRelation(std::string_view name);

struct Eventuality {
  std::string id;
  std::vector<std::string> tokens;  // lemmatized, lowercase
  std::vector<int> verb_indices;
  long long frequency = 0;

  std::string Text() const;
};

struct EventualityEdge {
  std::string head_id;
  std::string tail_id;
  std::map<std::string, long long> relations;  // type -> positive count
};

class EventualityGraph {
 public:
  // events.jsonl: {id, tokens, verb_indices, frequency}
  // edges.jsonl:  {head, tail, relations: {type: count}}
  // Throws ParseError with the line number, IntegrityError for dangling
  // endpoints (naming the id).
  static EventualityGraph Load(const std::string &events_path,
                               const std::string &edges_path);
  static EventualityGraph Parse(std::string_view events_jsonl,
                                std::string_view edges_jsonl,
                                const std::string &events_name = "events.jsonl",
                                const std::string &edges_name = "edges.jsonl");
  static EventualityGraph FromParts(std::vector<Eventuality> events,
                                    std::vector<EventualityEdge> edges);

  const std::vector<Eventuality> &events() const { return events_; }
  const std::vector<EventualityEdge> &edges() const { return edges_; }
  size_t num_events() const { return events_.size(); }
  size_t num_edges() const { return edges_.size(); }

  const Eventuality *Find(std::string_view id) const;
  // Indices into edges() of edges leaving `id`.
  const std::vector<size_t> &OutEdges(std::string_view id) const;
  // Edge head->tail if present.
  const EventualityEdge *FindEdge(std::string_view head, std::string_view tail) const;

  std::string EventsToJsonl() const;
  std::string EdgesToJsonl() const;

 private:
  void Index();

  std::vector<Eventuality> events_;
  std::vector<EventualityEdge> edges_;
  std::unordered_map<std::string, size_t> event_index_;
  std::unordered_map<std::string, std::vector<size_t>> adjacency_;
};

// Noise filter applied before retrieval: drops events with frequency below
// `min_frequency` and events in which the same verb lemma fills two adjacent
// verb positions ("i say say"); edges touching a dropped event go too. The
// input graph is left untouched.
EventualityGraph FilterEvents(const EventualityGraph &graph, long long min_frequency = 5);

bool HasDuplicateAdjacentVerb(const Eventuality &event);

}  // namespace tagkg

#endif  // TAGKG_EVENTUALITY_H_
