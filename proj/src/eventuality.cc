#include "tagkg/eventuality.h"

#include <algorithm>
#include <array>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 15> kAserRelations = {
    "Precedence",   "Succession",  "Synchronous",    "Reason",
    "Result",       "Condition",   "Contrast",       "Concession",
    "Conjunction",  "Instantiation", "Restatement",  "Alternative",
    "ChosenAlternative", "Exception", "Co_Occurrence",
};

const std::vector<size_t> kNoEdges;

}  // namespace

bool IsKnownRelation(std::string_view name) {
  return std::find(kAserRelations.begin(), kAserRelations.end(), name) !=
         kAserRelations.end();
}

std::string Eventuality::Text() const {
  std::string s;
  for (const auto &t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

EventualityGraph EventualityGraph::Load(const std::string &events_path,
                                        const std::string &edges_path) {
  return Parse(ReadFile(events_path), ReadFile(edges_path), events_path, edges_path);
}

EventualityGraph EventualityGraph::Parse(std::string_view events_jsonl,
                                         std::string_view edges_jsonl,
                                         const std::string &events_name,
                                         const std::string &edges_name) {
  std::vector<Eventuality> events;
  auto lines = SplitLines(events_jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const int lineno = static_cast<int>(i + 1);
    Eventuality ev;
    try {
      auto obj = nlohmann::json::parse(lines[i]);
      ev.id = obj.at("id").get<std::string>();
      ev.tokens = obj.at("tokens").get<std::vector<std::string>>();
      if (obj.contains("verb_indices")) {
        ev.verb_indices = obj["verb_indices"].get<std::vector<int>>();
      }
      ev.frequency = obj.value("frequency", 0LL);
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(events_name, lineno, e.what());
    }
    if (ev.tokens.empty()) throw ParseError(events_name, lineno, "event has no tokens");
    if (ev.frequency < 0) throw ParseError(events_name, lineno, "negative frequency");
    for (int v : ev.verb_indices) {
      if (v < 0 || v >= static_cast<int>(ev.tokens.size())) {
        throw ParseError(events_name, lineno, "verb index out of range");
      }
    }
    events.push_back(std::move(ev));
  }

  std::vector<EventualityEdge> edges;
  lines = SplitLines(edges_jsonl);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    const int lineno = static_cast<int>(i + 1);
    EventualityEdge edge;
    try {
      auto obj = nlohmann::json::parse(lines[i]);
      edge.head_id = obj.at("head").get<std::string>();
      edge.tail_id = obj.at("tail").get<std::string>();
      for (const auto &[type, count] : obj.at("relations").items()) {
        edge.relations[type] = count.get<long long>();
      }
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(edges_name, lineno, e.what());
    }
    if (edge.head_id == edge.tail_id) {
      throw ParseError(edges_name, lineno, "self-loop on " + edge.head_id);
    }
    if (edge.relations.empty()) throw ParseError(edges_name, lineno, "edge has no relations");
    for (const auto &[type, count] : edge.relations) {
      if (count <= 0) throw ParseError(edges_name, lineno, "non-positive count for " + type);
    }
    edges.push_back(std::move(edge));
  }
  return FromParts(std::move(events), std::move(edges));
}

EventualityGraph EventualityGraph::FromParts(std::vector<Eventuality> events,
                                             std::vector<EventualityEdge> edges) {
  EventualityGraph g;
  g.events_ = std::move(events);
  g.edges_ = std::move(edges);
  g.Index();
  return g;
}

void EventualityGraph::Index() {
  event_index_.clear();
  adjacency_.clear();
  for (size_t i = 0; i < events_.size(); ++i) {
    if (!event_index_.emplace(events_[i].id, i).second) {
      throw IntegrityError("duplicate event id '" + events_[i].id + "'");
    }
  }
  for (size_t i = 0; i < edges_.size(); ++i) {
    const auto &e = edges_[i];
    for (const auto *end : {&e.head_id, &e.tail_id}) {
      if (!event_index_.count(*end)) {
        throw IntegrityError("edge " + std::to_string(i + 1) +
                             " references missing event '" + *end + "'");
      }
    }
    adjacency_[e.head_id].push_back(i);
  }
}

const Eventuality *EventualityGraph::Find(std::string_view id) const {
  auto it = event_index_.find(std::string(id));
  return it == event_index_.end() ? nullptr : &events_[it->second];
}

const std::vector<size_t> &EventualityGraph::OutEdges(std::string_view id) const {
  auto it = adjacency_.find(std::string(id));
  return it == adjacency_.end() ? kNoEdges : it->second;
}

const EventualityEdge *EventualityGraph::FindEdge(std::string_view head,
                                                  std::string_view tail) const {
  for (size_t i : OutEdges(head)) {
    if (edges_[i].tail_id == tail) return &edges_[i];
  }
  return nullptr;
}

std::string EventualityGraph::EventsToJsonl() const {
  std::string out;
  for (const auto &ev : events_) {
    ordered_json obj;
    obj["id"] = ev.id;
    obj["tokens"] = ev.tokens;
    obj["verb_indices"] = ev.verb_indices;
    obj["frequency"] = ev.frequency;
    out += obj.dump() + "\n";
  }
  return out;
}

std::string EventualityGraph::EdgesToJsonl() const {
  std::string out;
  for (const auto &e : edges_) {
    ordered_json obj;
    obj["head"] = e.head_id;
    obj["tail"] = e.tail_id;
    ordered_json rel = ordered_json::object();
    for (const auto &[type, count] : e.relations) rel[type] = count;
    obj["relations"] = std::move(rel);
    out += obj.dump() + "\n";
  }
  return out;
}

bool HasDuplicateAdjacentVerb(const Eventuality &event) {
  std::vector<int> verbs = event.verb_indices;
  std::sort(verbs.begin(), verbs.end());
  for (size_t i = 1; i < verbs.size(); ++i) {
    if (verbs[i] == verbs[i - 1] + 1 && event.tokens[verbs[i]] == event.tokens[verbs[i - 1]]) {
      return true;
    }
  }
  return false;
}

EventualityGraph FilterEvents(const EventualityGraph &graph, long long min_frequency) {
  std::vector<Eventuality> kept;
  std::unordered_map<std::string, bool> alive;
  for (const auto &ev : graph.events()) {
    bool keep = ev.frequency >= min_frequency && !HasDuplicateAdjacentVerb(ev);
    alive[ev.id] = keep;
    if (keep) kept.push_back(ev);
  }
  std::vector<EventualityEdge> edges;
  for (const auto &e : graph.edges()) {
    if (alive[e.head_id] && alive[e.tail_id]) edges.push_back(e);
  }
  return EventualityGraph::FromParts(std::move(kept), std::move(edges));
}

}  // namespace tagkg
