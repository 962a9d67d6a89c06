#include "tagkg/retrieval.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

namespace {
const std::vector<Posting> kNoPostings;
}  // namespace

const char *SchemeName(Scheme s) {
  return s == Scheme::kText ? "text" : "text_plus_freq";
}

Scheme ParseScheme(std::string_view s) {
  if (s == "text") return Scheme::kText;
  if (s == "text_plus_freq") return Scheme::kTextPlusFreq;
  throw Error("unknown scheme '" + std::string(s) + "'");
}

InvertedIndex InvertedIndex::Build(const EventualityGraph &graph) {
  InvertedIndex idx;
  for (const auto &ev : graph.events()) {
    const int doc = static_cast<int>(idx.doc_ids_.size());
    idx.doc_ids_.push_back(ev.id);
    idx.doc_lengths_.push_back(static_cast<int>(ev.tokens.size()));
    idx.frequencies_.push_back(ev.frequency);
    std::vector<bool> verb(ev.tokens.size(), false);
    for (int v : ev.verb_indices) verb[v] = true;
    for (size_t i = 0; i < ev.tokens.size(); ++i) {
      auto &plist = idx.postings_[ev.tokens[i]];
      if (!plist.empty() && plist.back().doc == doc) {
        plist.back().is_verb = plist.back().is_verb || verb[i];
      } else {
        plist.push_back(Posting{doc, verb[i]});
      }
    }
  }
  return idx;
}

int InvertedIndex::doc_freq(std::string_view token) const {
  return static_cast<int>(postings(token).size());
}

const std::vector<Posting> &InvertedIndex::postings(std::string_view token) const {
  auto it = postings_.find(std::string(token));
  return it == postings_.end() ? kNoPostings : it->second;
}

double InvertedIndex::Idf(std::string_view token) const {
  const int df = doc_freq(token);
  if (df == 0) return 0.0;
  return std::log(1.0 + static_cast<double>(n_docs()) / df);
}

std::vector<ScoredEvent> Retrieve(const InvertedIndex &index,
                                  const std::vector<std::string> &query_tokens,
                                  Scheme scheme, const RetrievalParams &params) {
  if (params.k < 1) throw Error("retrieve: k must be >= 1");

  std::vector<std::string> distinct;
  for (const auto &t : query_tokens) {
    if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);
  }
  // Accumulate per document in query-token order so the floating-point sum is
  // reproducible by a full scan.
  std::unordered_map<int, double> acc;
  std::vector<int> order;
  for (const auto &t : distinct) {
    const double idf = index.Idf(t);
    for (const Posting &p : index.postings(t)) {
      auto [it, fresh] = acc.emplace(p.doc, 0.0);
      if (fresh) order.push_back(p.doc);
      it->second += idf * (p.is_verb ? params.verb_boost : 1.0);
    }
  }

  std::vector<ScoredEvent> results;
  results.reserve(order.size());
  for (int doc : order) {
    double score = acc[doc] / std::sqrt(static_cast<double>(index.doc_length(doc)));
    if (scheme == Scheme::kTextPlusFreq) {
      score += params.freq_weight * std::log(1.0 + static_cast<double>(index.frequency(doc)));
    }
    results.push_back({index.doc_id(doc), score, index.frequency(doc)});
  }
  auto better = [](const ScoredEvent &a, const ScoredEvent &b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.event_id < b.event_id;
  };
  const size_t k = static_cast<size_t>(params.k);
  if (results.size() > k) {
    std::partial_sort(results.begin(), results.begin() + k, results.end(), better);
    results.resize(k);
  } else {
    std::sort(results.begin(), results.end(), better);
  }
  return results;
}

std::vector<Candidate> GatherCandidates(const InvertedIndex &index,
                                        const std::vector<Query> &queries,
                                        const RetrievalParams &params) {
  std::map<std::string, Candidate> merged;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    for (Scheme scheme : {Scheme::kText, Scheme::kTextPlusFreq}) {
      for (const auto &hit : Retrieve(index, queries[qi].tokens, scheme, params)) {
        auto [it, fresh] = merged.try_emplace(hit.event_id);
        Candidate &c = it->second;
        if (fresh) {
          c.tag_id = queries[qi].tag_id;
          c.event_id = hit.event_id;
          c.score = hit.score;
          c.scheme = scheme;
        } else if (hit.score > c.score ||
                   (hit.score == c.score && scheme < c.scheme)) {
          c.score = hit.score;
          c.scheme = scheme;
        }
        c.matched_queries.push_back(static_cast<int>(qi));
      }
    }
  }
  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (auto &[id, c] : merged) {
    std::sort(c.matched_queries.begin(), c.matched_queries.end());
    c.matched_queries.erase(std::unique(c.matched_queries.begin(), c.matched_queries.end()),
                            c.matched_queries.end());
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    return a.score > b.score;
  });
  return out;
}

CandidateMap GatherAll(const InvertedIndex &index, const TagOntology &ontology,
                       const std::map<std::string, std::vector<Query>> &queries,
                       const RetrievalParams &params) {
  CandidateMap out;
  for (const auto &t : ontology.tags()) {
    auto it = queries.find(t.id);
    if (it == queries.end()) continue;
    out[t.id] = GatherCandidates(index, it->second, params);
  }
  return out;
}

CandidateStats ComputeCandidateStats(const TagOntology &ontology, const CandidateMap &cands) {
  CandidateStats st;
  bool first = true;
  for (const auto &t : ontology.tags()) {
    auto it = cands.find(t.id);
    const size_t n = it == cands.end() ? 0 : it->second.size();
    ++st.tags;
    st.total += n;
    st.min = first ? n : std::min(st.min, n);
    st.max = std::max(st.max, n);
    first = false;
  }
  st.mean = st.tags ? static_cast<double>(st.total) / st.tags : 0.0;
  return st;
}

std::string CandidatesToJsonl(const TagOntology &ontology, const CandidateMap &cands) {
  std::string out;
  for (const auto &t : ontology.tags()) {
    auto it = cands.find(t.id);
    if (it == cands.end()) continue;
    for (const auto &c : it->second) {
      nlohmann::ordered_json obj;
      obj["tag_id"] = c.tag_id;
      obj["event_id"] = c.event_id;
      obj["score"] = c.score;
      obj["scheme"] = SchemeName(c.scheme);
      obj["matched_queries"] = c.matched_queries;
      out += obj.dump() + "\n";
    }
  }
  return out;
}

CandidateMap CandidatesFromJsonl(std::string_view text) {
  CandidateMap out;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      auto obj = nlohmann::json::parse(lines[i]);
      Candidate c;
      c.tag_id = obj.at("tag_id").get<std::string>();
      c.event_id = obj.at("event_id").get<std::string>();
      c.score = obj.at("score").get<double>();
      c.scheme = ParseScheme(obj.at("scheme").get<std::string>());
      c.matched_queries = obj.at("matched_queries").get<std::vector<int>>();
      if (c.matched_queries.empty()) throw Error("empty matched_queries");
      out[c.tag_id].push_back(std::move(c));
    } catch (const std::exception &e) {
      throw ParseError("candidates.jsonl", static_cast<int>(i + 1), e.what());
    }
  }
  return out;
}

}  // namespace tagkg
