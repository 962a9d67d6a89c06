#ifndef TAGKG_RETRIEVAL_H_
#define TAGKG_RETRIEVAL_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tagkg/eventuality.h"
#include "tagkg/ontology.h"

namespace tagkg {

enum class Scheme { kText, kTextPlusFreq };

const char *SchemeName(Scheme s);
Scheme ParseScheme(std::string_view s);

struct RetrievalParams {
  int k = 10;
  double verb_boost = 2.0;
  double freq_weight = 0.5;
};

struct Posting {
  int doc = 0;         // index into the index's document table
  bool is_verb = false;  // token occurs in a verb slot of that event
};

// Token -> events index over a (filtered) eventuality graph.
class InvertedIndex {
 public:
  static InvertedIndex Build(const EventualityGraph &graph);

  int n_docs() const { return static_cast<int>(doc_ids_.size()); }
  int doc_freq(std::string_view token) const;
  const std::vector<Posting> &postings(std::string_view token) const;

  const std::string &doc_id(int doc) const { return doc_ids_[doc]; }
  int doc_length(int doc) const { return doc_lengths_[doc]; }
  long long frequency(int doc) const { return frequencies_[doc]; }
  // ln(1 + n_docs / doc_freq); 0 for unseen tokens.
  double Idf(std::string_view token) const;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<int> doc_lengths_;
  std::vector<long long> frequencies_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

struct ScoredEvent {
  std::string event_id;
  double score = 0;
  long long frequency = 0;
};

// Ranks events matching at least one query token.
//   text:           sum_t idf(t) * w(t,e) / sqrt(len(e)),  w = verb_boost for
//                   tokens in a verb slot of e, else 1
//   text_plus_freq: text + freq_weight * ln(1 + frequency(e))
// The sum runs over distinct query tokens in query order. Ties are broken by
// frequency (desc) then event id (asc). Returns at most k results.
std::vector<ScoredEvent> Retrieve(const InvertedIndex &index,
                                  const std::vector<std::string> &query_tokens,
                                  Scheme scheme, const RetrievalParams &params = {});

struct Candidate {
  std::string tag_id;
  std::string event_id;
  double score = 0;
  Scheme scheme = Scheme::kText;
  std::vector<int> matched_queries;  // indices into the tag's query list, sorted
};

// Runs every query of the tag under both schemes and unions the top-k lists.
// Duplicate events keep the maximum score (and the scheme that produced it)
// and accumulate the matching query indices. Output order: score desc,
// event id asc.
std::vector<Candidate> GatherCandidates(const InvertedIndex &index,
                                        const std::vector<Query> &queries,
                                        const RetrievalParams &params = {});

using CandidateMap = std::map<std::string, std::vector<Candidate>>;

CandidateMap GatherAll(const InvertedIndex &index, const TagOntology &ontology,
                       const std::map<std::string, std::vector<Query>> &queries,
                       const RetrievalParams &params = {});

struct CandidateStats {
  size_t tags = 0;          // tags considered
  size_t total = 0;
  double mean = 0;
  size_t min = 0;
  size_t max = 0;
};

CandidateStats ComputeCandidateStats(const TagOntology &ontology, const CandidateMap &cands);

std::string CandidatesToJsonl(const TagOntology &ontology, const CandidateMap &cands);
CandidateMap CandidatesFromJsonl(std::string_view text);

}  // namespace tagkg

#endif  // TAGKG_RETRIEVAL_H_
