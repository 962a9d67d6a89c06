#ifndef TAGKG_ALIGNMENT_H_
#define TAGKG_ALIGNMENT_H_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tagkg/eventuality.h"
#include "tagkg/ontology.h"
#include "tagkg/retrieval.h"

namespace tagkg {

enum class AlignLabel { kRelated, kAmbiguous, kUnrelated };
enum class AlignOrigin { kManual, kAuto };

const char *AlignLabelName(AlignLabel l);
AlignLabel ParseAlignLabel(std::string_view s);

struct Alignment {
  std::string tag_id;
  std::string event_id;
  AlignLabel label = AlignLabel::kUnrelated;
  AlignOrigin origin = AlignOrigin::kManual;

  bool operator==(const Alignment &) const = default;
};

using AlignedPair = std::pair<std::string, std::string>;  // (tag_id, event_id)

inline constexpr std::string_view kAnnotationHeader = "tag_id\tevent_id\tlabel";

// Reads an annotations TSV (header tag_id, event_id, label). Every row must
// name a retrieved candidate pair. A pair labelled twice keeps the last label
// at the position of its first row. Errors carry the row's line number.
std::vector<Alignment> LoadAnnotations(const std::string &path, const CandidateMap &candidates);
std::vector<Alignment> ParseAnnotations(std::string_view text, const CandidateMap &candidates,
                                        const std::string &origin = "annotations.tsv");

std::string AnnotationsToTsv(const std::vector<Alignment> &alignments);

struct AnnotateSession {
  const CandidateMap *candidates = nullptr;
  const TagOntology *ontology = nullptr;
  const EventualityGraph *graph = nullptr;
  const std::map<std::string, std::vector<Query>> *queries = nullptr;  // optional
  std::string annotations_path;
  bool terminal_available = true;
};

// Walks unlabelled candidates (ontology order, then candidate order), shows
// the tag context and the eventuality, and reads one answer per line:
// r(elated), a(mbiguous), u(nrelated), s(kip) or q(uit). Each answer is
// appended to the annotations file at once, so a later run resumes where
// this one stopped. End of input acts as quit. Returns every alignment in
// the file afterwards.
std::vector<Alignment> AnnotateInteractive(const AnnotateSession &session, std::istream &in,
                                           std::ostream &out);

std::set<AlignedPair> SelectRelated(const std::vector<Alignment> &alignments);

struct AutoSelectConfig {
  std::vector<std::string> excluded_labels;  // tag ids or names

  // One label per line; '#' starts a comment.
  static AutoSelectConfig Load(const std::string &path);
};

struct AutoSelectResult {
  std::vector<Alignment> alignments;
  std::vector<std::string> unresolved;  // excluded entries matching no tag
};

// Marks every candidate of a non-excluded tag as related.
AutoSelectResult AutoSelect(const CandidateMap &candidates, const TagOntology &ontology,
                            const AutoSelectConfig &config);

struct LabelDistribution {
  size_t related = 0, ambiguous = 0, unrelated = 0;
  size_t total() const { return related + ambiguous + unrelated; }
};

LabelDistribution CountLabels(const std::vector<Alignment> &alignments);

}  // namespace tagkg

#endif  // TAGKG_ALIGNMENT_H_
