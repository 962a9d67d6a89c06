#include "tagkg/alignment.h"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

const char *AlignLabelName(AlignLabel l) {
  switch (l) {
    case AlignLabel::kRelated: return "related";
    case AlignLabel::kAmbiguous: return "ambiguous";
    case AlignLabel::kUnrelated: return "unrelated";
  }
  return "unrelated";
}

AlignLabel ParseAlignLabel(std::string_view s) {
  if (s == "related") return AlignLabel::kRelated;
  if (s == "ambiguous") return AlignLabel::kAmbiguous;
  if (s == "unrelated") return AlignLabel::kUnrelated;
  throw Error("invalid label '" + std::string(s) + "'");
}

namespace {

bool IsCandidate(const CandidateMap &candidates, const std::string &tag,
                 const std::string &event) {
  auto it = candidates.find(tag);
  if (it == candidates.end()) return false;
  for (const auto &c : it->second) {
    if (c.event_id == event) return true;
  }
  return false;
}

}  // namespace

std::vector<Alignment> ParseAnnotations(std::string_view text, const CandidateMap &candidates,
                                        const std::string &origin) {
  std::vector<Alignment> out;
  std::map<AlignedPair, size_t> position;
  auto lines = SplitLines(text);
  bool header_seen = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    const std::string &line = lines[i];
    if (Trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == kAnnotationHeader) continue;
      throw ParseError(origin, lineno, "expected header 'tag_id<TAB>event_id<TAB>label'");
    }
    auto fields = Split(line, '\t');
    if (fields.size() != 3) throw ParseError(origin, lineno, "expected 3 tab-separated columns");
    Alignment a;
    a.tag_id = fields[0];
    a.event_id = fields[1];
    try {
      a.label = ParseAlignLabel(fields[2]);
    } catch (const Error &e) {
      throw ParseError(origin, lineno, e.what());
    }
    if (!IsCandidate(candidates, a.tag_id, a.event_id)) {
      throw ParseError(origin, lineno,
                       "pair (" + a.tag_id + ", " + a.event_id + ") is not a retrieved candidate");
    }
    auto key = AlignedPair{a.tag_id, a.event_id};
    if (auto it = position.find(key); it != position.end()) {
      out[it->second].label = a.label;
    } else {
      position.emplace(key, out.size());
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Alignment> LoadAnnotations(const std::string &path, const CandidateMap &candidates) {
  return ParseAnnotations(ReadFile(path), candidates, path);
}

std::string AnnotationsToTsv(const std::vector<Alignment> &alignments) {
  std::string out(kAnnotationHeader);
  out += '\n';
  for (const auto &a : alignments) {
    out += a.tag_id + '\t' + a.event_id + '\t' + AlignLabelName(a.label) + '\n';
  }
  return out;
}

std::vector<Alignment> AnnotateInteractive(const AnnotateSession &session, std::istream &in,
                                           std::ostream &out) {
  if (!session.terminal_available) {
    throw Error(
        "interactive annotation needs a terminal on stdin; label candidates in an "
        "annotations TSV instead and load it with the manual selection mode");
  }
  const CandidateMap &candidates = *session.candidates;
  const TagOntology &onto = *session.ontology;
  const std::string &path = session.annotations_path;

  std::vector<Alignment> done;
  if (FileExists(path)) {
    done = LoadAnnotations(path, candidates);
  } else {
    WriteFile(path, std::string(kAnnotationHeader) + "\n");
  }
  std::set<AlignedPair> labelled;
  for (const auto &a : done) labelled.insert({a.tag_id, a.event_id});

  std::vector<const Candidate *> todo;
  for (const auto &tag : onto.tags()) {
    auto it = candidates.find(tag.id);
    if (it == candidates.end()) continue;
    for (const auto &c : it->second) {
      if (!labelled.count({c.tag_id, c.event_id})) todo.push_back(&c);
    }
  }

  auto append = [&](const Alignment &a) {
    std::ofstream file(path, std::ios::binary | std::ios::app);
    file << a.tag_id << '\t' << a.event_id << '\t' << AlignLabelName(a.label) << '\n';
    if (!file) throw Error("cannot append to " + path);
  };

  auto names = [&](const std::vector<std::string> &ids) {
    std::string s;
    for (const auto &id : ids) s += (s.empty() ? "" : ", ") + onto.Get(id).name;
    return s.empty() ? std::string("-") : s;
  };

  size_t n = 0;
  for (const Candidate *c : todo) {
    ++n;
    const Tag &tag = onto.Get(c->tag_id);
    const Eventuality *ev = session.graph ? session.graph->Find(c->event_id) : nullptr;
    out << "\n[" << n << "/" << todo.size() << "] " << tag.name << "  (" << tag.id << ")\n";
    if (!tag.description.empty()) out << "  description: " << tag.description << "\n";
    out << "  fathers:     " << names(tag.father_ids) << "\n";
    out << "  children:    " << names(tag.child_ids) << "\n";
    if (session.queries) {
      auto qit = session.queries->find(tag.id);
      for (int qi : c->matched_queries) {
        if (qit == session.queries->end() || qi >= static_cast<int>(qit->second.size())) continue;
        std::string text;
        for (const auto &t : qit->second[qi].tokens) text += (text.empty() ? "" : " ") + t;
        out << "  query:       " << text << "\n";
      }
    }
    out << "  eventuality: " << (ev ? ev->Text() : c->event_id);
    if (ev) out << "  (freq " << ev->frequency << ")";
    out << "\n  [r]elated / [a]mbiguous / [u]nrelated / [s]kip / [q]uit > " << std::flush;

    std::string answer;
    bool quit = false;
    while (true) {
      if (!std::getline(in, answer)) {
        quit = true;
        break;
      }
      answer = ToLower(Trim(answer));
      if (answer == "q" || answer == "quit") {
        quit = true;
        break;
      }
      if (answer == "s" || answer == "skip") break;
      std::optional<AlignLabel> label;
      if (answer == "r" || answer == "related") label = AlignLabel::kRelated;
      if (answer == "a" || answer == "ambiguous") label = AlignLabel::kAmbiguous;
      if (answer == "u" || answer == "unrelated") label = AlignLabel::kUnrelated;
      if (label) {
        Alignment a{c->tag_id, c->event_id, *label, AlignOrigin::kManual};
        append(a);
        done.push_back(std::move(a));
        break;
      }
      out << "  please answer r, a, u, s or q > " << std::flush;
    }
    if (quit) break;
  }
  return done;
}

std::set<AlignedPair> SelectRelated(const std::vector<Alignment> &alignments) {
  std::set<AlignedPair> out;
  for (const auto &a : alignments) {
    if (a.label == AlignLabel::kRelated) out.insert({a.tag_id, a.event_id});
  }
  return out;
}

AutoSelectConfig AutoSelectConfig::Load(const std::string &path) {
  AutoSelectConfig cfg;
  for (const auto &line : SplitLines(ReadFile(path))) {
    std::string entry = Trim(line.substr(0, line.find('#')));
    if (!entry.empty()) cfg.excluded_labels.push_back(entry);
  }
  return cfg;
}

AutoSelectResult AutoSelect(const CandidateMap &candidates, const TagOntology &ontology,
                            const AutoSelectConfig &config) {
  AutoSelectResult res;
  std::set<std::string> excluded;
  for (const auto &label : config.excluded_labels) {
    if (const Tag *t = ontology.FindByIdOrName(label)) {
      excluded.insert(t->id);
    } else {
      res.unresolved.push_back(label);
    }
  }
  for (const auto &tag : ontology.tags()) {
    if (excluded.count(tag.id)) continue;
    auto it = candidates.find(tag.id);
    if (it == candidates.end()) continue;
    for (const auto &c : it->second) {
      res.alignments.push_back({c.tag_id, c.event_id, AlignLabel::kRelated, AlignOrigin::kAuto});
    }
  }
  return res;
}

LabelDistribution CountLabels(const std::vector<Alignment> &alignments) {
  LabelDistribution d;
  for (const auto &a : alignments) {
    switch (a.label) {
      case AlignLabel::kRelated: ++d.related; break;
      case AlignLabel::kAmbiguous: ++d.ambiguous; break;
      case AlignLabel::kUnrelated: ++d.unrelated; break;
    }
  }
  return d;
}

}  // namespace tagkg
