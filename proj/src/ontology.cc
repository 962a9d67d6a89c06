#include "tagkg/ontology.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

using ordered_json = nlohmann::ordered_json;

const char *FlavorName(OntologyFlavor flavor) {
  return flavor == OntologyFlavor::kTwoLevel ? "two_level" : "audioset_json";
}

OntologyFlavor ParseFlavor(std::string_view s) {
  if (s == "audioset_json" || s == "audioset") return OntologyFlavor::kAudioSetJson;
  if (s == "two_level" || s == "sonyc") return OntologyFlavor::kTwoLevel;
  throw Error("unknown ontology flavor '" + std::string(s) + "'");
}

TagOntology TagOntology::Load(const std::string &path, OntologyFlavor flavor) {
  return Parse(ReadFile(path), flavor, path);
}

TagOntology TagOntology::Parse(std::string_view json_text, OntologyFlavor flavor,
                               const std::string &origin) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(origin, 0, e.what());
  }

  std::vector<Tag> tags;
  if (flavor == OntologyFlavor::kAudioSetJson) {
    if (!doc.is_array()) throw ParseError(origin, 0, "expected a JSON array of tags");
    for (const auto &obj : doc) {
      if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
          !obj.contains("name") || !obj["name"].is_string()) {
        throw ParseError(origin, 0, "tag entry without string id/name: " + obj.dump());
      }
      Tag t;
      t.id = obj["id"].get<std::string>();
      t.name = obj["name"].get<std::string>();
      if (obj.contains("description") && obj["description"].is_string()) {
        t.description = obj["description"].get<std::string>();
      }
      if (obj.contains("child_ids")) {
        if (!obj["child_ids"].is_array()) {
          throw ParseError(origin, 0, "child_ids of " + t.id + " is not an array");
        }
        for (const auto &c : obj["child_ids"]) {
          if (!c.is_string()) throw ParseError(origin, 0, "non-string child id in " + t.id);
          t.child_ids.push_back(c.get<std::string>());
        }
      }
      tags.push_back(std::move(t));
    }
  } else {
    if (!doc.is_object()) {
      throw ParseError(origin, 0, "expected a JSON object of coarse -> fine labels");
    }
    std::vector<Tag> fine;
    std::set<std::string> coarse_names;
    for (const auto &[coarse, children] : doc.items()) coarse_names.insert(coarse);
    std::set<std::string> seen_fine;
    for (const auto &[coarse, children] : doc.items()) {
      if (!children.is_array()) {
        throw ParseError(origin, 0, "fine labels of '" + coarse + "' is not an array");
      }
      Tag t;
      t.id = coarse;
      t.name = coarse;
      for (const auto &c : children) {
        if (!c.is_string()) throw ParseError(origin, 0, "non-string fine label under " + coarse);
        std::string name = c.get<std::string>();
        t.child_ids.push_back(name);
        if (!coarse_names.count(name) && seen_fine.insert(name).second) {
          Tag f;
          f.id = name;
          f.name = name;
          fine.push_back(std::move(f));
        }
      }
      tags.push_back(std::move(t));
    }
    for (auto &f : fine) tags.push_back(std::move(f));
  }
  return FromTags(std::move(tags), flavor);
}

TagOntology TagOntology::FromTags(std::vector<Tag> tags, OntologyFlavor flavor) {
  TagOntology onto;
  onto.flavor_ = flavor;
  onto.tags_ = std::move(tags);
  onto.Finalize();
  return onto;
}

void TagOntology::Finalize() {
  index_.clear();
  for (size_t i = 0; i < tags_.size(); ++i) {
    auto &t = tags_[i];
    t.father_ids.clear();
    if (!index_.emplace(t.id, static_cast<int>(i)).second) {
      throw IntegrityError("duplicate tag id '" + t.id + "'");
    }
  }
  for (const auto &t : tags_) {
    std::set<std::string> seen;
    for (const auto &c : t.child_ids) {
      if (c == t.id) throw IntegrityError("cycle detected at tag '" + t.id + "' (self-loop)");
      if (!index_.count(c)) {
        throw IntegrityError("tag '" + t.id + "' lists unknown child '" + c + "'");
      }
      if (!seen.insert(c).second) {
        throw IntegrityError("tag '" + t.id + "' lists child '" + c + "' twice");
      }
    }
  }
  for (const auto &t : tags_) {
    for (const auto &c : t.child_ids) tags_[index_.at(c)].father_ids.push_back(t.id);
  }
  roots_.clear();
  for (auto &t : tags_) {
    t.is_leaf = t.child_ids.empty();
    if (t.father_ids.empty()) roots_.push_back(t.id);
  }

  // Iterative three-colour DFS over child edges.
  enum Colour : char { kWhite, kGrey, kBlack };
  std::vector<Colour> colour(tags_.size(), kWhite);
  for (size_t start = 0; start < tags_.size(); ++start) {
    if (colour[start] != kWhite) continue;
    std::vector<std::pair<int, size_t>> stack{{static_cast<int>(start), 0}};
    colour[start] = kGrey;
    while (!stack.empty()) {
      auto &[node, next] = stack.back();
      const auto &children = tags_[node].child_ids;
      if (next == children.size()) {
        colour[node] = kBlack;
        stack.pop_back();
        continue;
      }
      int child = index_.at(children[next++]);
      if (colour[child] == kGrey) {
        throw IntegrityError("cycle detected at tag '" + tags_[child].id + "'");
      }
      if (colour[child] == kWhite) {
        colour[child] = kGrey;
        stack.emplace_back(child, 0);
      }
    }
  }
}

std::string TagOntology::Serialize() const {
  ordered_json doc;
  if (flavor_ == OntologyFlavor::kAudioSetJson) {
    doc = ordered_json::array();
    for (const auto &t : tags_) {
      ordered_json obj;
      obj["id"] = t.id;
      obj["name"] = t.name;
      obj["description"] = t.description;
      obj["child_ids"] = t.child_ids;
      doc.push_back(std::move(obj));
    }
  } else {
    doc = ordered_json::object();
    for (const auto &root : roots_) {
      std::vector<std::string> names;
      for (const auto &c : Get(root).child_ids) names.push_back(Get(c).name);
      doc[Get(root).name] = names;
    }
  }
  return doc.dump(2) + "\n";
}

void TagOntology::Save(const std::string &path) const { WriteFile(path, Serialize()); }

const Tag *TagOntology::Find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &tags_[it->second];
}

const Tag &TagOntology::Get(std::string_view id) const {
  const Tag *t = Find(id);
  if (t == nullptr) throw IntegrityError("unknown tag id '" + std::string(id) + "'");
  return *t;
}

int TagOntology::IndexOf(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

const Tag *TagOntology::FindByIdOrName(std::string_view key) const {
  if (const Tag *t = Find(key)) return t;
  const std::string lower = ToLower(Trim(key));
  for (const auto &t : tags_) {
    if (ToLower(t.name) == lower) return &t;
  }
  return nullptr;
}

const char *QuerySourceName(QuerySource s) {
  switch (s) {
    case QuerySource::kBase: return "base";
    case QuerySource::kParenthetical: return "parenthetical";
    case QuerySource::kSynonym: return "synonym";
    case QuerySource::kFatherPair: return "father_pair";
  }
  return "base";
}

QuerySource ParseQuerySource(std::string_view s) {
  if (s == "base") return QuerySource::kBase;
  if (s == "parenthetical") return QuerySource::kParenthetical;
  if (s == "synonym") return QuerySource::kSynonym;
  if (s == "father_pair") return QuerySource::kFatherPair;
  throw Error("unknown query source '" + std::string(s) + "'");
}

namespace {

TokenSeq LemmatizeTokens(const std::vector<std::string> &raw, const Lexicon &lex) {
  TokenSeq seq;
  for (const auto &tok : raw) {
    if (lex.IsStopword(tok)) continue;
    bool verb = false;
    std::string lemma;
    if (tok.size() > 3 && tok.ends_with("ing")) {
      std::string v = lex.Lemmatize(tok, Pos::kVerb);
      if (lex.HasEntry(v, Pos::kVerb)) {
        verb = true;
        lemma = std::move(v);
      }
    }
    if (!verb) lemma = lex.Lemmatize(tok, Pos::kNoun);
    seq.tokens.push_back(std::move(lemma));
    seq.verb_flags.push_back(verb);
  }
  return seq;
}

}  // namespace

PreprocessedName PreprocessName(std::string_view name, const Lexicon &lex) {
  const std::string lower = ToLower(name);
  std::string outside;
  std::vector<std::string> inside;
  int depth = 0;
  std::string cur;
  for (char c : lower) {
    if (c == '(') {
      if (depth++ == 0) {
        cur.clear();
        outside.push_back(' ');
        continue;
      }
    } else if (c == ')' && depth > 0) {
      if (--depth == 0) {
        inside.push_back(cur);
        continue;
      }
    }
    (depth > 0 ? cur : outside).push_back(c);
  }
  if (depth > 0) inside.push_back(cur);  // unbalanced: take the tail as a group

  PreprocessedName out;
  out.main = LemmatizeTokens(Tokenize(outside), lex);
  if (out.main.tokens.empty()) {
    out.main.tokens = {Trim(lower)};
    out.main.verb_flags = {false};
  }
  for (const auto &group_text : inside) {
    for (const auto &group : Split(group_text, ',')) {
      TokenSeq seq = LemmatizeTokens(Tokenize(group), lex);
      if (!seq.tokens.empty()) out.parenthetical.push_back(std::move(seq));
    }
  }
  return out;
}

std::vector<Query> ExpandQueries(const Tag &tag, const TagOntology &ontology,
                                 const Lexicon &lex) {
  std::vector<Query> out;
  std::set<std::vector<std::string>> seen;
  auto emit = [&](TokenSeq seq, QuerySource source) {
    if (seq.tokens.empty() || !seen.insert(seq.tokens).second) return;
    out.push_back(Query{tag.id, std::move(seq.tokens), std::move(seq.verb_flags), source});
  };

  const PreprocessedName pre = PreprocessName(tag.name, lex);
  emit(pre.main, QuerySource::kBase);
  for (const auto &group : pre.parenthetical) emit(group, QuerySource::kParenthetical);

  // Lesk context: the tag's full name plus the names of its fathers.
  std::vector<std::string> context = Tokenize(tag.name);
  for (const auto &f : tag.father_ids) {
    for (auto &tok : Tokenize(ontology.Get(f).name)) context.push_back(std::move(tok));
  }
  for (size_t i = 0; i < pre.main.tokens.size(); ++i) {
    const std::string &lemma = pre.main.tokens[i];
    const Pos pos = pre.main.verb_flags[i] ? Pos::kVerb : Pos::kNoun;
    auto sense = lex.Disambiguate(lemma, pos, context);
    if (!sense) continue;
    for (const auto &syn : lex.SynonymsOf(*sense, lemma)) {
      TokenSeq seq;
      for (size_t j = 0; j < pre.main.tokens.size(); ++j) {
        if (j != i) {
          seq.tokens.push_back(pre.main.tokens[j]);
          seq.verb_flags.push_back(pre.main.verb_flags[j]);
          continue;
        }
        for (auto &part : Tokenize(syn)) {
          for (auto &piece : Split(part, '_')) {
            if (piece.empty()) continue;
            seq.tokens.push_back(piece);
            seq.verb_flags.push_back(pre.main.verb_flags[i]);
          }
        }
      }
      emit(std::move(seq), QuerySource::kSynonym);
    }
  }

  if (tag.father_ids.size() >= 2) {
    for (const auto &f : tag.father_ids) {
      TokenSeq seq = PreprocessName(ontology.Get(f).name, lex).main;
      seq.tokens.insert(seq.tokens.end(), pre.main.tokens.begin(), pre.main.tokens.end());
      seq.verb_flags.insert(seq.verb_flags.end(), pre.main.verb_flags.begin(),
                            pre.main.verb_flags.end());
      emit(std::move(seq), QuerySource::kFatherPair);
    }
  }
  return out;
}

std::map<std::string, std::vector<Query>> ExpandAll(const TagOntology &ontology,
                                                    const Lexicon &lex) {
  std::map<std::string, std::vector<Query>> all;
  for (const auto &t : ontology.tags()) all[t.id] = ExpandQueries(t, ontology, lex);
  return all;
}

std::string QueriesToJsonl(const TagOntology &ontology,
                           const std::map<std::string, std::vector<Query>> &queries) {
  std::string out;
  for (const auto &t : ontology.tags()) {
    auto it = queries.find(t.id);
    if (it == queries.end()) continue;
    for (const auto &q : it->second) {
      ordered_json obj;
      obj["tag_id"] = q.tag_id;
      obj["tokens"] = q.tokens;
      obj["verb_flags"] = q.verb_flags;
      obj["source"] = QuerySourceName(q.source);
      out += obj.dump() + "\n";
    }
  }
  return out;
}

std::vector<Query> QueriesFromJsonl(std::string_view text) {
  std::vector<Query> out;
  auto lines = SplitLines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      auto obj = nlohmann::json::parse(lines[i]);
      Query q;
      q.tag_id = obj.at("tag_id").get<std::string>();
      q.tokens = obj.at("tokens").get<std::vector<std::string>>();
      q.verb_flags = obj.at("verb_flags").get<std::vector<bool>>();
      q.source = ParseQuerySource(obj.at("source").get<std::string>());
      if (q.tokens.empty() || q.tokens.size() != q.verb_flags.size()) {
        throw Error("tokens/verb_flags length mismatch");
      }
      out.push_back(std::move(q));
    } catch (const std::exception &e) {
      throw ParseError("queries.jsonl", static_cast<int>(i + 1), e.what());
    }
  }
  return out;
}

}  // namespace tagkg
