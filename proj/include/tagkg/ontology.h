#ifndef TAGKG_ONTOLOGY_H_
#define TAGKG_ONTOLOGY_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tagkg/lexicon.h"

namespace tagkg {

struct Tag {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> child_ids;
  // Inverse of child_ids, in the order the parents appear in the source file.
  std::vector<std::string> father_ids;
  bool is_leaf = true;
};

enum class OntologyFlavor { kAudioSetJson, kTwoLevel };

const char *FlavorName(OntologyFlavor flavor);
OntologyFlavor ParseFlavor(std::string_view s);

// A tag hierarchy whose edges are IsA links (child IsA father). Immutable after
// load; tag order is the file order and defines node indices downstream.
class TagOntology {
 public:
  // AudioSet flavor: JSON array of {id, name, description, child_ids}.
  // Two-level flavor: JSON object {coarse name: [fine name, ...]}; names are
  // used as ids and coarse tags become fathers of their fine tags.
  // Throws ParseError, or IntegrityError for duplicate ids, unknown child
  // ids and cycles (the message names the offending id).
  static TagOntology Load(const std::string &path, OntologyFlavor flavor);
  static TagOntology Parse(std::string_view json_text, OntologyFlavor flavor,
                           const std::string &origin = "<memory>");
  // Builds from tags whose child_ids are set; derives fathers and validates.
  static TagOntology FromTags(std::vector<Tag> tags, OntologyFlavor flavor);

  // Serializes in the same flavor it was loaded with.
  std::string Serialize() const;
  void Save(const std::string &path) const;

  const std::vector<Tag> &tags() const { return tags_; }
  const std::vector<std::string> &roots() const { return roots_; }
  OntologyFlavor flavor() const { return flavor_; }
  size_t size() const { return tags_.size(); }

  const Tag *Find(std::string_view id) const;
  const Tag &Get(std::string_view id) const;
  // Node index of a tag id, -1 if absent.
  int IndexOf(std::string_view id) const;
  // Resolves an id or a (case-insensitive) display name.
  const Tag *FindByIdOrName(std::string_view key) const;

 private:
  void Finalize();

  std::vector<Tag> tags_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<std::string> roots_;
  OntologyFlavor flavor_ = OntologyFlavor::kAudioSetJson;
};

enum class QuerySource { kBase, kParenthetical, kSynonym, kFatherPair };

const char *QuerySourceName(QuerySource s);
QuerySource ParseQuerySource(std::string_view s);

struct Query {
  std::string tag_id;
  std::vector<std::string> tokens;
  std::vector<bool> verb_flags;
  QuerySource source = QuerySource::kBase;

  bool operator==(const Query &) const = default;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<bool> verb_flags;
};

struct PreprocessedName {
  TokenSeq main;
  std::vector<TokenSeq> parenthetical;
};

// Lowercases, pulls comma-separated groups out of parentheses, drops
// stopwords and lemmatizes. A token ending in -ing whose verb lemma is known
// is treated (and flagged) as a verb; everything else as a noun. If nothing
// survives in the main part the raw lowercased name becomes the only token.
PreprocessedName PreprocessName(std::string_view name, const Lexicon &lex);

// Expanded queries of one tag in the order base, parenthetical, synonym,
// father-pair, deduplicated by token sequence.
std::vector<Query> ExpandQueries(const Tag &tag, const TagOntology &ontology,
                                 const Lexicon &lex);

// Queries for every tag, in ontology order.
std::map<std::string, std::vector<Query>> ExpandAll(const TagOntology &ontology,
                                                    const Lexicon &lex);

// One JSON object per line: tag_id, tokens, verb_flags, source.
std::string QueriesToJsonl(const TagOntology &ontology,
                           const std::map<std::string, std::vector<Query>> &queries);
std::vector<Query> QueriesFromJsonl(std::string_view text);

}  // namespace tagkg

#endif  // TAGKG_ONTOLOGY_H_
