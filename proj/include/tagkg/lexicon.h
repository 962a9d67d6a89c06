#ifndef TAGKG_LEXICON_H_
#define TAGKG_LEXICON_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tagkg {

enum class Pos { kNoun, kVerb, kAdj, kAdv };

const char *PosName(Pos pos);
// Accepts "noun"/"verb"/"adj"/"adv" and the WordNet letters n/v/a/s/r.
std::optional<Pos> ParsePos(std::string_view s);

struct Synset {
  std::string id;
  Pos pos = Pos::kNoun;
  std::vector<std::string> lemmas;
  std::vector<std::string> gloss_tokens;
};

// Lowercases and splits on anything that is not a letter, digit, '_' or '-'.
std::vector<std::string> Tokenize(std::string_view text);

// A small WordNet-style lexical database. Immutable once loaded; every query
// is a const read.
//
// On disk it is a directory with three UTF-8 files:
//   synsets.tsv    id <TAB> pos <TAB> lemma,lemma,... <TAB> gloss
//   exceptions.tsv inflected <TAB> pos <TAB> lemma
//   stopwords.txt  one word per line
// Blank lines and lines starting with '#' are ignored. Sense priority of a
// lemma follows the order in which its synsets appear in synsets.tsv.
class Lexicon {
 public:
  static Lexicon Load(const std::string &dir);

  // Builder interface, used by the loader and by tests.
  void AddSynset(Synset synset);
  void AddException(std::string inflected, Pos pos, std::string lemma);
  void AddStopword(std::string word);

  bool IsStopword(std::string_view token) const;
  bool HasEntry(std::string_view lemma, Pos pos) const;
  const Synset *FindSynset(std::string_view id) const;
  // Synset ids for (lemma, pos) in sense-priority order; empty if unknown.
  const std::vector<std::string> &Senses(std::string_view lemma, Pos pos) const;

  size_t num_synsets() const { return synsets_.size(); }

  // Exception table first, then the token itself if it is a known lemma,
  // then the ordered suffix rules; the first candidate with an entry wins.
  std::string Lemmatize(std::string_view token, Pos pos) const;

  // Simplified Lesk: the sense of (target, pos) whose gloss shares the most
  // tokens with the context. Context stopwords and the target itself are
  // ignored; gloss tokens are counted with multiplicity. Ties go to the
  // higher-priority sense.
  std::optional<std::string> Disambiguate(
      std::string_view target, Pos pos,
      const std::vector<std::string> &context) const;

  // Lemmas of the synset other than `query`, in stored order. Throws
  // IntegrityError for an unknown id.
  std::vector<std::string> SynonymsOf(std::string_view synset_id,
                                      std::string_view query) const;

  // Overlap score used by Disambiguate, exposed for inspection.
  int LeskOverlap(const Synset &synset, std::string_view target,
                  const std::vector<std::string> &context) const;

 private:
  using SenseKey = std::pair<std::string, Pos>;

  std::map<std::string, Synset, std::less<>> synsets_;
  std::map<SenseKey, std::vector<std::string>> sense_index_;
  std::map<SenseKey, std::string> exceptions_;
  std::set<std::string, std::less<>> stopwords_;
};

}  // namespace tagkg

#endif  // TAGKG_LEXICON_H_
