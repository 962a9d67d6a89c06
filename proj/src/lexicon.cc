#include "tagkg/lexicon.h"

#include <algorithm>
#include <cctype>

#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

namespace {

struct SuffixRule {
  const char *suffix;
  const char *replacement;
};

// Tried in order; the first rewrite that names a known lemma is returned.
constexpr SuffixRule kNounRules[] = {
    {"ses", "s"}, {"ies", "y"}, {"es", "e"}, {"es", ""}, {"s", ""},
};
constexpr SuffixRule kVerbRules[] = {
    {"ies", "y"}, {"ing", ""}, {"ing", "e"}, {"ed", ""},
    {"ed", "e"},  {"es", "e"}, {"es", ""},   {"s", ""},
};

bool IsWordChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80;
}

const std::vector<std::string> kNoSenses;

}  // namespace

const char *PosName(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "noun";
    case Pos::kVerb: return "verb";
    case Pos::kAdj: return "adj";
    case Pos::kAdv: return "adv";
  }
  return "noun";
}

std::optional<Pos> ParsePos(std::string_view s) {
  if (s == "noun" || s == "n") return Pos::kNoun;
  if (s == "verb" || s == "v") return Pos::kVerb;
  if (s == "adj" || s == "a" || s == "s") return Pos::kAdj;
  if (s == "adv" || s == "r") return Pos::kAdv;
  return std::nullopt;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (IsWordChar(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Lexicon Lexicon::Load(const std::string &dir) {
  Lexicon lex;

  const std::string synsets_path = JoinPath(dir, "synsets.tsv");
  auto lines = SplitLines(ReadFile(synsets_path));
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    const int lineno = static_cast<int>(i + 1);
    if (line.empty() || line[0] == '#') continue;
    auto fields = Split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(synsets_path, lineno, "expected 4 tab-separated fields");
    }
    Synset s;
    s.id = fields[0];
    auto pos = ParsePos(fields[1]);
    if (!pos) throw ParseError(synsets_path, lineno, "bad pos '" + fields[1] + "'");
    s.pos = *pos;
    for (const auto &lemma : Split(fields[2], ',')) {
      std::string l = ToLower(Trim(lemma));
      if (!l.empty()) s.lemmas.push_back(std::move(l));
    }
    s.gloss_tokens = Tokenize(fields[3]);
    if (s.id.empty() || s.lemmas.empty() || s.gloss_tokens.empty()) {
      throw ParseError(synsets_path, lineno, "empty id, lemmas or gloss");
    }
    if (lex.synsets_.count(s.id)) {
      throw ParseError(synsets_path, lineno, "duplicate synset id " + s.id);
    }
    lex.AddSynset(std::move(s));
  }

  const std::string exc_path = JoinPath(dir, "exceptions.tsv");
  if (FileExists(exc_path)) {
    lines = SplitLines(ReadFile(exc_path));
    for (size_t i = 0; i < lines.size(); ++i) {
      const std::string &line = lines[i];
      if (line.empty() || line[0] == '#') continue;
      auto fields = Split(line, '\t');
      auto pos = fields.size() == 3 ? ParsePos(fields[1]) : std::nullopt;
      if (!pos) {
        throw ParseError(exc_path, static_cast<int>(i + 1),
                         "expected inflected<TAB>pos<TAB>lemma");
      }
      lex.AddException(ToLower(fields[0]), *pos, ToLower(fields[2]));
    }
  }

  const std::string stop_path = JoinPath(dir, "stopwords.txt");
  if (FileExists(stop_path)) {
    for (const auto &line : SplitLines(ReadFile(stop_path))) {
      std::string w = Trim(line);
      if (w.empty() || w[0] == '#') continue;
      lex.AddStopword(ToLower(w));
    }
  }
  return lex;
}

void Lexicon::AddSynset(Synset synset) {
  for (const auto &lemma : synset.lemmas) {
    auto &senses = sense_index_[{lemma, synset.pos}];
    if (std::find(senses.begin(), senses.end(), synset.id) == senses.end()) {
      senses.push_back(synset.id);
    }
  }
  std::string id = synset.id;
  synsets_[id] = std::move(synset);
}

void Lexicon::AddException(std::string inflected, Pos pos, std::string lemma) {
  exceptions_[{std::move(inflected), pos}] = std::move(lemma);
}

void Lexicon::AddStopword(std::string word) { stopwords_.insert(std::move(word)); }

bool Lexicon::IsStopword(std::string_view token) const {
  return stopwords_.find(token) != stopwords_.end();
}

bool Lexicon::HasEntry(std::string_view lemma, Pos pos) const {
  return sense_index_.count({std::string(lemma), pos}) > 0;
}

const Synset *Lexicon::FindSynset(std::string_view id) const {
  auto it = synsets_.find(id);
  return it == synsets_.end() ? nullptr : &it->second;
}

const std::vector<std::string> &Lexicon::Senses(std::string_view lemma,
                                                Pos pos) const {
  auto it = sense_index_.find({std::string(lemma), pos});
  return it == sense_index_.end() ? kNoSenses : it->second;
}

std::string Lexicon::Lemmatize(std::string_view token, Pos pos) const {
  std::string word(token);
  if (auto it = exceptions_.find({word, pos}); it != exceptions_.end()) {
    return it->second;
  }
  if (HasEntry(word, pos)) return word;

  auto try_rules = [&](const auto &rules) -> std::optional<std::string> {
    for (const SuffixRule &rule : rules) {
      std::string_view suffix = rule.suffix;
      if (word.size() <= suffix.size() || !word.ends_with(suffix)) continue;
      std::string cand = word.substr(0, word.size() - suffix.size()) + rule.replacement;
      if (HasEntry(cand, pos)) return cand;
    }
    return std::nullopt;
  };
  std::optional<std::string> found;
  if (pos == Pos::kNoun) found = try_rules(kNounRules);
  if (pos == Pos::kVerb) found = try_rules(kVerbRules);
  return found ? *found : word;
}

int Lexicon::LeskOverlap(const Synset &synset, std::string_view target,
                         const std::vector<std::string> &context) const {
  std::set<std::string_view> ctx;
  for (const auto &tok : context) {
    if (tok == target || IsStopword(tok)) continue;
    ctx.insert(tok);
  }
  int overlap = 0;
  for (const auto &g : synset.gloss_tokens) {
    if (ctx.count(g)) ++overlap;
  }
  return overlap;
}

std::optional<std::string> Lexicon::Disambiguate(
    std::string_view target, Pos pos,
    const std::vector<std::string> &context) const {
  const auto &senses = Senses(target, pos);
  if (senses.empty()) return std::nullopt;
  const std::string *best = nullptr;
  int best_score = -1;
  for (const auto &id : senses) {
    const Synset *s = FindSynset(id);
    if (s == nullptr) throw IntegrityError("sense index names unknown synset " + id);
    int score = LeskOverlap(*s, target, context);
    if (score > best_score) {  // strict: earlier sense wins ties
      best_score = score;
      best = &id;
    }
  }
  return *best;
}

std::vector<std::string> Lexicon::SynonymsOf(std::string_view synset_id,
                                             std::string_view query) const {
  const Synset *s = FindSynset(synset_id);
  if (s == nullptr) {
    throw IntegrityError("unknown synset id '" + std::string(synset_id) + "'");
  }
  std::vector<std::string> out;
  for (const auto &lemma : s->lemmas) {
    if (lemma != query) out.push_back(lemma);
  }
  return out;
}

}  // namespace tagkg
