#include "tagkg/ontology.h"

#include <gtest/gtest.h>

#include <set>

#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "test_util.h"

namespace tagkg {
namespace {

class OntologyFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    lex_ = new Lexicon(Lexicon::Load(testing::DataPath("lexicon")));
    onto_ = new TagOntology(TagOntology::Load(testing::DataPath("audioset_subset/ontology.json"),
                                              OntologyFlavor::kAudioSetJson));
  }
  static void TearDownTestSuite() {
    delete lex_;
    delete onto_;
  }
  static Lexicon *lex_;
  static TagOntology *onto_;
};
Lexicon *OntologyFixture::lex_ = nullptr;
TagOntology *OntologyFixture::onto_ = nullptr;

std::vector<std::vector<std::string>> TokensOf(const std::vector<Query> &qs, QuerySource src) {
  std::vector<std::vector<std::string>> out;
  for (const auto &q : qs) {
    if (q.source == src) out.push_back(q.tokens);
  }
  return out;
}

TEST(OntologyTest, ParentOfTwo) {
  const auto onto = TagOntology::Parse(
      R"([{"id":"p","name":"Parent","child_ids":["a","b"]},
          {"id":"a","name":"A","child_ids":[]},
          {"id":"b","name":"B"}])",
      OntologyFlavor::kAudioSetJson);
  EXPECT_EQ(onto.roots(), std::vector<std::string>{"p"});
  EXPECT_EQ(onto.Get("a").father_ids, std::vector<std::string>{"p"});
  EXPECT_EQ(onto.Get("b").father_ids, std::vector<std::string>{"p"});
  EXPECT_TRUE(onto.Get("a").is_leaf);
  EXPECT_FALSE(onto.Get("p").is_leaf);
}

TEST_F(OntologyFixture, HissHasThreeFathers) {
  const Tag &hiss = onto_->Get("/m/07qrkrw");
  EXPECT_EQ(hiss.name, "Hiss");
  EXPECT_EQ(hiss.father_ids, (std::vector<std::string>{"/m/01yrx", "/m/078jl", "/m/01j423"}));
}

TEST_F(OntologyFixture, FathersInvertChildren) {
  for (const auto &t : onto_->tags()) {
    for (const auto &c : t.child_ids) {
      const auto &f = onto_->Get(c).father_ids;
      EXPECT_EQ(std::count(f.begin(), f.end(), t.id), 1);
    }
    for (const auto &f : t.father_ids) {
      const auto &cs = onto_->Get(f).child_ids;
      EXPECT_EQ(std::count(cs.begin(), cs.end(), t.id), 1);
    }
  }
}

TEST(OntologyTest, SelfChildIsCycle) {
  try {
    TagOntology::Parse(R"([{"id":"x","name":"X","child_ids":["x"]}])", OntologyFlavor::kAudioSetJson);
    FAIL();
  } catch (const IntegrityError &e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(OntologyTest, LongerCycleRejected) {
  EXPECT_THROW(TagOntology::Parse(R"([{"id":"a","name":"A","child_ids":["b"]},
                                      {"id":"b","name":"B","child_ids":["c"]},
                                      {"id":"c","name":"C","child_ids":["a"]}])",
                                  OntologyFlavor::kAudioSetJson),
               IntegrityError);
}

TEST(OntologyTest, DuplicateAndUnknownIds) {
  EXPECT_THROW(TagOntology::Parse(R"([{"id":"a","name":"A"},{"id":"a","name":"B"}])",
                                  OntologyFlavor::kAudioSetJson),
               IntegrityError);
  EXPECT_THROW(TagOntology::Parse(R"([{"id":"a","name":"A","child_ids":["zz"]}])",
                                  OntologyFlavor::kAudioSetJson),
               IntegrityError);
  EXPECT_THROW(TagOntology::Parse("[{", OntologyFlavor::kAudioSetJson), ParseError);
}

TEST(OntologyTest, TwoLevelFlavor) {
  const auto onto = TagOntology::Load(testing::DataPath("sonyc/taxonomy.json"),
                                      OntologyFlavor::kTwoLevel);
  int coarse = 0, fine = 0;
  for (const auto &t : onto.tags()) {
    if (t.father_ids.empty()) ++coarse;
    else ++fine;
  }
  EXPECT_EQ(coarse, 8);
  EXPECT_EQ(fine, 29);  // 23 specific labels plus six other/unknown ones
  EXPECT_EQ(onto.Get("reverse beeper").father_ids, std::vector<std::string>{"alert signal"});
}

TEST_F(OntologyFixture, RoundTripIsFixedPoint) {
  const std::string once = onto_->Serialize();
  const auto reloaded = TagOntology::Parse(once, OntologyFlavor::kAudioSetJson);
  EXPECT_EQ(reloaded.Serialize(), once);
  const auto sonyc = TagOntology::Load(testing::DataPath("sonyc/taxonomy.json"),
                                       OntologyFlavor::kTwoLevel);
  const std::string s1 = sonyc.Serialize();
  EXPECT_EQ(TagOntology::Parse(s1, OntologyFlavor::kTwoLevel).Serialize(), s1);
}

TEST_F(OntologyFixture, PreprocessRoaringCats) {
  const auto p = PreprocessName("Roaring cats (lions, tigers)", *lex_);
  EXPECT_EQ(p.main.tokens, (std::vector<std::string>{"roar", "cat"}));
  EXPECT_EQ(p.main.verb_flags, (std::vector<bool>{true, false}));
  ASSERT_EQ(p.parenthetical.size(), 2u);
  EXPECT_EQ(p.parenthetical[0].tokens, std::vector<std::string>{"lion"});
  EXPECT_EQ(p.parenthetical[1].tokens, std::vector<std::string>{"tiger"});
}

TEST_F(OntologyFixture, PreprocessSimpleNames) {
  EXPECT_EQ(PreprocessName("The Engine", *lex_).main.tokens, std::vector<std::string>{"engine"});
  EXPECT_EQ(PreprocessName("Male speech", *lex_).main.tokens,
            (std::vector<std::string>{"male", "speech"}));
  // All stopwords: the raw name survives.
  EXPECT_EQ(PreprocessName("The Who", *lex_).main.tokens, std::vector<std::string>{"the who"});
}

TEST_F(OntologyFixture, HissFatherPairs) {
  const auto qs = ExpandQueries(onto_->Get("/m/07qrkrw"), *onto_, *lex_);
  EXPECT_EQ(qs.front().tokens, std::vector<std::string>{"hiss"});
  EXPECT_EQ(TokensOf(qs, QuerySource::kFatherPair),
            (std::vector<std::vector<std::string>>{{"cat", "hiss"}, {"snake", "hiss"}, {"steam", "hiss"}}));
}

TEST_F(OntologyFixture, RoaringCatsExpansion) {
  const auto qs = ExpandQueries(onto_->Get("/m/0cdnk"), *onto_, *lex_);
  ASSERT_GE(qs.size(), 3u);
  EXPECT_EQ(qs[0].tokens, (std::vector<std::string>{"roar", "cat"}));
  EXPECT_EQ(qs[0].source, QuerySource::kBase);
  EXPECT_EQ(qs[1].tokens, std::vector<std::string>{"lion"});
  EXPECT_EQ(qs[2].tokens, std::vector<std::string>{"tiger"});
  EXPECT_EQ(qs[1].source, QuerySource::kParenthetical);
  EXPECT_TRUE(TokensOf(qs, QuerySource::kFatherPair).empty());
}

TEST_F(OntologyFixture, QueryInvariants) {
  const auto all = ExpandAll(*onto_, *lex_);
  for (const auto &t : onto_->tags()) {
    const auto &qs = all.at(t.id);
    std::set<std::vector<std::string>> seen;
    int rank_prev = 0;
    for (const auto &q : qs) {
      EXPECT_EQ(q.tag_id, t.id);
      EXPECT_FALSE(q.tokens.empty());
      EXPECT_EQ(q.tokens.size(), q.verb_flags.size());
      EXPECT_TRUE(seen.insert(q.tokens).second) << "duplicate query for " << t.id;
      EXPECT_GE(static_cast<int>(q.source), rank_prev);
      rank_prev = static_cast<int>(q.source);
    }
    EXPECT_EQ(!TokensOf(qs, QuerySource::kFatherPair).empty(), t.father_ids.size() >= 2) << t.id;
  }
}

TEST(OntologyTest, SingleFatherNoSynonymsGivesOneQuery) {
  Lexicon lex;
  const auto onto = TagOntology::Parse(
      R"([{"id":"p","name":"Water","child_ids":["c"]},{"id":"c","name":"Drip"}])",
      OntologyFlavor::kAudioSetJson);
  const auto qs = ExpandQueries(onto.Get("c"), onto, lex);
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].tokens, std::vector<std::string>{"drip"});
}

TEST_F(OntologyFixture, QueriesJsonlRoundTrip) {
  const auto all = ExpandAll(*onto_, *lex_);
  const std::string text = QueriesToJsonl(*onto_, all);
  std::vector<Query> flat;
  for (const auto &t : onto_->tags())
    for (const auto &q : all.at(t.id)) flat.push_back(q);
  EXPECT_EQ(QueriesFromJsonl(text), flat);
}

}  // namespace
}  // namespace tagkg
