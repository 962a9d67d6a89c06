#include "tagkg/eventuality.h"

#include <gtest/gtest.h>

#include <set>

#include "tagkg/error.h"
#include "test_util.h"

namespace tagkg {
namespace {

const char *kEvents =
    R"({"id":"e1","tokens":["vehicle","approach"],"verb_indices":[1],"frequency":50}
{"id":"e2","tokens":["vehicle","pass"],"verb_indices":[1],"frequency":80}
{"id":"e3","tokens":["engine","roar"],"verb_indices":[1],"frequency":30}
)";
const char *kEdges = R"({"head":"e1","tail":"e3","relations":{"Conjunction":3}}
{"head":"e2","tail":"e3","relations":{"Precedence":2,"Co_Occurrence":1}}
)";

TEST(EventualityTest, LoadsSmallGraph) {
  const auto g = EventualityGraph::Parse(kEvents, kEdges);
  EXPECT_EQ(g.num_events(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.Find("e2")->Text(), "vehicle pass");
  EXPECT_EQ(g.OutEdges("e1").size(), 1u);
  EXPECT_EQ(g.FindEdge("e2", "e3")->relations.at("Co_Occurrence"), 1);
  EXPECT_EQ(g.FindEdge("e3", "e2"), nullptr);
}

TEST(EventualityTest, DanglingEdgeNamesId) {
  try {
    EventualityGraph::Parse(kEvents, R"({"head":"e1","tail":"ghost","relations":{"Conjunction":1}})");
    FAIL();
  } catch (const IntegrityError &e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(EventualityTest, MalformedLineReportsLine) {
  try {
    EventualityGraph::Parse(std::string(kEvents) + "{not json\n", "");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(EventualityGraph::Parse(kEvents, R"({"head":"e1","tail":"e1","relations":{"Conjunction":1}})"),
               ParseError);
  EXPECT_THROW(EventualityGraph::Parse(kEvents, R"({"head":"e1","tail":"e2","relations":{"Conjunction":0}})"),
               ParseError);
  EXPECT_THROW(EventualityGraph::Parse(kEvents, R"({"head":"e1","tail":"e2","relations":{}})"),
               ParseError);
}

TEST(EventualityTest, UnknownRelationKeptVerbatim) {
  const auto g = EventualityGraph::Parse(kEvents, R"({"head":"e1","tail":"e2","relations":{"Wobble":2}})");
  EXPECT_EQ(g.FindEdge("e1", "e2")->relations.at("Wobble"), 2);
  EXPECT_TRUE(IsKnownRelation("Precedence"));
  EXPECT_FALSE(IsKnownRelation("Wobble"));
}

TEST(EventualityTest, FrequencyThreshold) {
  const auto g = EventualityGraph::Parse(
      R"({"id":"four","tokens":["dog","bark"],"verb_indices":[1],"frequency":4}
{"id":"five","tokens":["cat","purr"],"verb_indices":[1],"frequency":5}
)",
      "");
  const auto f = FilterEvents(g);
  EXPECT_EQ(f.Find("four"), nullptr);
  EXPECT_NE(f.Find("five"), nullptr);
}

TEST(EventualityTest, DuplicateVerbRemoved) {
  const auto g = EventualityGraph::Parse(
      R"({"id":"dup","tokens":["i","say","say"],"verb_indices":[1,2],"frequency":100}
{"id":"apart","tokens":["he","eat","and","eat"],"verb_indices":[1,3],"frequency":100}
{"id":"ok","tokens":["you","say"],"verb_indices":[1],"frequency":100}
)",
      R"({"head":"dup","tail":"ok","relations":{"Conjunction":1}}
{"head":"apart","tail":"ok","relations":{"Conjunction":1}}
)");
  const auto f = FilterEvents(g);
  EXPECT_EQ(f.Find("dup"), nullptr);
  EXPECT_NE(f.Find("apart"), nullptr);
  EXPECT_NE(f.Find("ok"), nullptr);
  EXPECT_EQ(f.num_edges(), 1u);
  EXPECT_EQ(g.num_events(), 3u);  // input untouched
}

TEST(EventualityTest, CleanGraphIsFixedPoint) {
  const auto g = EventualityGraph::Parse(kEvents, kEdges);
  const auto f = FilterEvents(g);
  EXPECT_EQ(f.EventsToJsonl(), g.EventsToJsonl());
  EXPECT_EQ(f.EdgesToJsonl(), g.EdgesToJsonl());
}

TEST(EventualityTest, FixtureFilterMatchesBruteForce) {
  const auto g = EventualityGraph::Load(testing::DataPath("fig1/events.jsonl"),
                                        testing::DataPath("fig1/edges.jsonl"));
  const auto f = FilterEvents(g);
  std::set<std::string> kept;
  for (const auto &e : g.events()) {
    bool dup = false;
    for (size_t a = 0; a + 1 < e.verb_indices.size(); ++a) {
      const int i = e.verb_indices[a], j = e.verb_indices[a + 1];
      if (j == i + 1 && e.tokens[i] == e.tokens[j]) dup = true;
    }
    if (e.frequency >= 5 && !dup) kept.insert(e.id);
  }
  std::set<std::string> got;
  for (const auto &e : f.events()) got.insert(e.id);
  EXPECT_EQ(got, kept);
  EXPECT_EQ(kept.count("ev07"), 0u);  // "i say say"
  EXPECT_EQ(kept.count("ev08"), 0u);  // frequency 4
  EXPECT_EQ(kept.count("ev09"), 1u);  // frequency 5
  size_t edges = 0;
  for (const auto &e : g.edges()) edges += kept.count(e.head_id) && kept.count(e.tail_id);
  EXPECT_EQ(f.num_edges(), edges);
  // Idempotent.
  const auto ff = FilterEvents(f);
  EXPECT_EQ(ff.EventsToJsonl(), f.EventsToJsonl());
  EXPECT_EQ(ff.EdgesToJsonl(), f.EdgesToJsonl());
}

TEST(EventualityTest, Fig1TemporalLinksPresent) {
  const auto g = EventualityGraph::Load(testing::DataPath("fig1/events.jsonl"),
                                        testing::DataPath("fig1/edges.jsonl"));
  EXPECT_EQ(g.FindEdge("ev01", "ev03")->relations.count("Conjunction"), 1u);
  EXPECT_EQ(g.FindEdge("ev02", "ev03")->relations.count("Precedence"), 1u);
  EXPECT_EQ(g.FindEdge("ev05", "ev02")->relations.count("Conjunction"), 1u);
}

}  // namespace
}  // namespace tagkg
