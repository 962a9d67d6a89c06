#include "tagkg/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.h"
#include "tagkg/error.h"

namespace tagkg {
namespace {

using V = std::vector<double>;

TEST(MetricsTest, AveragePrecisionExamples) {
  EXPECT_NEAR(*AveragePrecision(V{0.9, 0.8, 0.7}, V{1, 0, 1}), 0.833333, 5e-7);
  EXPECT_EQ(*AveragePrecision(V{0.9, 0.8, 0.1, 0.05}, V{1, 1, 0, 0}), 1.0);
  EXPECT_FALSE(AveragePrecision(V{0.9, 0.8}, V{0, 0}).has_value());
  EXPECT_THROW(AveragePrecision(V{0.9}, V{1, 0}), DimensionError);
}

TEST(MetricsTest, RocAucExamples) {
  EXPECT_EQ(*RocAuc(V{0.9, 0.8, 0.1}, V{1, 1, 0}), 1.0);
  EXPECT_EQ(*RocAuc(V{0.3, 0.3, 0.3, 0.3}, V{1, 0, 1, 0}), 0.5);
  EXPECT_EQ(*RocAuc(V{0.9, 0.4, 0.6}, V{1, 0, 1}), 1.0);
  EXPECT_FALSE(RocAuc(V{0.9, 0.4}, V{1, 1}).has_value());
}

TEST(MetricsTest, AuprcSingleClassAndMacro) {
  const Matrix s{{0.9}, {0.8}, {0.7}}, t{{1}, {0}, {1}};
  EXPECT_EQ(*Auprc(s, t, AuprcMode::kMicro), *AveragePrecision(V{0.9, 0.8, 0.7}, V{1, 0, 1}));
  EXPECT_EQ(*Auprc(s, t, AuprcMode::kMacro), *AveragePrecision(V{0.9, 0.8, 0.7}, V{1, 0, 1}));
  // Class 0 ranks its positive first (AP 1), class 1 second (AP 0.5).
  const Matrix s2{{0.9, 0.2}, {0.2, 0.9}}, t2{{1, 1}, {0, 0}};
  EXPECT_EQ(*Auprc(s2, t2, AuprcMode::kMacro), 0.75);
  EXPECT_FALSE(Auprc(Matrix(2, 2), Matrix(2, 2), AuprcMode::kMicro).has_value());
}

TEST(MetricsTest, MicroOnIdenticalClassesEqualsAp) {
  std::mt19937_64 rng(1);
  const V s{0.3, 0.8, 0.1, 0.65, 0.5}, t{1, 0, 0, 1, 1};
  Matrix sm(5, 3), tm(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int c = 0; c < 3; ++c) {
      sm(i, c) = s[i];
      tm(i, c) = t[i];
    }
  EXPECT_NEAR(*Auprc(sm, tm, AuprcMode::kMicro), *AveragePrecision(s, t), 1e-12);
}

TEST(MetricsTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> rows(2, 8), cols(1, 5);
  std::bernoulli_distribution coin(0.4);
  int checked = 0;
  while (checked < 10) {
    const int n = rows(rng), c = cols(rng);
    Matrix s = oracle::RandomMatrix(n, c, rng, 0.0, 1.0), t(n, c);
    for (double &v : t.data()) v = coin(rng);
    bool ok = true;  // every class needs both outcomes so all metrics are defined
    for (int j = 0; j < c; ++j) {
      double pos = 0;
      for (int i = 0; i < n; ++i) pos += t(i, j);
      ok = ok && pos > 0 && pos < n;
    }
    if (!ok) continue;
    ++checked;
    const auto r = Evaluate(s, t);
    const auto b = oracle::BruteEvaluate(s, t);
    EXPECT_NEAR(r.map, b.map, 1e-12);
    EXPECT_NEAR(r.mauc, b.mauc, 1e-12);
    EXPECT_NEAR(r.micro_auprc, b.micro, 1e-12);
    EXPECT_NEAR(r.macro_auprc, b.macro, 1e-12);
    EXPECT_EQ(r.map, r.macro_auprc);

    Matrix warped = s;  // strictly monotone transform
    for (double &v : warped.data()) v = std::exp(3 * v) - 7;
    const auto w = Evaluate(warped, t);
    EXPECT_EQ(w.map, r.map);
    EXPECT_EQ(w.mauc, r.mauc);
    EXPECT_EQ(w.micro_auprc, r.micro_auprc);
  }
}

TEST(MetricsTest, SkippedClassesReported) {
  const Matrix s{{0.9, 0.1, 0.5}, {0.2, 0.7, 0.5}}, t{{1, 0, 1}, {0, 0, 1}};
  const auto r = Evaluate(s, t);
  EXPECT_EQ(r.skipped_classes, std::vector<int>{1});
  EXPECT_EQ(r.auc_skipped_classes, (std::vector<int>{1, 2}));
  EXPECT_FALSE(r.per_class_ap[1].has_value());
  EXPECT_EQ(r.map, (1.0 + 1.0) / 2);
  EXPECT_EQ(r.mauc, 1.0);
  const std::string json = r.ToJson({"a", "b", "c"});
  EXPECT_NE(json.find("\"b\""), std::string::npos);
}

TEST(MetricsTest, GroupDeltaExamples) {
  using O = std::vector<std::optional<double>>;
  const O same{0.4, 0.5, 0.6};
  for (const auto &b : ComputeGroupDelta(same, same, {3, 10, 100}, {5, 50}).buckets) EXPECT_EQ(*b.delta, 0.0);

  const auto parts = ComputeGroupDelta(same, same, {3, 10, 100}, {5, 50});
  ASSERT_EQ(parts.buckets.size(), 3u);
  for (const auto &b : parts.buckets) EXPECT_EQ(b.n_classes, 1);
  EXPECT_EQ(parts.bucket_of_class, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(parts.buckets[2].upper, std::numeric_limits<double>::infinity());

  const auto two = ComputeGroupDelta(O{0.5, 0.2}, O{0.6, 0.5}, {7, 9}, {5, 20});
  EXPECT_NEAR(*two.buckets[1].delta, 0.2, 1e-12);
  EXPECT_FALSE(two.buckets[0].delta.has_value());
  EXPECT_EQ(two.buckets[0].n_classes, 0);

  // Boundary counts fall in the lower bucket; skipped classes are excluded.
  const auto edge = ComputeGroupDelta(O{0.1, std::nullopt}, O{0.2, 0.3}, {5, 6}, {5});
  EXPECT_EQ(edge.bucket_of_class, (std::vector<int>{0, -1}));
  EXPECT_EQ(edge.buckets[1].n_classes, 0);
  EXPECT_THROW(ComputeGroupDelta(O{0.1}, O{0.1, 0.2}, {1}, {5}), DimensionError);
}

TEST(MetricsTest, GroupDeltaCsvRoundTrip) {
  using O = std::vector<std::optional<double>>;
  const auto gd = ComputeGroupDelta(O{0.5, 0.2, 0.125}, O{0.6, 0.5, 0.1}, {7, 9, 1000}, {5, 20, 50});
  const std::string csv = gd.ToCsv();
  const auto back = GroupDelta::FromCsv(csv);
  ASSERT_EQ(back.buckets.size(), gd.buckets.size());
  for (size_t i = 0; i < gd.buckets.size(); ++i) {
    EXPECT_EQ(back.buckets[i].lower, gd.buckets[i].lower);
    EXPECT_EQ(back.buckets[i].upper, gd.buckets[i].upper);
    EXPECT_EQ(back.buckets[i].n_classes, gd.buckets[i].n_classes);
    EXPECT_EQ(back.buckets[i].delta, gd.buckets[i].delta);
  }
  EXPECT_EQ(back.ToCsv(), csv);
  EXPECT_THROW(GroupDelta::FromCsv("nonsense\n1,2\n"), ParseError);
  const std::string svg = GroupDeltaSvg({{"AP", gd}}, "delta");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

}  // namespace
}  // namespace tagkg
