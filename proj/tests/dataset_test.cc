#include "tagkg/dataset.h"

#include <gtest/gtest.h>

#include <random>

#include "oracles.h"
#include "tagkg/error.h"
#include "test_util.h"

namespace tagkg {
namespace {

Dataset Rows(int n, int labels) {
  Dataset d{Matrix(n, 2), Matrix(n, labels)};
  for (int i = 0; i < n; ++i) {
    d.features(i, 0) = i;
    d.labels(i, i % labels) = 1;
  }
  return d;
}

TEST(DatasetTest, SubsampleSizeAndCounts) {
  const auto d = Rows(1000, 7);
  const auto s = Subsample(d, 0.01, 3);
  ASSERT_EQ(s.indices.size(), 10u);
  EXPECT_EQ(s.train.num_samples(), 10);
  EXPECT_TRUE(std::is_sorted(s.indices.begin(), s.indices.end()));
  std::vector<long long> counts(7);
  for (size_t k = 0; k < s.indices.size(); ++k) {
    EXPECT_EQ(s.train.features(static_cast<int>(k), 0), s.indices[k]);
    ++counts[s.indices[k] % 7];
  }
  EXPECT_EQ(s.per_class_counts, counts);
  EXPECT_EQ(s.per_class_counts, s.train.PositivesPerClass());
}

TEST(DatasetTest, SubsampleSeedsAndEdges) {
  const auto d = Rows(1000, 3);
  EXPECT_EQ(Subsample(d, 0.01, 1).indices, Subsample(d, 0.01, 1).indices);
  EXPECT_NE(Subsample(d, 0.01, 1).indices, Subsample(d, 0.01, 2).indices);
  const auto all = Subsample(d, 1.0, 5);
  EXPECT_EQ(all.train.features, d.features);
  EXPECT_EQ(all.train.labels, d.labels);
  EXPECT_THROW(Subsample(d, 0.0, 1), Error);
  EXPECT_THROW(Subsample(d, 1.5, 1), Error);
  EXPECT_THROW(Subsample(d, -0.1, 1), Error);
}

TEST(DatasetTest, CsvRoundTrip) {
  std::mt19937_64 rng(4);
  const auto m = oracle::RandomMatrix(5, 3, rng, -1e3, 1e3);
  EXPECT_EQ(MatrixFromCsv(MatrixToCsv(m)), m);
  EXPECT_THROW(MatrixFromCsv("2,2\n1,2\n3\n"), ParseError);

  SplitDataset sd{Rows(6, 2), Rows(4, 2), {"x", "y"}};
  const std::string dir = testing::TempDir("dataset_rt");
  sd.Save(dir);
  const auto back = SplitDataset::Load(dir);
  EXPECT_EQ(back.train.features, sd.train.features);
  EXPECT_EQ(back.eval.labels, sd.eval.labels);
  EXPECT_EQ(back.label_ids, sd.label_ids);
}

TEST(DatasetTest, ValidateRejectsBadLabels) {
  Dataset d = Rows(3, 2);
  d.labels(0, 0) = 0.5;
  EXPECT_THROW(d.Validate(), Error);
  Dataset e{Matrix(3, 2), Matrix(2, 2)};
  EXPECT_THROW(e.Validate(), Error);
}

}  // namespace
}  // namespace tagkg
