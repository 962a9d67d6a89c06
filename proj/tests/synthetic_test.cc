#include "tagkg/synthetic.h"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "tagkg/metrics.h"
#include "test_util.h"

namespace tagkg {
namespace {

TEST(SyntheticTest, PlantedConditionalRate) {
  SyntheticSpec spec;
  spec.zipf_exponent = 0;  // every leaf at base_rate
  spec.n_train = 5000;
  spec.n_eval = 10;
  spec.planted_pairs = {{10, 11, 0.9, "Conjunction"}};
  const auto data = GenerateSynthetic(spec);
  const auto &d = data.dataset.train;
  double trig = 0, both = 0;
  for (int s = 0; s < d.num_samples(); ++s) {
    if (d.labels(s, 10) == 0) continue;
    ++trig;
    both += d.labels(s, 11);
  }
  ASSERT_GT(trig, 400);
  EXPECT_NEAR(both / trig, 0.9, 0.05);
  ASSERT_NE(data.kg.Find(data.kg.tag_ids[10], data.kg.tag_ids[11]), nullptr);
  EXPECT_EQ(data.kg.Find(data.kg.tag_ids[10], data.kg.tag_ids[11])->at("Conjunction"), 1);
}

TEST(SyntheticTest, FathersFollowChildren) {
  SyntheticSpec spec;
  spec.n_train = 500;
  spec.n_eval = 10;
  const auto data = GenerateSynthetic(spec);
  const auto &onto = data.ontology;
  const auto &d = data.dataset.train;
  for (int s = 0; s < d.num_samples(); ++s)
    for (int i = 0; i < spec.n_labels; ++i) {
      if (d.labels(s, i) == 0) continue;
      for (const auto &f : onto.Get(data.dataset.label_ids[i]).father_ids)
        EXPECT_EQ(d.labels(s, onto.IndexOf(f)), 1);
    }
  EXPECT_EQ(onto.roots().size(), 6u);
}

TEST(SyntheticTest, NoiselessFeaturesAreLinearlyDecodable) {
  SyntheticSpec spec;
  spec.snr = std::numeric_limits<double>::infinity();
  spec.n_train = 400;
  spec.n_eval = 200;
  spec.auto_pairs = 4;
  const auto data = GenerateSynthetic(spec);
  auto to_eigen = [](const Matrix &m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
  };
  const Eigen::MatrixXd x = to_eigen(data.dataset.train.features);
  const Eigen::MatrixXd y = to_eigen(data.dataset.train.labels);
  const Eigen::MatrixXd w = x.completeOrthogonalDecomposition().solve(y);
  const Eigen::MatrixXd pred = to_eigen(data.dataset.eval.features) * w;
  Matrix scores(static_cast<int>(pred.rows()), static_cast<int>(pred.cols()));
  for (int i = 0; i < scores.rows(); ++i)
    for (int j = 0; j < scores.cols(); ++j) scores(i, j) = pred(i, j);
  EXPECT_NEAR(Evaluate(scores, data.dataset.eval.labels).map, 1.0, 1e-9);
}

TEST(SyntheticTest, SameSeedSameBytes) {
  SyntheticSpec spec;
  spec.n_train = 300;
  spec.n_eval = 50;
  spec.auto_pairs = 6;
  spec.kg_noise = 0.3;
  const std::string a = testing::TempDir("synth_a"), b = testing::TempDir("synth_b");
  SaveSynthetic(GenerateSynthetic(spec), spec, a);
  SaveSynthetic(GenerateSynthetic(spec), spec, b);
  for (const char *f : {"dataset/train_features.csv", "dataset/eval_labels.csv", "ontology.json",
                        "temporal_kg.jsonl", "spec.json"})
    EXPECT_EQ(ReadFile(JoinPath(a, f)), ReadFile(JoinPath(b, f))) << f;
  spec.seed = 1;
  const std::string c = testing::TempDir("synth_c");
  SaveSynthetic(GenerateSynthetic(spec), spec, c);
  EXPECT_NE(ReadFile(JoinPath(a, "dataset/train_features.csv")), ReadFile(JoinPath(c, "dataset/train_features.csv")));
}

TEST(SyntheticTest, SpecJsonRoundTrip) {
  SyntheticSpec spec;
  spec.snr = std::numeric_limits<double>::infinity();
  spec.planted_pairs = {{7, 9, 0.75, "Precedence"}};
  const auto back = SyntheticSpec::FromJson(spec.ToJson());
  EXPECT_EQ(back.ToJson(), spec.ToJson());
  EXPECT_TRUE(std::isinf(back.snr));
  SyntheticSpec bad;
  bad.planted_pairs = {{7, 99, 0.5, "Conjunction"}};
  EXPECT_THROW(bad.Validate(), Error);
}

}  // namespace
}  // namespace tagkg
