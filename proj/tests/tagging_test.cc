#include "tagkg/tagging.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "tagkg/error.h"
#include "tagkg/kgbuild.h"
#include "test_util.h"

namespace tagkg {
namespace {

ModelConfig SmallConfig(ModelVariant v) {
  ModelConfig c;
  c.variant = v;
  c.d_feat = 3;
  c.n_labels = 4;
  c.d_hidden = 4;
  c.d_embed = 3;
  c.gcn_hidden = 3;
  return c;
}

LabelGraph SmallGraph(int relations, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.4);
  LabelGraph g;
  for (int r = 0; r < relations; ++r) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j && coin(rng)) e.push_back({i, j});
    g.adjacency.push_back(NormalizedAdjacency(4, e, r == 0));
    g.relation_names.push_back("rel" + std::to_string(r));
  }
  return g;
}

Dataset RandomData(int n, int d, int labels, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.3);
  Dataset ds{oracle::RandomMatrix(n, d, rng), Matrix(n, labels)};
  for (double &v : ds.labels.data()) v = coin(rng) ? 1.0 : 0.0;
  return ds;
}

TEST(TaggingTest, ZeroParametersGiveHalf) {
  for (auto v : {ModelVariant::kBaselineNoKg, ModelVariant::kGcnSingle, ModelVariant::kDgcn}) {
    Rng rng(1);
    auto m = TaggingModel::Create(SmallConfig(v), SmallGraph(v == ModelVariant::kDgcn ? 2 : 1, 1), rng);
    for (auto &[name, p] : m.Parameters())
      for (double &x : p->data()) x = 0;
    std::mt19937_64 g(2);
    const Matrix probs = m.Predict(oracle::RandomMatrix(5, 3, g));
    for (double p : probs.data()) EXPECT_EQ(p, 0.5);
  }
}

TEST(TaggingTest, HandSetBaseline) {
  ModelConfig c;
  c.variant = ModelVariant::kBaselineNoKg;
  c.d_feat = c.d_hidden = c.d_embed = 1;
  c.n_labels = 2;
  Rng rng(0);
  auto m = TaggingModel::Create(c, {}, rng);
  m.enc_w1 = Matrix{{1}};
  m.enc_b1 = Matrix{{0}};
  m.enc_w2 = Matrix{{2}};
  m.enc_b2 = Matrix{{0}};
  m.free_labels = Matrix{{1}, {-1}};
  const auto p = m.Predict(Matrix{{1}});
  EXPECT_NEAR(p(0, 0), 0.8808, 5e-5);
  EXPECT_NEAR(p(0, 1), 0.1192, 5e-5);
  EXPECT_DOUBLE_EQ(p(0, 0), 1 / (1 + std::exp(-2.0)));
}

TEST(TaggingTest, DgcnReducesToSingleRelation) {
  Rng rng(3);
  auto single = TaggingModel::Create(SmallConfig(ModelVariant::kGcnSingle), {{Matrix::Identity(4)}, {"none"}, {}}, rng);
  auto dual = TaggingModel::Create(SmallConfig(ModelVariant::kDgcn),
                                   {{Matrix::Identity(4), Matrix::Identity(4)}, {"a", "b"}, {}}, rng);
  dual.enc_w1 = single.enc_w1;
  dual.enc_b1 = single.enc_b1;
  dual.enc_w2 = single.enc_w2;
  dual.enc_b2 = single.enc_b2;
  std::mt19937_64 bias_rng(30);
  for (size_t l = 0; l < single.gcn.size(); ++l) {
    single.gcn[l].biases[0] = oracle::RandomMatrix(1, single.gcn[l].d_out(), bias_rng);
    for (int r = 0; r < 2; ++r) {
      Matrix w = single.gcn[l].weights[0], b = single.gcn[l].biases[0];
      for (double &x : w.data()) x /= 2;
      for (double &x : b.data()) x /= 2;
      dual.gcn[l].weights[r] = w;
      dual.gcn[l].biases[r] = b;
    }
  }
  EXPECT_LT(MaxAbsDiff(dual.LabelEmbeddings(), single.LabelEmbeddings()), 1e-12);
  std::mt19937_64 g(4);
  const auto x = oracle::RandomMatrix(6, 3, g);
  EXPECT_LT(MaxAbsDiff(dual.Predict(x), single.Predict(x)), 1e-12);
}

TEST(TaggingTest, SharedEncoderPath) {
  Rng rng(5);
  const auto dgcn = TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), SmallGraph(2, 5), rng);
  Rng rng2(6);
  auto base = TaggingModel::Create(SmallConfig(ModelVariant::kBaselineNoKg), {}, rng2);
  base.enc_w1 = dgcn.enc_w1;
  base.enc_b1 = dgcn.enc_b1;
  base.enc_w2 = dgcn.enc_w2;
  base.enc_b2 = dgcn.enc_b2;
  base.free_labels = dgcn.LabelEmbeddings();
  std::mt19937_64 g(7);
  const auto x = oracle::RandomMatrix(6, 3, g);
  EXPECT_EQ(base.Predict(x), dgcn.Predict(x));
}

TEST(TaggingTest, CreateRejectsBadGraphs) {
  Rng rng(0);
  EXPECT_THROW(TaggingModel::Create(SmallConfig(ModelVariant::kGcnSingle), SmallGraph(2, 1), rng), Error);
  EXPECT_THROW(TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), {}, rng), Error);
  EXPECT_THROW(TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), {{Matrix::Identity(3)}, {"x"}, {}}, rng),
               DimensionError);
  auto m = TaggingModel::Create(SmallConfig(ModelVariant::kBaselineNoKg), {}, rng);
  EXPECT_THROW(m.Predict(Matrix(2, 4)), DimensionError);
}

TEST(TaggingTest, BceValues) {
  EXPECT_NEAR(BceLoss(Matrix(2, 3, 0.5), Matrix{{0, 1, 0}, {1, 1, 0}}), 0.693147, 5e-7);
  EXPECT_NEAR(BceLoss(Matrix{{0.8}}, Matrix{{1}}), 0.223144, 5e-7);
  const Matrix y{{0, 1}, {1, 0}};
  EXPECT_LE(BceLoss(y, y), 1e-11);
  EXPECT_THROW(BceLoss(Matrix(1, 2), Matrix(2, 1)), DimensionError);
}

TEST(TaggingTest, GradientsMatchFiniteDifferences) {
  for (auto v : {ModelVariant::kBaselineNoKg, ModelVariant::kGcnSingle, ModelVariant::kDgcn}) {
    Rng rng(9);
    auto m = TaggingModel::Create(SmallConfig(v), SmallGraph(v == ModelVariant::kDgcn ? 2 : 1, 9), rng);
    // Shift biases off zero so no rectifier sits at its kink.
    std::mt19937_64 g(10);
    for (auto &[name, p] : m.Parameters())
      for (double &x : p->data()) x += std::uniform_real_distribution<double>(-0.3, 0.3)(g);
    const auto data = RandomData(7, 3, 4, 11);
    ASSERT_LE(m.NumParameters(), 500u);

    Tape tape;
    std::vector<Tape::Var> vars;
    const auto probs = m.Record(tape, data.features, &vars);
    EXPECT_LT(MaxAbsDiff(tape.value(probs), m.Predict(data.features)), 1e-14);
    tape.Backward(tape.BceMean(probs, data.labels));
    const auto params = m.Parameters();
    ASSERT_EQ(params.size(), vars.size());
    for (size_t i = 0; i < params.size(); ++i) {
      const auto numeric =
          oracle::FiniteDifference(params[i].second, [&] { return BceLoss(m.Predict(data.features), data.labels); }, 1e-5);
      const Matrix &analytic = tape.grad(vars[i]);
      for (size_t k = 0; k < numeric.size(); ++k) {
        const double a = analytic.data()[k], n = numeric.data()[k];
        EXPECT_LT(std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-7}), 1e-5)
            << VariantName(v) << " " << params[i].first << "[" << k << "]";
      }
    }
  }
}

TEST(TaggingTest, ZeroLearningRateLeavesParameters) {
  Rng rng(12);
  auto m = TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), SmallGraph(2, 12), rng);
  const auto before = m.ToCheckpointJson();
  TrainConfig tc;
  tc.learning_rate = 0;
  tc.epochs = 1;
  Train(m, RandomData(40, 3, 4, 13), nullptr, tc);
  EXPECT_EQ(m.ToCheckpointJson(), before);
}

Dataset Separable(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  std::bernoulli_distribution coin(0.5);
  Dataset ds{Matrix(n, 2), Matrix(n, 2)};
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 2; ++c) {
      const bool pos = coin(rng);
      ds.features(i, c) = pos ? mag(rng) : -mag(rng);
      ds.labels(i, c) = pos ? 1 : 0;
    }
  }
  return ds;
}

TEST(TaggingTest, ConvergesOnSeparableData) {
  ModelConfig c;
  c.variant = ModelVariant::kBaselineNoKg;
  c.d_feat = 2;
  c.n_labels = 2;
  c.d_hidden = 16;
  c.d_embed = 8;
  Rng rng(14);
  auto m = TaggingModel::Create(c, {}, rng);
  const auto ds = Separable(128, 15);
  TrainConfig tc;
  tc.epochs = 200;
  const auto log = Train(m, ds, nullptr, tc);
  ASSERT_EQ(log.size(), 200u);
  EXPECT_LT(BceLoss(m.Predict(ds.features), ds.labels), 0.05);
  EXPECT_LT(log.back().loss, log.front().loss);
}

TEST(TaggingTest, SameSeedSameTrajectory) {
  auto run = [] {
    Rng rng(16);
    auto m = TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), SmallGraph(2, 16), rng);
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 8;
    tc.seed = 17;
    const auto ds = RandomData(50, 3, 4, 18);
    const auto log = Train(m, ds, &ds, tc);
    return std::make_pair(TrainLogToJsonl(log), m.ToCheckpointJson());
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.first.find("\"mAP\":null"), std::string::npos);
}

TEST(TaggingTest, SmallStepDecreasesLoss) {
  for (auto v : {ModelVariant::kBaselineNoKg, ModelVariant::kDgcn}) {
    Rng rng(19);
    auto m = TaggingModel::Create(SmallConfig(v), SmallGraph(v == ModelVariant::kDgcn ? 2 : 1, 19), rng);
    const auto ds = RandomData(1, 3, 4, 20);
    AdamOptimizer opt(1e-6, 0.9, 0.999, 1e-8);
    const double start = BceLoss(m.Predict(ds.features), ds.labels);
    EXPECT_EQ(TrainStep(m, opt, ds.features, ds.labels), start);
    EXPECT_LT(BceLoss(m.Predict(ds.features), ds.labels), start) << VariantName(v);
  }
}

TEST(TaggingTest, CheckpointRoundTrip) {
  Rng rng(21);
  const auto m = TaggingModel::Create(SmallConfig(ModelVariant::kDgcn), SmallGraph(2, 21), rng);
  const std::string path = testing::TempDir("checkpoint") + "/model.json";
  m.SaveCheckpoint(path);
  const auto back = TaggingModel::LoadCheckpoint(path);
  EXPECT_EQ(back.variant(), ModelVariant::kDgcn);
  EXPECT_EQ(back.relation_names, m.relation_names);
  EXPECT_EQ(back.ToCheckpointJson(), m.ToCheckpointJson());
  std::mt19937_64 g(22);
  const auto x = oracle::RandomMatrix(4, 3, g);
  EXPECT_EQ(back.Predict(x), m.Predict(x));
  EXPECT_THROW(TaggingModel::FromCheckpointJson("{\"format\":\"nope\"}"), Error);
}

}  // namespace
}  // namespace tagkg
