#ifndef TAGKG_TAGGING_H_
#define TAGKG_TAGGING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tagkg/dataset.h"
#include "tagkg/dgcn.h"
#include "tagkg/rng.h"
#include "tagkg/tensor.h"

namespace tagkg {

enum class ModelVariant { kBaselineNoKg, kGcnSingle, kGcnMerged, kDgcn };

const char *VariantName(ModelVariant v);
ModelVariant ParseVariant(std::string_view s);

struct ModelConfig {
  ModelVariant variant = ModelVariant::kDgcn;
  int d_feat = 0;
  int n_labels = 0;
  int d_hidden = 64;      // encoder hidden width
  int d_embed = 32;       // shared embedding width
  int gcn_hidden = 64;    // width of the first label-graph layer
  int gcn_layers = 2;
  Activation gcn_activation = Activation::kLeakyRelu;  // hidden GCN layers
};

// Label-graph inputs for the KG variants: one adjacency per relation plus
// the relation names recorded in checkpoints.
struct LabelGraph {
  std::vector<Matrix> adjacency;
  std::vector<std::string> relation_names;
  std::optional<Matrix> node_features;  // defaults to the identity (one-hot)
};

// Sample encoder (two-layer perceptron) whose output is dot-multiplied with
// label embeddings and squashed by a sigmoid. The label embeddings come
// from a GCN / D-GCN stack over the label graph, or from a free matrix in the
// baseline variant.
class TaggingModel {
 public:
  static TaggingModel Create(const ModelConfig &config, const LabelGraph &graph, Rng &rng);

  const ModelConfig &config() const { return config_; }
  ModelVariant variant() const { return config_.variant; }

  // Parameters in a fixed order; names are stable checkpoint keys.
  std::vector<std::pair<std::string, Matrix *>> Parameters();
  std::vector<std::pair<std::string, const Matrix *>> Parameters() const;
  size_t NumParameters() const;

  // n_labels x d_embed.
  Matrix LabelEmbeddings() const;
  // Probabilities, batch x n_labels. Pure; safe to call concurrently.
  Matrix Predict(const Matrix &x) const;

  // Records the forward pass; returns the probability node. `param_vars`
  // receives one leaf per Parameters() entry, in order.
  Tape::Var Record(Tape &tape, const Matrix &x, std::vector<Tape::Var> *param_vars) const;

  std::string ToCheckpointJson() const;
  static TaggingModel FromCheckpointJson(std::string_view text);
  void SaveCheckpoint(const std::string &path) const;
  static TaggingModel LoadCheckpoint(const std::string &path);

  // Direct access for tests and hand-built models.
  Matrix enc_w1, enc_b1, enc_w2, enc_b2;
  Matrix h0;
  std::vector<DGCNLayer> gcn;
  Matrix free_labels;  // baseline only
  std::vector<std::string> relation_names;

 private:
  ModelConfig config_;
};

// Mean binary cross-entropy with probabilities clamped to [1e-12, 1-1e-12].
double BceLoss(const Matrix &probs, const Matrix &targets);

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 1e-3;
  int epochs = 10;
  uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

// 3e-4 for D-GCN, 1e-3 otherwise.
double DefaultLearningRate(ModelVariant v);

struct EpochLog {
  int epoch = 0;
  double loss = 0;  // mean training BCE over the epoch's batches
  std::optional<double> eval_map;
};

class AdamOptimizer {
 public:
  AdamOptimizer(double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void Step(const std::vector<Matrix *> &params, const std::vector<const Matrix *> &grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<Matrix> m_, v_;
};

// One optimisation step on a batch; returns the batch loss before the update.
double TrainStep(TaggingModel &model, AdamOptimizer &opt, const Matrix &x, const Matrix &y);

// Mini-batch Adam with a fresh seeded shuffle every epoch. Deterministic for
// fixed (seed, config, data).
std::vector<EpochLog> Train(TaggingModel &model, const Dataset &train, const Dataset *eval,
                            const TrainConfig &config);

std::string TrainLogToJsonl(const std::vector<EpochLog> &log);

}  // namespace tagkg

#endif  // TAGKG_TAGGING_H_
