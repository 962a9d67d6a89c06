#include "tagkg/tagging.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "tagkg/metrics.h"

namespace tagkg {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr int kCheckpointVersion = 1;
constexpr const char *kCheckpointFormat = "tagkg-checkpoint";
}  // namespace

const char *VariantName(ModelVariant v) {
  switch (v) {
    case ModelVariant::kBaselineNoKg: return "baseline_no_kg";
    case ModelVariant::kGcnSingle: return "gcn_single";
    case ModelVariant::kGcnMerged: return "gcn_merged";
    case ModelVariant::kDgcn: return "dgcn";
  }
  return "dgcn";
}

ModelVariant ParseVariant(std::string_view s) {
  if (s == "baseline_no_kg" || s == "baseline") return ModelVariant::kBaselineNoKg;
  if (s == "gcn_single") return ModelVariant::kGcnSingle;
  if (s == "gcn_merged") return ModelVariant::kGcnMerged;
  if (s == "dgcn") return ModelVariant::kDgcn;
  throw Error("unknown model variant '" + std::string(s) + "'");
}

TaggingModel TaggingModel::Create(const ModelConfig &config, const LabelGraph &graph, Rng &rng) {
  if (config.d_feat <= 0 || config.n_labels <= 0 || config.d_hidden <= 0 ||
      config.d_embed <= 0 || config.gcn_hidden <= 0 || config.gcn_layers < 1) {
    throw Error("model dimensions must be positive");
  }
  TaggingModel m;
  m.config_ = config;
  m.enc_w1 = GlorotUniform(config.d_feat, config.d_hidden, rng);
  m.enc_b1 = Matrix(1, config.d_hidden);
  m.enc_w2 = GlorotUniform(config.d_hidden, config.d_embed, rng);
  m.enc_b2 = Matrix(1, config.d_embed);

  if (config.variant == ModelVariant::kBaselineNoKg) {
    m.free_labels = GlorotUniform(config.n_labels, config.d_embed, rng);
    return m;
  }

  const size_t r = graph.adjacency.size();
  if (r == 0) throw Error(std::string(VariantName(config.variant)) + " needs a label graph");
  if (config.variant != ModelVariant::kDgcn && r != 1) {
    throw Error(std::string(VariantName(config.variant)) + " takes exactly one relation");
  }
  for (const auto &a : graph.adjacency) {
    if (a.rows() != config.n_labels || a.cols() != config.n_labels) {
      throw DimensionError("adjacency " + a.ShapeString() + " for " +
                           std::to_string(config.n_labels) + " labels");
    }
  }
  m.relation_names = graph.relation_names;
  m.relation_names.resize(r);
  m.h0 = graph.node_features ? *graph.node_features : Matrix::Identity(config.n_labels);
  if (m.h0.rows() != config.n_labels) throw DimensionError("label features need one row per label");

  int d_in = m.h0.cols();
  for (int l = 0; l < config.gcn_layers; ++l) {
    const bool last = l + 1 == config.gcn_layers;
    const int d_out = last ? config.d_embed : config.gcn_hidden;
    m.gcn.push_back(DGCNLayer::Create(graph.adjacency, d_in, d_out,
                                      last ? Activation::kIdentity : config.gcn_activation, rng));
    d_in = d_out;
  }
  return m;
}

std::vector<std::pair<std::string, Matrix *>> TaggingModel::Parameters() {
  std::vector<std::pair<std::string, Matrix *>> out = {
      {"encoder.w1", &enc_w1}, {"encoder.b1", &enc_b1},
      {"encoder.w2", &enc_w2}, {"encoder.b2", &enc_b2}};
  if (config_.variant == ModelVariant::kBaselineNoKg) {
    out.emplace_back("labels.embedding", &free_labels);
    return out;
  }
  for (size_t l = 0; l < gcn.size(); ++l) {
    for (size_t r = 0; r < gcn[l].weights.size(); ++r) {
      const std::string prefix = "gcn." + std::to_string(l) + ".r" + std::to_string(r);
      out.emplace_back(prefix + ".w", &gcn[l].weights[r]);
      out.emplace_back(prefix + ".b", &gcn[l].biases[r]);
    }
  }
  return out;
}

std::vector<std::pair<std::string, const Matrix *>> TaggingModel::Parameters() const {
  std::vector<std::pair<std::string, const Matrix *>> out;
  for (auto &[name, p] : const_cast<TaggingModel *>(this)->Parameters()) out.emplace_back(name, p);
  return out;
}

size_t TaggingModel::NumParameters() const {
  size_t n = 0;
  for (const auto &[name, p] : Parameters()) n += p->size();
  return n;
}

Tape::Var TaggingModel::Record(Tape &tape, const Matrix &x,
                               std::vector<Tape::Var> *param_vars) const {
  if (x.cols() != config_.d_feat) {
    throw DimensionError("input has " + std::to_string(x.cols()) + " features, model expects " +
                         std::to_string(config_.d_feat));
  }
  auto params = Parameters();
  std::vector<Tape::Var> vars;
  for (const auto &[name, p] : params) {
    vars.push_back(param_vars ? tape.Leaf(*p) : tape.Constant(*p));
  }
  if (param_vars) *param_vars = vars;

  Tape::Var in = tape.Constant(x);
  Tape::Var hidden = tape.Activate(tape.AddRowBias(tape.MatMul(in, vars[0]), vars[1]),
                                   Activation::kRelu);
  Tape::Var embed = tape.AddRowBias(tape.MatMul(hidden, vars[2]), vars[3]);

  Tape::Var labels;
  if (config_.variant == ModelVariant::kBaselineNoKg) {
    labels = vars[4];
  } else {
    Tape::Var h = tape.Constant(h0);
    size_t next = 4;
    for (const auto &layer : gcn) {
      LayerVars lv;
      for (int r = 0; r < layer.num_relations(); ++r) {
        lv.weights.push_back(vars[next++]);
        lv.biases.push_back(vars[next++]);
      }
      h = DgcnForward(tape, layer, lv, h);
    }
    labels = h;
  }
  return tape.Activate(tape.MatMulNT(embed, labels), Activation::kSigmoid);
}

Matrix TaggingModel::LabelEmbeddings() const {
  if (config_.variant == ModelVariant::kBaselineNoKg) return free_labels;
  return GcnStack(gcn, h0);
}

Matrix TaggingModel::Predict(const Matrix &x) const {
  Tape tape;
  return tape.value(Record(tape, x, nullptr));
}

double BceLoss(const Matrix &probs, const Matrix &targets) {
  Tape tape;
  return tape.value(tape.BceMean(tape.Constant(probs), targets))(0, 0);
}

namespace {

ordered_json TensorJson(const std::string &name, const Matrix &m) {
  ordered_json t;
  t["name"] = name;
  t["rows"] = m.rows();
  t["cols"] = m.cols();
  t["data"] = std::vector<double>(m.data().begin(), m.data().end());
  return t;
}

}  // namespace

std::string TaggingModel::ToCheckpointJson() const {
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["variant"] = VariantName(config_.variant);
  ordered_json manifest;
  manifest["d_feat"] = config_.d_feat;
  manifest["n_labels"] = config_.n_labels;
  manifest["d_hidden"] = config_.d_hidden;
  manifest["d_embed"] = config_.d_embed;
  manifest["gcn_hidden"] = config_.gcn_hidden;
  manifest["gcn_layers"] = config_.gcn_layers;
  manifest["gcn_activation"] = ActivationName(config_.gcn_activation);
  manifest["relations"] = relation_names;
  auto layers = ordered_json::array();
  for (const auto &l : gcn) {
    ordered_json lj;
    lj["d_in"] = l.d_in();
    lj["d_out"] = l.d_out();
    lj["activation"] = ActivationName(l.activation);
    lj["num_relations"] = l.num_relations();
    layers.push_back(std::move(lj));
  }
  manifest["layers"] = std::move(layers);
  j["manifest"] = std::move(manifest);

  auto tensors = ordered_json::array();
  for (const auto &[name, p] : Parameters()) tensors.push_back(TensorJson(name, *p));
  if (config_.variant != ModelVariant::kBaselineNoKg) {
    tensors.push_back(TensorJson("labels.h0", h0));
    for (size_t r = 0; r < gcn.front().adjacency.size(); ++r) {
      tensors.push_back(TensorJson("labels.adjacency.r" + std::to_string(r), gcn.front().adjacency[r]));
    }
  }
  j["tensors"] = std::move(tensors);
  return j.dump() + "\n";
}

TaggingModel TaggingModel::FromCheckpointJson(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError("checkpoint", 0, e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw Error("not a checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw Error("unsupported checkpoint version " + j.at("version").dump());
    }
    const auto &mf = j.at("manifest");
    ModelConfig cfg;
    cfg.variant = ParseVariant(j.at("variant").get<std::string>());
    cfg.d_feat = mf.at("d_feat").get<int>();
    cfg.n_labels = mf.at("n_labels").get<int>();
    cfg.d_hidden = mf.at("d_hidden").get<int>();
    cfg.d_embed = mf.at("d_embed").get<int>();
    cfg.gcn_hidden = mf.at("gcn_hidden").get<int>();
    cfg.gcn_layers = mf.at("gcn_layers").get<int>();
    cfg.gcn_activation = ParseActivation(mf.at("gcn_activation").get<std::string>());

    std::map<std::string, Matrix> tensors;
    for (const auto &t : j.at("tensors")) {
      tensors[t.at("name").get<std::string>()] =
          Matrix::FromData(t.at("rows").get<int>(), t.at("cols").get<int>(),
                           t.at("data").get<std::vector<double>>());
    }
    auto take = [&](const std::string &name) {
      auto it = tensors.find(name);
      if (it == tensors.end()) throw Error("checkpoint lacks tensor " + name);
      return it->second;
    };

    LabelGraph graph;
    if (cfg.variant != ModelVariant::kBaselineNoKg) {
      graph.relation_names = mf.at("relations").get<std::vector<std::string>>();
      for (size_t r = 0; r < graph.relation_names.size(); ++r) {
        graph.adjacency.push_back(take("labels.adjacency.r" + std::to_string(r)));
      }
      graph.node_features = take("labels.h0");
    }
    Rng scratch(0);
    TaggingModel m = Create(cfg, graph, scratch);
    for (auto &[name, p] : m.Parameters()) {
      Matrix v = take(name);
      if (!v.SameShape(*p)) throw DimensionError("tensor " + name + " has shape " + v.ShapeString());
      *p = std::move(v);
    }
    const auto &layers = mf.at("layers");
    for (size_t l = 0; l < m.gcn.size() && l < layers.size(); ++l) {
      m.gcn[l].activation = ParseActivation(layers[l].at("activation").get<std::string>());
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError("checkpoint", 0, e.what());
  }
}

void TaggingModel::SaveCheckpoint(const std::string &path) const {
  WriteFile(path, ToCheckpointJson());
}

TaggingModel TaggingModel::LoadCheckpoint(const std::string &path) {
  return FromCheckpointJson(ReadFile(path));
}

double DefaultLearningRate(ModelVariant v) { return v == ModelVariant::kDgcn ? 3e-4 : 1e-3; }

void AdamOptimizer::Step(const std::vector<Matrix *> &params,
                         const std::vector<const Matrix *> &grads) {
  if (params.size() != grads.size()) throw Error("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const Matrix *p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->data();
    auto g = grads[i]->data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

double TrainStep(TaggingModel &model, AdamOptimizer &opt, const Matrix &x, const Matrix &y) {
  Tape tape;
  std::vector<Tape::Var> vars;
  Tape::Var probs = model.Record(tape, x, &vars);
  Tape::Var loss = tape.BceMean(probs, y);
  tape.Backward(loss);
  std::vector<Matrix *> params;
  std::vector<const Matrix *> grads;
  auto named = model.Parameters();
  for (size_t i = 0; i < named.size(); ++i) {
    params.push_back(named[i].second);
    grads.push_back(&tape.grad(vars[i]));
  }
  const double value = tape.value(loss)(0, 0);
  opt.Step(params, grads);
  return value;
}

std::vector<EpochLog> Train(TaggingModel &model, const Dataset &train, const Dataset *eval,
                            const TrainConfig &config) {
  train.Validate();
  if (train.num_samples() == 0) throw Error("training set is empty");
  if (config.batch_size < 1 || config.epochs < 0 || !(config.learning_rate >= 0)) {
    throw Error("invalid training configuration");
  }
  AdamOptimizer opt(config.learning_rate, config.beta1, config.beta2, config.adam_eps);
  Rng rng = MakeRng(config.seed, "train.shuffle");
  std::vector<int> order(train.num_samples());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLog> log;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<int> rows(order.begin() + start, order.begin() + end);
      const double batch_loss =
          TrainStep(model, opt, train.features.GatherRows(rows), train.labels.GatherRows(rows));
      total += batch_loss * static_cast<double>(rows.size());
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = total / static_cast<double>(order.size());
    if (eval != nullptr && eval->num_samples() > 0) {
      entry.eval_map = Evaluate(model.Predict(eval->features), eval->labels).map;
    }
    log.push_back(entry);
  }
  return log;
}

std::string TrainLogToJsonl(const std::vector<EpochLog> &log) {
  std::string out;
  for (const auto &e : log) {
    ordered_json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    j["mAP"] = e.eval_map ? ordered_json(*e.eval_map) : ordered_json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace tagkg
