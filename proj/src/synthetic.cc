#include "tagkg/synthetic.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "tagkg/rng.h"

namespace tagkg {

using ordered_json = nlohmann::ordered_json;

namespace {

int NumRoots(const SyntheticSpec &spec) {
  return (spec.n_labels + spec.branching) / (spec.branching + 1);
}

std::string LabelId(int i) {
  std::string s = std::to_string(i);
  return "/syn/l" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (n_labels < 1 || branching < 1 || n_train < 0 || n_eval < 0 || d_feat < 1) {
    throw Error("synthetic spec: sizes must be positive");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(base_rate) || !prob(auto_pair_probability) || !prob(kg_noise)) {
    throw Error("synthetic spec: probabilities must lie in [0,1]");
  }
  if (!(snr > 0)) throw Error("synthetic spec: snr must be positive");
  if (!label_names.empty() && static_cast<int>(label_names.size()) != n_labels) {
    throw Error("synthetic spec: label_names must have n_labels entries");
  }
  for (const auto &p : planted_pairs) {
    if (p.trigger < 0 || p.trigger >= n_labels || p.follower < 0 || p.follower >= n_labels ||
        p.trigger == p.follower) {
      throw Error("synthetic spec: planted pair references an invalid label");
    }
    if (!prob(p.probability)) throw Error("synthetic spec: pair probability outside [0,1]");
  }
  const int leaves = n_labels - NumRoots(*this);
  if (auto_pairs > 0 && leaves < 2) throw Error("synthetic spec: too few leaves for auto pairs");
}

std::string SyntheticSpec::ToJson() const {
  ordered_json j;
  j["n_labels"] = n_labels;
  j["branching"] = branching;
  j["label_names"] = label_names;
  auto pairs = ordered_json::array();
  for (const auto &p : planted_pairs) {
    pairs.push_back({{"trigger", p.trigger}, {"follower", p.follower},
                     {"probability", p.probability}, {"relation", p.relation}});
  }
  j["planted_pairs"] = std::move(pairs);
  j["auto_pairs"] = auto_pairs;
  j["auto_pair_probability"] = auto_pair_probability;
  j["base_rate"] = base_rate;
  j["zipf_exponent"] = zipf_exponent;
  j["n_train"] = n_train;
  j["n_eval"] = n_eval;
  j["d_feat"] = d_feat;
  j["snr"] = std::isinf(snr) ? ordered_json("inf") : ordered_json(snr);
  j["kg_noise"] = kg_noise;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

SyntheticSpec SyntheticSpec::FromJson(const std::string &text) {
  SyntheticSpec s;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError("synthetic spec", 0, e.what());
  }
  s.n_labels = j.value("n_labels", s.n_labels);
  s.branching = j.value("branching", s.branching);
  s.label_names = j.value("label_names", s.label_names);
  if (j.contains("planted_pairs")) {
    for (const auto &p : j["planted_pairs"]) {
      PlantedPair pp;
      pp.trigger = p.at("trigger").get<int>();
      pp.follower = p.at("follower").get<int>();
      pp.probability = p.value("probability", pp.probability);
      pp.relation = p.value("relation", pp.relation);
      s.planted_pairs.push_back(pp);
    }
  }
  s.auto_pairs = j.value("auto_pairs", s.auto_pairs);
  s.auto_pair_probability = j.value("auto_pair_probability", s.auto_pair_probability);
  s.base_rate = j.value("base_rate", s.base_rate);
  s.zipf_exponent = j.value("zipf_exponent", s.zipf_exponent);
  s.n_train = j.value("n_train", s.n_train);
  s.n_eval = j.value("n_eval", s.n_eval);
  s.d_feat = j.value("d_feat", s.d_feat);
  if (j.contains("snr")) {
    s.snr = j["snr"].is_string() ? std::numeric_limits<double>::infinity() : j["snr"].get<double>();
  }
  s.kg_noise = j.value("kg_noise", s.kg_noise);
  s.seed = j.value("seed", s.seed);
  s.Validate();
  return s;
}

SyntheticData GenerateSynthetic(const SyntheticSpec &spec) {
  spec.Validate();
  const int n = spec.n_labels;
  const int roots = NumRoots(spec);

  // Hierarchy: root r owns leaves roots + r*branching ... (+branching-1).
  std::vector<int> father(n, -1);
  std::vector<Tag> tags(n);
  for (int i = 0; i < n; ++i) {
    tags[i].id = LabelId(i);
    tags[i].name = spec.label_names.empty() ? "label " + std::to_string(i) : spec.label_names[i];
  }
  for (int i = roots; i < n; ++i) {
    const int r = std::min((i - roots) / spec.branching, roots - 1);
    father[i] = r;
    tags[r].child_ids.push_back(tags[i].id);
  }

  Rng structure_rng = MakeRng(spec.seed, "synthetic.structure");
  std::vector<PlantedPair> planted = spec.planted_pairs;
  if (spec.auto_pairs > 0) {
    std::set<std::pair<int, int>> used;
    for (const auto &p : planted) used.insert({p.trigger, p.follower});
    std::uniform_int_distribution<int> leaf(roots, n - 1);
    int attempts = 0;
    int added = 0;
    while (added < spec.auto_pairs && attempts++ < 100 * spec.auto_pairs) {
      int a = leaf(structure_rng), b = leaf(structure_rng);
      if (a == b || father[a] == father[b] || used.count({a, b}) || used.count({b, a})) continue;
      used.insert({a, b});
      planted.push_back({a, b, spec.auto_pair_probability,
                         added % 2 == 0 ? std::string(kConjunction) : std::string(kPrecedence)});
      ++added;
    }
  }

  // Leaf rates: Zipf over a seeded permutation of the leaves.
  std::vector<double> rate(n, 0.0);
  {
    std::vector<int> leaves;
    for (int i = roots; i < n; ++i) leaves.push_back(i);
    if (leaves.empty()) {
      for (int i = 0; i < n; ++i) leaves.push_back(i);
    }
    std::shuffle(leaves.begin(), leaves.end(), structure_rng);
    for (size_t k = 0; k < leaves.size(); ++k) {
      rate[leaves[k]] = spec.base_rate * std::pow(static_cast<double>(k + 1), -spec.zipf_exponent);
    }
  }

  Matrix prototypes(n, spec.d_feat);
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double &x : prototypes.data()) x = gauss(structure_rng);
  }
  const bool noisy = std::isfinite(spec.snr);
  const double noise_std = noisy ? 1.0 / spec.snr : 0.0;

  auto draw = [&](int count, const char *stream) {
    Rng rng = MakeRng(spec.seed, stream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset d{Matrix(count, spec.d_feat), Matrix(count, n)};
    std::vector<char> on(n);
    for (int s = 0; s < count; ++s) {
      for (int i = 0; i < n; ++i) on[i] = unif(rng) < rate[i];
      for (const auto &p : planted) {
        if (on[p.trigger]) on[p.follower] = unif(rng) < p.probability;
      }
      for (int i = n - 1; i >= 0; --i) {
        if (on[i] && father[i] >= 0) on[father[i]] = 1;
      }
      for (int i = 0; i < n; ++i) {
        if (!on[i]) continue;
        d.labels(s, i) = 1.0;
        for (int f = 0; f < spec.d_feat; ++f) d.features(s, f) += prototypes(i, f);
      }
      if (noisy) {
        for (int f = 0; f < spec.d_feat; ++f) d.features(s, f) += noise_std * gauss(rng);
      }
    }
    return d;
  };

  SyntheticData out;
  out.dataset.train = draw(spec.n_train, "synthetic.train");
  out.dataset.eval = draw(spec.n_eval, "synthetic.eval");
  for (const auto &t : tags) out.dataset.label_ids.push_back(t.id);
  out.ontology = TagOntology::FromTags(tags, OntologyFlavor::kAudioSetJson);
  out.planted = planted;

  out.kg.tag_ids = out.dataset.label_ids;
  out.kg.kept_relations = DefaultKeptRelations();
  Rng kg_rng = MakeRng(spec.seed, "synthetic.kg");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, n - 1);
  for (const auto &p : planted) {
    int a = p.trigger, b = p.follower;
    if (spec.kg_noise > 0 && unif(kg_rng) < spec.kg_noise && n > 1) {
      do {
        a = any(kg_rng);
        b = any(kg_rng);
      } while (a == b);
    }
    out.kg.edges[{a, b}][p.relation] += 1;
  }
  return out;
}

void SaveSynthetic(const SyntheticData &data, const SyntheticSpec &spec, const std::string &dir) {
  MakeDirs(dir);
  data.dataset.Save(JoinPath(dir, "dataset"));
  data.ontology.Save(JoinPath(dir, "ontology.json"));
  WriteFile(JoinPath(dir, "temporal_kg.jsonl"), TemporalKgToJsonl(data.kg));
  WriteFile(JoinPath(dir, "spec.json"), spec.ToJson());
}

}  // namespace tagkg
