#ifndef TAGKG_SYNTHETIC_H_
#define TAGKG_SYNTHETIC_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tagkg/dataset.h"
#include "tagkg/kgbuild.h"
#include "tagkg/ontology.h"

namespace tagkg {

struct PlantedPair {
  int trigger = 0;   // label index
  int follower = 0;  // label index
  double probability = 0.9;  // P(follower | trigger)
  std::string relation = "Conjunction";
};

// Desk-scale stand-in for a tagging corpus with known label structure.
struct SyntheticSpec {
  int n_labels = 30;
  int branching = 4;  // children per root; roots are the first labels
  std::vector<std::string> label_names;  // optional, n_labels entries
  std::vector<PlantedPair> planted_pairs;
  int auto_pairs = 0;  // extra random leaf pairs planted when > 0
  double auto_pair_probability = 0.8;
  double base_rate = 0.12;       // occurrence rate of the most common leaf
  double zipf_exponent = 1.0;    // leaf rates decay as rank^-exponent
  int n_train = 20000;
  int n_eval = 2000;
  int d_feat = 32;
  double snr = 1.0;  // prototype std / noise std; +inf disables noise
  double kg_noise = 0.0;  // fraction of emitted KG edges replaced by random ones
  uint64_t seed = 0;

  // Throws Error when probabilities leave [0,1] or pairs name bad labels.
  void Validate() const;
  std::string ToJson() const;
  static SyntheticSpec FromJson(const std::string &text);
};

struct SyntheticData {
  SplitDataset dataset;
  TagOntology ontology;
  TemporalKG kg;  // what the generator emits (possibly corrupted)
  std::vector<PlantedPair> planted;  // the true planted pairs
};

// Label vectors are drawn from per-leaf rates, planted pairs switch the
// follower on with the pair's probability whenever the trigger is on, and
// every father of an active label is switched on. Features are
// label_vector * prototypes + Gaussian noise.
SyntheticData GenerateSynthetic(const SyntheticSpec &spec);

// Writes dataset/, ontology.json, temporal_kg.jsonl and spec.json under dir.
void SaveSynthetic(const SyntheticData &data, const SyntheticSpec &spec, const std::string &dir);

}  // namespace tagkg

#endif  // TAGKG_SYNTHETIC_H_
