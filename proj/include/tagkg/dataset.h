#ifndef TAGKG_DATASET_H_
#define TAGKG_DATASET_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tagkg/tensor.h"

namespace tagkg {

// Matrix text format: a header line "rows,cols" followed by `rows` lines of
// comma-separated values. Values are written in shortest round-trip form.
std::string MatrixToCsv(const Matrix &m);
Matrix MatrixFromCsv(std::string_view text, const std::string &origin = "<memory>");
Matrix LoadMatrixCsv(const std::string &path);
void SaveMatrixCsv(const std::string &path, const Matrix &m);

struct Dataset {
  Matrix features;  // n_samples x d_feat
  Matrix labels;    // n_samples x n_labels, entries 0/1

  int num_samples() const { return features.rows(); }
  int d_feat() const { return features.cols(); }
  int num_labels() const { return labels.cols(); }

  // Throws unless the shapes agree and every label is 0 or 1.
  void Validate() const;
  Dataset Subset(const std::vector<int> &rows) const;
  std::vector<long long> PositivesPerClass() const;
};

// A dataset directory holds train_features.csv, train_labels.csv,
// eval_features.csv, eval_labels.csv and labels.txt (one tag id per line,
// in label column order).
struct SplitDataset {
  Dataset train;
  Dataset eval;
  std::vector<std::string> label_ids;

  static SplitDataset Load(const std::string &dir);
  void Save(const std::string &dir) const;
};

struct SubsampleResult {
  Dataset train;
  std::vector<int> indices;  // chosen training rows, ascending
  std::vector<long long> per_class_counts;
};

// Uniform sample without replacement of floor(fraction * n) training rows.
// Throws Error unless 0 < fraction <= 1.
SubsampleResult Subsample(const Dataset &train, double fraction, uint64_t seed);

}  // namespace tagkg

#endif  // TAGKG_DATASET_H_
