#include "tagkg/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tagkg/error.h"
#include "tagkg/io_util.h"
#include "tagkg/rng.h"

namespace tagkg {

std::string MatrixToCsv(const Matrix &m) {
  std::string out = std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += FormatDouble(m(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix MatrixFromCsv(std::string_view text, const std::string &origin) {
  auto lines = SplitLines(text);
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(origin, 1, "missing 'rows,cols' header");
  auto header = Split(lines[0], ',');
  int rows = 0, cols = 0;
  try {
    if (header.size() != 2) throw Error("bad header");
    rows = std::stoi(header[0]);
    cols = std::stoi(header[1]);
  } catch (const std::exception &) {
    throw ParseError(origin, 1, "header must be 'rows,cols'");
  }
  if (rows < 0 || cols < 0) throw ParseError(origin, 1, "negative dimension");
  if (static_cast<int>(lines.size()) - 1 != rows) {
    throw ParseError(origin, 0, "header says " + std::to_string(rows) + " rows, found " +
                                    std::to_string(lines.size() - 1));
  }
  std::vector<double> data;
  data.reserve(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    auto fields = Split(lines[r + 1], ',');
    if (static_cast<int>(fields.size()) != cols) {
      throw ParseError(origin, r + 2, "expected " + std::to_string(cols) + " values");
    }
    for (const auto &f : fields) {
      try {
        const double v = ParseDouble(f);
        if (!std::isfinite(v)) throw Error("non-finite value");
        data.push_back(v);
      } catch (const Error &e) {
        throw ParseError(origin, r + 2, e.what());
      }
    }
  }
  return Matrix::FromData(rows, cols, std::move(data));
}

Matrix LoadMatrixCsv(const std::string &path) { return MatrixFromCsv(ReadFile(path), path); }

void SaveMatrixCsv(const std::string &path, const Matrix &m) { WriteFile(path, MatrixToCsv(m)); }

void Dataset::Validate() const {
  if (features.rows() != labels.rows()) {
    throw DimensionError("features have " + std::to_string(features.rows()) +
                         " rows but labels have " + std::to_string(labels.rows()));
  }
  for (double y : labels.data()) {
    if (y != 0.0 && y != 1.0) throw Error("label entries must be 0 or 1");
  }
}

Dataset Dataset::Subset(const std::vector<int> &rows) const {
  return Dataset{features.GatherRows(rows), labels.GatherRows(rows)};
}

std::vector<long long> Dataset::PositivesPerClass() const {
  std::vector<long long> counts(labels.cols(), 0);
  for (int r = 0; r < labels.rows(); ++r)
    for (int c = 0; c < labels.cols(); ++c) counts[c] += labels(r, c) > 0.5 ? 1 : 0;
  return counts;
}

SplitDataset SplitDataset::Load(const std::string &dir) {
  SplitDataset ds;
  ds.train.features = LoadMatrixCsv(JoinPath(dir, "train_features.csv"));
  ds.train.labels = LoadMatrixCsv(JoinPath(dir, "train_labels.csv"));
  ds.eval.features = LoadMatrixCsv(JoinPath(dir, "eval_features.csv"));
  ds.eval.labels = LoadMatrixCsv(JoinPath(dir, "eval_labels.csv"));
  ds.train.Validate();
  ds.eval.Validate();
  if (ds.train.d_feat() != ds.eval.d_feat() || ds.train.num_labels() != ds.eval.num_labels()) {
    throw DimensionError("train and eval splits disagree on dimensions");
  }
  const std::string names = JoinPath(dir, "labels.txt");
  if (FileExists(names)) {
    for (const auto &line : SplitLines(ReadFile(names))) {
      if (!Trim(line).empty()) ds.label_ids.push_back(Trim(line));
    }
    if (static_cast<int>(ds.label_ids.size()) != ds.train.num_labels()) {
      throw DimensionError("labels.txt lists " + std::to_string(ds.label_ids.size()) +
                           " labels, matrices have " + std::to_string(ds.train.num_labels()));
    }
  }
  return ds;
}

void SplitDataset::Save(const std::string &dir) const {
  MakeDirs(dir);
  SaveMatrixCsv(JoinPath(dir, "train_features.csv"), train.features);
  SaveMatrixCsv(JoinPath(dir, "train_labels.csv"), train.labels);
  SaveMatrixCsv(JoinPath(dir, "eval_features.csv"), eval.features);
  SaveMatrixCsv(JoinPath(dir, "eval_labels.csv"), eval.labels);
  std::string names;
  for (const auto &id : label_ids) names += id + "\n";
  WriteFile(JoinPath(dir, "labels.txt"), names);
}

SubsampleResult Subsample(const Dataset &train, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error("subsample fraction must be in (0, 1], got " + FormatDouble(fraction));
  }
  const int n = train.num_samples();
  const int k = static_cast<int>(std::floor(fraction * n));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k < n) {
    Rng rng = MakeRng(seed, "subsample");
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
  }
  SubsampleResult res;
  res.indices = idx;
  res.train = train.Subset(idx);
  res.per_class_counts = res.train.PositivesPerClass();
  return res;
}

}  // namespace tagkg
