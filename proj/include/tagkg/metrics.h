#ifndef TAGKG_METRICS_H_
#define TAGKG_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagkg/tensor.h"

namespace tagkg {

// Average precision: rank by score (descending) and average, over the
// positives, the precision at each positive's score threshold. Tied scores
// share one threshold. nullopt when there is
// no positive.
std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const double> truths);

// Probability that a random positive outscores a random negative, ties
// counting one half. nullopt unless both classes are present.
std::optional<double> RocAuc(std::span<const double> scores, std::span<const double> truths);

enum class AuprcMode { kMicro, kMacro };

// Area under the precision-recall curve via the step (average precision)
// estimator. Micro flattens every (sample, class) pair; macro averages the
// per-class values over classes with at least one positive.
std::optional<double> Auprc(const Matrix &scores, const Matrix &truths, AuprcMode mode);

struct EvalReport {
  std::vector<std::optional<double>> per_class_ap;
  std::vector<std::optional<double>> per_class_auc;
  double map = 0;
  double mauc = 0;
  double micro_auprc = 0;
  double macro_auprc = 0;
  std::vector<int> skipped_classes;      // no positive: AP undefined
  std::vector<int> auc_skipped_classes;  // single-class truths: AUC undefined

  std::string ToJson(const std::vector<std::string> &class_names = {}) const;
};

// Scores and truths are samples x classes.
EvalReport Evaluate(const Matrix &scores, const Matrix &truths);

// Classes bucketed by training-sample count. `upper_bounds` are inclusive
// upper edges in increasing order; a final open bucket (last, inf) is always
// appended. With bounds {5, 50}: [0,5], (5,50], (50,inf).
struct GroupBucket {
  double lower = 0;  // exclusive, except the first bucket which starts at 0
  double upper = 0;  // inclusive; +inf for the last bucket
  int n_classes = 0;
  std::optional<double> mean_a;
  std::optional<double> mean_b;
  std::optional<double> delta;  // mean_b - mean_a; absent for empty buckets
};

struct GroupDelta {
  std::vector<GroupBucket> buckets;
  std::vector<int> bucket_of_class;  // -1 for classes skipped on either side

  std::string ToCsv() const;
  // Reads ToCsv() output back; bucket_of_class is left empty.
  static GroupDelta FromCsv(std::string_view text, const std::string &origin = "<memory>");
};

GroupDelta ComputeGroupDelta(const std::vector<std::optional<double>> &metric_a,
                             const std::vector<std::optional<double>> &metric_b,
                             const std::vector<long long> &train_counts,
                             const std::vector<double> &upper_bounds);

// Bar chart of per-bucket deltas, one series per metric.
std::string GroupDeltaSvg(const std::vector<std::pair<std::string, GroupDelta>> &series,
                          const std::string &title);

}  // namespace tagkg

#endif  // TAGKG_METRICS_H_
