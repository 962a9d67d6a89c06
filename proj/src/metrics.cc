#include "tagkg/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "tagkg/error.h"
#include "tagkg/io_util.h"

namespace tagkg {

namespace {

void CheckLengths(std::span<const double> scores, std::span<const double> truths) {
  if (scores.size() != truths.size()) {
    throw DimensionError("scores and truths differ in length");
  }
}

std::vector<double> Column(const Matrix &m, int c) {
  std::vector<double> out(m.rows());
  for (int r = 0; r < m.rows(); ++r) out[r] = m(r, c);
  return out;
}

std::optional<double> MeanOfPresent(const std::vector<std::optional<double>> &v) {
  double sum = 0;
  int n = 0;
  for (const auto &x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const double> truths) {
  CheckLengths(scores, truths);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  // Tied scores form one threshold: every positive in the group gets the
  // precision measured after the whole group.
  long long hits = 0;
  double sum = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    long long pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos += truths[order[j]] > 0.5;
      ++j;
    }
    hits += pos;
    sum += static_cast<double>(pos) * static_cast<double>(hits) / static_cast<double>(j);
    i = j;
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

std::optional<double> RocAuc(std::span<const double> scores, std::span<const double> truths) {
  CheckLengths(scores, truths);
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Twice the Mann-Whitney count: 2 per won pair, 1 per tied pair.
  long long twice_wins = 0, negatives_below = 0, positives = 0, negatives = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    long long pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (truths[order[j]] > 0.5 ? pos : neg) += 1;
      ++j;
    }
    twice_wins += pos * (2 * negatives_below + neg);
    negatives_below += neg;
    positives += pos;
    negatives += neg;
    i = j;
  }
  if (positives == 0 || negatives == 0) return std::nullopt;
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

std::optional<double> Auprc(const Matrix &scores, const Matrix &truths, AuprcMode mode) {
  if (!scores.SameShape(truths)) throw DimensionError("scores and truths differ in shape");
  if (mode == AuprcMode::kMicro) return AveragePrecision(scores.data(), truths.data());
  std::vector<std::optional<double>> per_class;
  for (int c = 0; c < scores.cols(); ++c) {
    per_class.push_back(AveragePrecision(Column(scores, c), Column(truths, c)));
  }
  return MeanOfPresent(per_class);
}

EvalReport Evaluate(const Matrix &scores, const Matrix &truths) {
  if (!scores.SameShape(truths)) throw DimensionError("scores and truths differ in shape");
  EvalReport rep;
  for (int c = 0; c < scores.cols(); ++c) {
    auto s = Column(scores, c);
    auto t = Column(truths, c);
    rep.per_class_ap.push_back(AveragePrecision(s, t));
    rep.per_class_auc.push_back(RocAuc(s, t));
    if (!rep.per_class_ap.back()) rep.skipped_classes.push_back(c);
    if (!rep.per_class_auc.back()) rep.auc_skipped_classes.push_back(c);
  }
  rep.map = MeanOfPresent(rep.per_class_ap).value_or(0.0);
  rep.mauc = MeanOfPresent(rep.per_class_auc).value_or(0.0);
  rep.macro_auprc = rep.map;
  rep.micro_auprc = Auprc(scores, truths, AuprcMode::kMicro).value_or(0.0);
  return rep;
}

std::string EvalReport::ToJson(const std::vector<std::string> &class_names) const {
  auto opt = [](const std::optional<double> &v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["map"] = map;
  j["mauc"] = mauc;
  j["micro_auprc"] = micro_auprc;
  j["macro_auprc"] = macro_auprc;
  j["skipped_classes"] = skipped_classes;
  j["auc_skipped_classes"] = auc_skipped_classes;
  auto per_class = nlohmann::ordered_json::array();
  for (size_t c = 0; c < per_class_ap.size(); ++c) {
    nlohmann::ordered_json e;
    e["class"] = c < class_names.size() ? class_names[c] : std::to_string(c);
    e["ap"] = opt(per_class_ap[c]);
    e["auc"] = opt(per_class_auc[c]);
    per_class.push_back(std::move(e));
  }
  j["per_class"] = std::move(per_class);
  return j.dump(2) + "\n";
}

GroupDelta ComputeGroupDelta(const std::vector<std::optional<double>> &metric_a,
                             const std::vector<std::optional<double>> &metric_b,
                             const std::vector<long long> &train_counts,
                             const std::vector<double> &upper_bounds) {
  if (metric_a.size() != metric_b.size() || metric_a.size() != train_counts.size()) {
    throw DimensionError("group delta inputs are not aligned by class");
  }
  for (size_t i = 1; i < upper_bounds.size(); ++i) {
    if (!(upper_bounds[i] > upper_bounds[i - 1])) throw Error("bucket bounds must increase");
  }
  GroupDelta gd;
  double lower = 0;
  for (double ub : upper_bounds) {
    gd.buckets.push_back({lower, ub, 0, {}, {}, {}});
    lower = ub;
  }
  gd.buckets.push_back({lower, std::numeric_limits<double>::infinity(), 0, {}, {}, {}});

  std::vector<double> sum_a(gd.buckets.size()), sum_b(gd.buckets.size());
  for (size_t c = 0; c < metric_a.size(); ++c) {
    const double count = static_cast<double>(train_counts[c]);
    size_t b = 0;
    while (b + 1 < gd.buckets.size() && count > gd.buckets[b].upper) ++b;
    if (!metric_a[c] || !metric_b[c]) {
      gd.bucket_of_class.push_back(-1);
      continue;
    }
    gd.bucket_of_class.push_back(static_cast<int>(b));
    ++gd.buckets[b].n_classes;
    sum_a[b] += *metric_a[c];
    sum_b[b] += *metric_b[c];
  }
  for (size_t b = 0; b < gd.buckets.size(); ++b) {
    auto &bk = gd.buckets[b];
    if (bk.n_classes == 0) continue;
    bk.mean_a = sum_a[b] / bk.n_classes;
    bk.mean_b = sum_b[b] / bk.n_classes;
    bk.delta = *bk.mean_b - *bk.mean_a;
  }
  return gd;
}

std::string GroupDelta::ToCsv() const {
  auto opt = [](const std::optional<double> &v) { return v ? FormatDouble(*v) : std::string(); };
  std::string out = "bucket,lower,upper,n_classes,mean_a,mean_b,delta\n";
  for (size_t b = 0; b < buckets.size(); ++b) {
    const auto &bk = buckets[b];
    out += std::to_string(b) + "," + FormatDouble(bk.lower) + "," +
           (std::isinf(bk.upper) ? std::string("inf") : FormatDouble(bk.upper)) + "," +
           std::to_string(bk.n_classes) + "," + opt(bk.mean_a) + "," + opt(bk.mean_b) + "," +
           opt(bk.delta) + "\n";
  }
  return out;
}

GroupDelta GroupDelta::FromCsv(std::string_view text, const std::string &origin) {
  const auto lines = SplitLines(text);
  if (lines.empty() || lines[0] != "bucket,lower,upper,n_classes,mean_a,mean_b,delta") {
    throw ParseError(origin, 1, "expected group delta header");
  }
  auto opt = [](const std::string &s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return ParseDouble(s);
  };
  GroupDelta gd;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto f = Split(lines[i], ',');
    if (f.size() != 7) throw ParseError(origin, static_cast<int>(i + 1), "expected 7 fields");
    try {
      GroupBucket b;
      b.lower = ParseDouble(f[1]);
      b.upper = f[2] == "inf" ? std::numeric_limits<double>::infinity() : ParseDouble(f[2]);
      b.n_classes = static_cast<int>(ParseDouble(f[3]));
      b.mean_a = opt(f[4]);
      b.mean_b = opt(f[5]);
      b.delta = opt(f[6]);
      gd.buckets.push_back(b);
    } catch (const Error &e) {
      throw ParseError(origin, static_cast<int>(i + 1), e.what());
    }
  }
  return gd;
}

std::string GroupDeltaSvg(const std::vector<std::pair<std::string, GroupDelta>> &series,
                          const std::string &title) {
  const int width = 640, height = 360, margin = 50;
  size_t n_buckets = 0;
  double max_abs = 1e-9;
  for (const auto &[name, gd] : series) {
    n_buckets = std::max(n_buckets, gd.buckets.size());
    for (const auto &b : gd.buckets) {
      if (b.delta) max_abs = std::max(max_abs, std::abs(*b.delta));
    }
  }
  const char *colours[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52"};
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  const double zero_y = margin + plot_h / 2;
  const double group_w = n_buckets ? plot_w / n_buckets : plot_w;
  const double bar_w = series.empty() ? 0 : group_w * 0.8 / series.size();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << zero_y << "\" x2=\"" << width - margin
      << "\" y2=\"" << zero_y << "\" stroke=\"black\"/>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const auto &gd = series[s].second;
    for (size_t b = 0; b < gd.buckets.size(); ++b) {
      const auto &bk = gd.buckets[b];
      if (!bk.delta) continue;
      const double h = *bk.delta / max_abs * (plot_h / 2);
      const double x = margin + b * group_w + group_w * 0.1 + s * bar_w;
      const double y = h >= 0 ? zero_y - h : zero_y;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\""
          << std::abs(h) << "\" fill=\"" << colours[s % 4] << "\"><title>"
          << series[s].first << ": " << FormatDouble(*bk.delta) << "</title></rect>\n";
    }
    svg << "<rect x=\"" << width - margin - 90 << "\" y=\"" << 30 + 14 * s
        << "\" width=\"10\" height=\"10\" fill=\"" << colours[s % 4] << "\"/>";
    svg << "<text x=\"" << width - margin - 76 << "\" y=\"" << 39 + 14 * s << "\">"
        << series[s].first << "</text>\n";
  }
  if (!series.empty()) {
    const auto &gd = series.front().second;
    for (size_t b = 0; b < gd.buckets.size(); ++b) {
      const auto &bk = gd.buckets[b];
      std::string label = (b == 0 ? "[" : "(") + FormatDouble(bk.lower) + ", " +
                          (std::isinf(bk.upper) ? std::string("inf)") : FormatDouble(bk.upper) + "]");
      svg << "<text x=\"" << margin + (b + 0.5) * group_w << "\" y=\"" << height - margin + 20
          << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
  }
  svg << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\">+" << FormatDouble(max_abs)
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tagkg
