#include "egonav/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "egonav/common/error.hpp"

namespace egonav::harness {

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check(scores.size() == labels.size(), "auc_pr: ", scores.size(),
        " scores vs ", labels.size(), " labels");
  check(!scores.empty(), "auc_pr: empty input");
  std::size_t positives = 0;
  for (int y : labels) {
    check(y == 0 || y == 1, "auc_pr: labels must be 0/1, got ", y);
    positives += static_cast<std::size_t>(y);
  }
  check(positives > 0 && positives < labels.size(),
        "auc_pr undefined: labels are single-class (", positives, " of ",
        labels.size(), " positive)");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  // walk distinct thresholds; everything tied at a score enters at once
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++tp; else ++fp;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Prf prf1(std::span<const double> scores, std::span<const int> labels,
         double threshold) {
  check(scores.size() == labels.size(), "prf1: ", scores.size(), " scores vs ",
        labels.size(), " labels");
  check(!scores.empty(), "prf1: empty input");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] > threshold;
    if (pred && labels[i] == 1) ++tp;
    if (pred && labels[i] == 0) ++fp;
    if (!pred && labels[i] == 1) ++fn;
  }
  Prf out;
  out.precision = tp + fp == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(tp + fp);
  out.recall = tp + fn == 0
                   ? 0.0
                   : static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall /
                     (out.precision + out.recall);
  return out;
}

EvalReport compute_report(std::span<const ScoreVector> scores,
                          std::span<const LabelVector> labels,
                          double threshold) {
  check(scores.size() == labels.size(), "compute_report: ", scores.size(),
        " scores vs ", labels.size(), " labels");
  check(!scores.empty(), "compute_report: empty input");

  EvalReport report;
  report.examples = scores.size();
  std::size_t correct = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto cls = static_cast<DirClass>(c);
    std::vector<double> s(scores.size());
    std::vector<int> y(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      s[i] = scores[i].get(cls);
      y[i] = labels[i].get(cls) ? 1 : 0;
      if ((s[i] > threshold) == (y[i] == 1)) ++correct;
    }
    auto& m = report.per_class[static_cast<std::size_t>(c)];
    m.auc_pr = auc_pr(s, y);
    const Prf p = prf1(s, y, threshold);
    m.precision = p.precision;
    m.recall = p.recall;
    m.f1 = p.f1;
  }
  report.accuracy = static_cast<double>(correct) /
                    static_cast<double>(scores.size() * kNumClasses);
  return report;
}

namespace {

void append_report_rows(std::ostringstream& out, const std::string& partition,
                        const EvalReport& r) {
  char buf[160];
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& m = r.per_class[static_cast<std::size_t>(c)];
    std::snprintf(buf, sizeof buf,
                  "%-8s %-6s %8.4f %10.4f %8.4f %8.4f\n", partition.c_str(),
                  dir_name(static_cast<DirClass>(c)), m.auc_pr, m.precision,
                  m.recall, m.f1);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-8s accuracy %.4f over %zu records\n",
                partition.c_str(), r.accuracy, r.examples);
  out << buf;
}

nlohmann::json eval_report_json(const EvalReport& r) {
  nlohmann::json j;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& m = r.per_class[static_cast<std::size_t>(c)];
    j[dir_name(static_cast<DirClass>(c))] = {{"auc_pr", m.auc_pr},
                                             {"precision", m.precision},
                                             {"recall", m.recall},
                                             {"f1", m.f1}};
  }
  j["accuracy"] = r.accuracy;
  j["examples"] = r.examples;
  j["mean_turn_auc_pr"] = r.mean_turn_auc_pr();
  return j;
}

}  // namespace

std::string report_table(const PartitionedReport& r) {
  std::ostringstream out;
  out << "partition class   auc_pr  precision   recall       f1\n";
  append_report_rows(out, "overall", r.overall);
  if (r.indoor) append_report_rows(out, "indoor", *r.indoor);
  if (r.outdoor) append_report_rows(out, "outdoor", *r.outdoor);
  return out.str();
}

nlohmann::json report_to_json(const PartitionedReport& r) {
  nlohmann::json j;
  j["overall"] = eval_report_json(r.overall);
  if (r.indoor) j["indoor"] = eval_report_json(*r.indoor);
  if (r.outdoor) j["outdoor"] = eval_report_json(*r.outdoor);
  return j;
}

}  // namespace egonav::harness
