#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egonav/core/label.hpp"

namespace egonav::harness {

// average precision over the ranked scores, ties grouped at one threshold;
// throws when labels are single-class (metric undefined)
double auc_pr(std::span<const double> scores, std::span<const int> labels);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// fixed-threshold precision/recall/f1 with the usual zero conventions
Prf prf1(std::span<const double> scores, std::span<const int> labels,
         double threshold = 0.5);

struct ClassMetrics {
  double auc_pr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::array<ClassMetrics, kNumClasses> per_class{};  // LEFT, RIGHT, FRONT
  double accuracy = 0.0;  // per-(example, class) correctness
  std::size_t examples = 0;

  double mean_turn_auc_pr() const {
    return 0.5 * (per_class[0].auc_pr + per_class[1].auc_pr);
  }
};

EvalReport compute_report(std::span<const ScoreVector> scores,
                          std::span<const LabelVector> labels,
                          double threshold = 0.5);

struct PartitionedReport {
  EvalReport overall;
  std::optional<EvalReport> indoor;
  std::optional<EvalReport> outdoor;
};

std::string report_table(const PartitionedReport& r);
nlohmann::json report_to_json(const PartitionedReport& r);

}  // namespace egonav::harness
