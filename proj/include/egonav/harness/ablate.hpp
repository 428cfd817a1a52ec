#pragma once

#include <ostream>
#include <vector>

#include "egonav/harness/train.hpp"

namespace egonav::harness {

struct AblationCell {
  models::Architecture arch = models::Architecture::kCnn;
  TrainMix mix = TrainMix::kCombined;
  bool quantized = false;
  PartitionedReport report;  // held-out test set
};

struct AblationOptions {
  std::vector<models::Architecture> archs;  // empty -> all five
  std::vector<TrainMix> mixes;              // empty -> combined only
  bool quantize = false;                    // add binary16 rows
};

// {architecture x train mix} grid; each cell trains from scratch under the
// base config and reports on the test split
std::vector<AblationCell> run_ablation(const Dataset& dataset,
                                       const DatasetSplit& split,
                                       const ExperimentConfig& base,
                                       const AblationOptions& opts,
                                       std::ostream* log = nullptr);

std::string ablation_table(const std::vector<AblationCell>& cells);
nlohmann::json ablation_to_json(const std::vector<AblationCell>& cells);

}  // namespace egonav::harness
