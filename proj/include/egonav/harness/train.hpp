#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "egonav/core/dataset.hpp"
#include "egonav/harness/config.hpp"
#include "egonav/harness/eval.hpp"
#include "egonav/models/models.hpp"

namespace egonav::harness {

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_turn_auc_pr = 0.0;
  bool best = false;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_val_turn_auc_pr = 0.0;
  std::string log_text;  // deterministic under fixed seed
};

// scenes from `ids` that match the train mix
std::vector<const Scene*> mix_scenes(const Dataset& dataset,
                                     const std::vector<std::string>& ids,
                                     TrainMix mix);

// oversample -> (augment) -> focal + Adam + cosine schedule; keeps the
// weights of the epoch with the best validation turn AUC-PR
TrainResult train_model(models::Model<float>& model, const Dataset& dataset,
                        const DatasetSplit& split, const ExperimentConfig& cfg,
                        std::ostream* out = nullptr);

}  // namespace egonav::harness
