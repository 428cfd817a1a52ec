#pragma once

#include <vector>

#include "egonav/core/dataset.hpp"
#include "egonav/harness/batch.hpp"
#include "egonav/harness/metrics.hpp"
#include "egonav/models/models.hpp"

namespace egonav::harness {

// forward all records through the model in fixed-size batches, record order
std::vector<ScoreVector> score_examples(models::Model<float>& model,
                                        std::span<const ExampleRef> refs,
                                        int batch_size = 64);

// report over the given scenes, partitioned by scene kind; a partition with
// no scenes is omitted
PartitionedReport evaluate(models::Model<float>& model,
                           const std::vector<const Scene*>& scenes,
                           int batch_size = 64);

// scenes of one split, optionally restricted to a kind
std::vector<const Scene*> split_scenes(const Dataset& dataset,
                                       const std::vector<std::string>& ids);

}  // namespace egonav::harness
