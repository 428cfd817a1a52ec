#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "egonav/core/augment.hpp"
#include "egonav/core/dataset.hpp"
#include "egonav/core/oversample.hpp"
#include "egonav/models/models.hpp"

namespace egonav::harness {

// one training example: a record plus its oversampling ordinal (0 = original)
struct ExampleRef {
  const Scene* scene = nullptr;
  const Record* record = nullptr;
  int dup = 0;
};

// all records of the given scenes, in scene order
std::vector<ExampleRef> collect_examples(const std::vector<const Scene*>& scenes);

// turn-labeled records appear twice, deterministically shuffled
std::vector<ExampleRef> oversampled_examples(
    const std::vector<const Scene*>& scenes, std::uint64_t seed);

struct BatchOptions {
  bool augment = false;
  AugmentConfig augment_config;
  std::uint64_t augment_seed = 0;
  int epoch = 0;
};

// pack records into model input tensors; augmentation draws are keyed by
// (seed, epoch, scene, frame, dup, slot) so ordering never changes them
models::Batch<float> make_batch(const models::ModelConfig& cfg,
                                std::span<const ExampleRef> refs,
                                const BatchOptions& opts = {});

// shared pixel scaling for batch assembly and the streaming runner
void write_frame_floats(const Frame& frame, float* dst);

// meters-to-feature scale for the geometric intent dims; keeps them in the
// same range as the one-hot block
inline constexpr float kGeoFeatureScale = 0.02f;

// shared intent scaling: one-hot passes through, coordinates are compressed
void write_intent_floats(const intent::IntentFeature& feature, float* dst);

// intent feature for a record, zeros for indoor scenes
intent::IntentFeature record_intent(const Scene& scene, const Record& record);

}  // namespace egonav::harness
