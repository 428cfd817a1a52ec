#include "egonav/harness/batch.hpp"

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"

namespace egonav::harness {

std::vector<ExampleRef> collect_examples(const std::vector<const Scene*>& scenes) {
  std::vector<ExampleRef> refs;
  for (const Scene* scene : scenes) {
    for (const Record& r : scene->records) refs.push_back({scene, &r, 0});
  }
  return refs;
}

std::vector<ExampleRef> oversampled_examples(
    const std::vector<const Scene*>& scenes, std::uint64_t seed) {
  std::vector<ExampleRef> refs = collect_examples(scenes);
  const std::size_t originals = refs.size();
  for (std::size_t i = 0; i < originals; ++i) {
    if (refs[i].record->label.is_turn()) {
      refs.push_back({refs[i].scene, refs[i].record, 1});
    }
  }
  Rng(seed).shuffle(refs);
  return refs;
}

intent::IntentFeature record_intent(const Scene& scene, const Record& record) {
  if (!scene.route || !record.gps || !record.intent_step) {
    return intent::zero_intent();
  }
  return intent::encode_intent_for_step(
      *scene.route, static_cast<std::size_t>(*record.intent_step), *record.gps);
}

void write_frame_floats(const Frame& frame, float* dst) {
  for (std::size_t i = 0; i < kFrameBytes; ++i) {
    dst[i] = static_cast<float>(frame.pixels[i]) / 255.0f;
  }
}

void write_intent_floats(const intent::IntentFeature& feature, float* dst) {
  for (int d = 0; d < intent::kIntentDim; ++d) {
    const float v = static_cast<float>(feature[static_cast<std::size_t>(d)]);
    dst[d] = d < intent::kManeuverCount ? v : v * kGeoFeatureScale;
  }
}

namespace {

// stable per-draw stream: reordering batches or epochs of other records can
// never change what a given (record, dup, slot) sees
Rng slot_rng(const BatchOptions& opts, const ExampleRef& ref, int slot) {
  std::uint64_t h = hash_mix(opts.augment_seed,
                             static_cast<std::uint64_t>(opts.epoch));
  h = hash_mix(h, fnv1a(ref.record->scene_id));
  h = hash_mix(h, static_cast<std::uint64_t>(ref.record->frame_id));
  h = hash_mix(h, static_cast<std::uint64_t>(ref.dup));
  return Rng(hash_mix(h, static_cast<std::uint64_t>(slot)));
}

}  // namespace

models::Batch<float> make_batch(const models::ModelConfig& cfg,
                                std::span<const ExampleRef> refs,
                                const BatchOptions& opts) {
  check(!refs.empty(), "make_batch: no examples");
  check(cfg.frame_size == kFrameSize && cfg.frame_channels == 1,
        "make_batch packs ", kFrameSize, "x", kFrameSize,
        " single-channel frames, config wants ", cfg.frame_size);
  const int n = static_cast<int>(refs.size());
  const int steps = cfg.context_length + 1;
  const int px = cfg.frame_size * cfg.frame_size;

  models::Batch<float> batch;
  batch.batch = n;
  batch.steps = steps;
  batch.current = nn::Tensor<float>({n, 1, cfg.frame_size, cfg.frame_size},
                                    nn::Buf<float>((std::size_t)n * px));
  batch.sequence =
      nn::Tensor<float>({steps * n, 1, cfg.frame_size, cfg.frame_size},
                        nn::Buf<float>((std::size_t)steps * n * px));
  batch.intent = nn::Tensor<float>({n, intent::kIntentDim}, 0.0f);
  batch.intent_steps =
      nn::Tensor<float>({steps * n, intent::kIntentDim}, 0.0f);
  batch.targets = nn::Tensor<float>({n, kNumClasses}, 0.0f);

  float* cur = batch.current.mutable_values().data();
  float* seq = batch.sequence.mutable_values().data();
  float* intent_dst = batch.intent.mutable_values().data();
  float* steps_dst = batch.intent_steps.mutable_values().data();
  float* targets = batch.targets.mutable_values().data();

  for (int i = 0; i < n; ++i) {
    const ExampleRef& ref = refs[static_cast<std::size_t>(i)];
    const Record& rec = *ref.record;
    const FrameStore& frames = ref.scene->frames;

    // slots 0..steps-2 are the context (oldest first), the last is current
    for (int slot = 0; slot < steps; ++slot) {
      const int frame_id = slot + 1 == steps
                               ? rec.frame_id
                               : rec.context_ids[static_cast<std::size_t>(slot)];
      Frame frame = frames.frame(static_cast<std::size_t>(frame_id));
      if (opts.augment) {
        Rng rng = slot_rng(opts, ref, slot);
        frame = augment_frame(frame, rng, opts.augment_config);
      }
      float* dst = seq + (static_cast<std::size_t>(slot) * n + i) * px;
      write_frame_floats(frame, dst);
      if (slot + 1 == steps) write_frame_floats(frame, cur + std::size_t(i) * px);
    }

    const auto feature = record_intent(*ref.scene, rec);
    write_intent_floats(feature, intent_dst + std::size_t(i) * intent::kIntentDim);
    for (int slot = 0; slot < steps; ++slot) {
      for (int d = 0; d < intent::kIntentDim; ++d) {
        steps_dst[(static_cast<std::size_t>(slot) * n + i) * intent::kIntentDim + d] =
            intent_dst[std::size_t(i) * intent::kIntentDim + d];
      }
    }

    for (int c = 0; c < kNumClasses; ++c) {
      targets[std::size_t(i) * kNumClasses + c] =
          rec.label.get(static_cast<DirClass>(c)) ? 1.0f : 0.0f;
    }
  }
  return batch;
}

}  // namespace egonav::harness
