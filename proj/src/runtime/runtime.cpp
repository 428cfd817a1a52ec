#include "egonav/runtime/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "egonav/common/error.hpp"
#include "egonav/harness/batch.hpp"

namespace egonav::runtime {

LabelVector active_set(const ScoreVector& scores, double threshold) {
  check(threshold > 0.0 && threshold < 1.0, "threshold must be in (0,1), got ",
        threshold);
  LabelVector set;
  set.left = scores.left > threshold;
  set.right = scores.right > threshold;
  set.front = scores.front > threshold;
  if (!set.any()) set.front = true;
  return set;
}

std::string command_text(const LabelVector& set) {
  if (set.left && set.right) return "left or right available";
  if (set.left) return "turn left";
  if (set.right) return "turn right";
  return "go straight";
}

CommandGate::CommandGate(int depth, double threshold)
    : depth_(depth), threshold_(threshold) {
  check(depth >= 1, "hysteresis depth must be >= 1, got ", depth);
  check(threshold > 0.0 && threshold < 1.0, "threshold must be in (0,1), got ",
        threshold);
}

void CommandGate::reset() {
  pending_bits_ = -1;
  count_ = 0;
  emitted_bits_ = -1;
}

std::optional<std::string> CommandGate::push(const ScoreVector& scores) {
  const LabelVector set = active_set(scores, threshold_);
  const int bits = set.bits();
  if (bits == pending_bits_) {
    count_ = std::min(count_ + 1, depth_);
  } else {
    pending_bits_ = bits;
    count_ = 1;
  }
  if (count_ >= depth_ && bits != emitted_bits_) {
    emitted_bits_ = bits;
    return command_text(set);
  }
  return std::nullopt;
}

StreamRunner::StreamRunner(std::shared_ptr<models::Model<float>> model,
                           std::optional<intent::Route> route)
    : model_(std::move(model)), route_(std::move(route)) {
  check(model_ != nullptr, "stream runner needs a model");
}

ScoreVector StreamRunner::step(const Frame& frame,
                               const std::optional<GpsFix>& gps) {
  const auto& cfg = model_->config();
  const int steps = cfg.context_length + 1;
  check(cfg.frame_size == kFrameSize, "stream runner expects ", kFrameSize,
        "-pixel frames");

  if (static_cast<int>(window_.size()) == steps) {
    window_.erase(window_.begin());
  }
  window_.push_back(frame);

  const auto t0 = std::chrono::steady_clock::now();

  models::Batch<float> batch;
  batch.batch = 1;
  batch.steps = steps;
  const int px = kFrameSize * kFrameSize;
  batch.current = nn::Tensor<float>({1, 1, kFrameSize, kFrameSize});
  batch.sequence = nn::Tensor<float>({steps, 1, kFrameSize, kFrameSize});
  batch.intent = nn::Tensor<float>({1, intent::kIntentDim}, 0.0f);
  batch.intent_steps = nn::Tensor<float>({steps, intent::kIntentDim}, 0.0f);
  batch.targets = nn::Tensor<float>({1, kNumClasses}, 0.0f);

  harness::write_frame_floats(window_.back(),
                              batch.current.mutable_values().data());
  float* seq = batch.sequence.mutable_values().data();
  const int missing = steps - static_cast<int>(window_.size());
  for (int slot = 0; slot < steps; ++slot) {
    const int idx = std::max(slot - missing, 0);  // repeat the oldest frame
    harness::write_frame_floats(window_[static_cast<std::size_t>(idx)],
                                seq + static_cast<std::size_t>(slot) * px);
  }

  if (route_ && gps) {
    const auto feature = intent::encode_intent(*route_, *gps);
    float* cur = batch.intent.mutable_values().data();
    float* per_step = batch.intent_steps.mutable_values().data();
    harness::write_intent_floats(feature, cur);
    for (int slot = 0; slot < steps; ++slot) {
      for (int d = 0; d < intent::kIntentDim; ++d) {
        per_step[static_cast<std::size_t>(slot) * intent::kIntentDim + d] = cur[d];
      }
    }
  }

  nn::NoGradGuard no_grad;
  const auto probs = model_->forward(batch);
  const auto& v = probs.values();
  check(v.size() == kNumClasses, "model returned ", v.size(), " scores");

  const auto t1 = std::chrono::steady_clock::now();
  latencies_ms_.push_back(
      std::chrono::duration<double, std::milli>(t1 - t0).count());

  return {static_cast<double>(v[0]), static_cast<double>(v[1]),
          static_cast<double>(v[2])};
}

namespace {

double rank_percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

LatencySummary StreamRunner::latency_summary() const {
  LatencySummary s;
  s.calls = latencies_ms_.size();
  if (latencies_ms_.empty()) return s;
  s.p50_ms = rank_percentile(latencies_ms_, 0.50);
  s.p95_ms = rank_percentile(latencies_ms_, 0.95);
  s.max_ms = *std::max_element(latencies_ms_.begin(), latencies_ms_.end());
  return s;
}

}  // namespace egonav::runtime
