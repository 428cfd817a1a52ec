#include "egonav/harness/eval.hpp"

#include <algorithm>

#include "egonav/common/error.hpp"

namespace egonav::harness {

std::vector<ScoreVector> score_examples(models::Model<float>& model,
                                        std::span<const ExampleRef> refs,
                                        int batch_size) {
  check(batch_size > 0, "batch size must be positive");
  nn::NoGradGuard no_grad;
  std::vector<ScoreVector> scores;
  scores.reserve(refs.size());
  for (std::size_t at = 0; at < refs.size(); at += batch_size) {
    const std::size_t n =
        std::min<std::size_t>(batch_size, refs.size() - at);
    const auto batch = make_batch(model.config(), refs.subspan(at, n));
    const auto probs = model.forward(batch);
    const auto& v = probs.values();
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back({static_cast<double>(v[i * kNumClasses + 0]),
                        static_cast<double>(v[i * kNumClasses + 1]),
                        static_cast<double>(v[i * kNumClasses + 2])});
    }
  }
  return scores;
}

PartitionedReport evaluate(models::Model<float>& model,
                           const std::vector<const Scene*>& scenes,
                           int batch_size) {
  const auto refs = collect_examples(scenes);
  check(!refs.empty(), "evaluate: no records in the given scenes");
  const auto scores = score_examples(model, refs, batch_size);

  std::vector<LabelVector> labels(refs.size());
  std::vector<char> is_indoor(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    labels[i] = refs[i].record->label;
    is_indoor[i] = refs[i].scene->kind == SceneKind::kIndoor;
  }

  PartitionedReport report;
  report.overall = compute_report(scores, labels);

  for (int pass = 0; pass < 2; ++pass) {
    const bool want_indoor = pass == 0;
    std::vector<ScoreVector> s;
    std::vector<LabelVector> y;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (static_cast<bool>(is_indoor[i]) == want_indoor) {
        s.push_back(scores[i]);
        y.push_back(labels[i]);
      }
    }
    if (s.empty()) continue;
    auto& slot = want_indoor ? report.indoor : report.outdoor;
    slot = compute_report(s, y);
  }
  return report;
}

std::vector<const Scene*> split_scenes(const Dataset& dataset,
                                       const std::vector<std::string>& ids) {
  std::vector<const Scene*> out;
  for (const auto& id : ids) out.push_back(&dataset.at(id));
  return out;
}

}  // namespace egonav::harness
