#include "egonav/harness/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "egonav/common/error.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/nn/loss.hpp"

namespace egonav::harness {

std::vector<const Scene*> mix_scenes(const Dataset& dataset,
                                     const std::vector<std::string>& ids,
                                     TrainMix mix) {
  std::vector<const Scene*> out;
  for (const auto& id : ids) {
    const Scene& scene = dataset.at(id);
    if (mix == TrainMix::kIndoor && scene.kind != SceneKind::kIndoor) continue;
    if (mix == TrainMix::kOutdoor && scene.kind != SceneKind::kOutdoor) continue;
    out.push_back(&scene);
  }
  return out;
}

TrainResult train_model(models::Model<float>& model, const Dataset& dataset,
                        const DatasetSplit& split, const ExperimentConfig& cfg,
                        std::ostream* out) {
  cfg.validate();
  const auto train_scenes = mix_scenes(dataset, split.train, cfg.train_mix);
  const auto val_scenes = mix_scenes(dataset, split.validation, cfg.train_mix);
  check(!train_scenes.empty(), "train mix \"", train_mix_name(cfg.train_mix),
        "\" matches no training scenes");
  check(!val_scenes.empty(), "train mix \"", train_mix_name(cfg.train_mix),
        "\" matches no validation scenes");

  auto examples =
      cfg.oversample
          ? oversampled_examples(train_scenes,
                                 hash_mix(cfg.seed, fnv1a("oversample")))
          : collect_examples(train_scenes);
  check(!examples.empty(), "no training examples");

  const int batches_per_epoch = static_cast<int>(
      (examples.size() + cfg.batch_size - 1) / cfg.batch_size);
  const int total_steps = cfg.epochs * batches_per_epoch;

  nn::FocalConfig<float> loss_cfg;
  loss_cfg.gamma = static_cast<float>(cfg.focal_gamma);
  loss_cfg.alpha.assign(cfg.focal_alpha.begin(), cfg.focal_alpha.end());

  nn::Adam<float> adam(model.params(), cfg.optim);

  BatchOptions batch_opts;
  batch_opts.augment = cfg.augment;
  batch_opts.augment_config = cfg.augment_config;
  batch_opts.augment_seed = hash_mix(cfg.seed, fnv1a("augment"));

  TrainResult result;
  std::vector<std::vector<float>> best_values;
  char line[160];

  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng(hash_mix(hash_mix(cfg.seed, fnv1a("shuffle")),
                 static_cast<std::uint64_t>(epoch)))
        .shuffle(examples);
    batch_opts.epoch = epoch;

    double loss_sum = 0.0;
    for (int b = 0; b < batches_per_epoch; ++b) {
      const std::size_t at = static_cast<std::size_t>(b) * cfg.batch_size;
      const std::size_t n =
          std::min<std::size_t>(cfg.batch_size, examples.size() - at);
      const auto batch = make_batch(
          model.config(), std::span(examples).subspan(at, n), batch_opts);

      model.params().zero_grad();
      auto probs = model.forward(batch);
      auto loss = nn::focal_loss(probs, batch.targets, loss_cfg);
      const double loss_value = static_cast<double>(loss.item());
      if (!std::isfinite(loss_value)) {
        fail("training diverged: non-finite loss at epoch ", epoch, " batch ",
             b, " of ", batches_per_epoch);
      }
      loss_sum += loss_value;
      loss.backward();
      adam.step(nn::cosine_lr(step, total_steps, 1.0));
      ++step;
    }

    const auto val_report = evaluate(model, val_scenes, cfg.batch_size);
    const double turn_auc = val_report.overall.mean_turn_auc_pr();

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / batches_per_epoch;
    entry.val_turn_auc_pr = turn_auc;
    entry.best = turn_auc > result.best_val_turn_auc_pr || result.best_epoch == 0;
    if (entry.best) {
      result.best_epoch = epoch;
      result.best_val_turn_auc_pr = turn_auc;
      best_values.clear();
      for (const auto& p : model.params().items()) {
        const auto& v = p.value.values();
        best_values.emplace_back(v.begin(), v.end());
      }
    }
    result.epochs.push_back(entry);

    std::snprintf(line, sizeof line,
                  "epoch %3d/%d  loss %.6f  val turn auc_pr %.6f%s\n",
                  epoch, cfg.epochs, entry.train_loss, turn_auc,
                  entry.best ? "  *" : "");
    result.log_text += line;
    if (out) (*out) << line << std::flush;
  }

  // leave the model holding the best-validation weights
  auto& params = model.params().items();
  check(best_values.size() == params.size(), "best snapshot out of sync");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto v = params[i].value.mutable_values();
    std::copy(best_values[i].begin(), best_values[i].end(), v.begin());
  }
  return result;
}

}  // namespace egonav::harness
