#include "egonav/harness/ablate.hpp"

#include <cstdio>
#include <sstream>

#include "egonav/common/rng.hpp"
#include "egonav/nn/half.hpp"

namespace egonav::harness {

std::vector<AblationCell> run_ablation(const Dataset& dataset,
                                       const DatasetSplit& split,
                                       const ExperimentConfig& base,
                                       const AblationOptions& opts,
                                       std::ostream* log) {
  std::vector<models::Architecture> archs = opts.archs;
  if (archs.empty()) {
    archs.assign(std::begin(models::kAllArchitectures),
                 std::end(models::kAllArchitectures));
  }
  std::vector<TrainMix> mixes = opts.mixes;
  if (mixes.empty()) mixes.push_back(TrainMix::kCombined);

  const auto test_scenes = split_scenes(dataset, split.test);

  std::vector<AblationCell> cells;
  for (const auto mix : mixes) {
    for (const auto arch : archs) {
      ExperimentConfig cfg = base;
      cfg.model.architecture = arch;
      cfg.train_mix = mix;
      if (log) {
        (*log) << "=== " << models::architecture_name(arch) << " / "
               << train_mix_name(mix) << " ===\n";
      }
      auto model = models::build_model<float>(
          cfg.model, hash_mix(cfg.seed, fnv1a(models::architecture_name(arch))));
      train_model(*model, dataset, split, cfg, log);

      AblationCell cell;
      cell.arch = arch;
      cell.mix = mix;
      cell.report = evaluate(*model, test_scenes, cfg.batch_size);
      cells.push_back(cell);

      if (opts.quantize) {
        nn::quantize_f16(model->params());
        AblationCell q = cells.back();
        q.quantized = true;
        q.report = evaluate(*model, test_scenes, cfg.batch_size);
        cells.push_back(std::move(q));
      }
    }
  }
  return cells;
}

namespace {

double turn_auc_or_nan(const std::optional<EvalReport>& r) {
  return r ? r->mean_turn_auc_pr() : std::nan("");
}

}  // namespace

std::string ablation_table(const std::vector<AblationCell>& cells) {
  std::ostringstream out;
  out << "architecture      mix       dtype  turn_auc  indoor  outdoor  "
         "accuracy\n";
  char buf[160];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%-17s %-9s %-6s %9.4f %7.4f %8.4f %9.4f\n",
                  models::architecture_name(c.arch), train_mix_name(c.mix),
                  c.quantized ? "f16" : "f32",
                  c.report.overall.mean_turn_auc_pr(),
                  turn_auc_or_nan(c.report.indoor),
                  turn_auc_or_nan(c.report.outdoor), c.report.overall.accuracy);
    out << buf;
  }
  return out.str();
}

nlohmann::json ablation_to_json(const std::vector<AblationCell>& cells) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json row;
    row["architecture"] = models::architecture_name(c.arch);
    row["train_mix"] = train_mix_name(c.mix);
    row["dtype"] = c.quantized ? "f16" : "f32";
    row["report"] = report_to_json(c.report);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace egonav::harness
