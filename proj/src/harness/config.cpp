#include "egonav/harness/config.hpp"

#include <fstream>

#include "egonav/common/error.hpp"
#include "egonav/common/io.hpp"

namespace egonav::harness {

const char* train_mix_name(TrainMix m) {
  switch (m) {
    case TrainMix::kIndoor: return "indoor";
    case TrainMix::kOutdoor: return "outdoor";
    case TrainMix::kCombined: return "combined";
  }
  return "combined";
}

TrainMix train_mix_from_name(const std::string& name) {
  if (name == "indoor") return TrainMix::kIndoor;
  if (name == "outdoor") return TrainMix::kOutdoor;
  if (name == "combined") return TrainMix::kCombined;
  fail("unknown train mix \"", name, "\" (indoor|outdoor|combined)");
}

std::string ExperimentConfig::resolved_split_path() const {
  if (!split_path.empty()) return split_path;
  return dataset_dir + "/split.json";
}

void ExperimentConfig::validate() const {
  model.validate();
  check(epochs > 0, "epochs must be positive, got ", epochs);
  check(batch_size > 0, "batch size must be positive, got ", batch_size);
  check(focal_gamma >= 0.0, "focal gamma must be >= 0, got ", focal_gamma);
  for (double a : focal_alpha) check(a > 0.0, "focal alpha must be positive");
  check(optim.lr_from_scratch > 0.0 && optim.lr_fine_tuned > 0.0,
        "learning rates must be positive");
  check(!dataset_dir.empty(), "dataset_dir is empty");
}

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  check(j.is_object(), "config must be a JSON object");
  if (j.contains("model")) {
    // layer model keys over the current model config
    nlohmann::json merged = model_config_to_json(cfg.model);
    for (const auto& [k, v] : j.at("model").items()) merged[k] = v;
    cfg.model = models::model_config_from_json(merged);
  }
  maybe(j, "dataset_dir", cfg.dataset_dir);
  maybe(j, "split_path", cfg.split_path);
  maybe(j, "checkpoint_path", cfg.checkpoint_path);
  maybe(j, "seed", cfg.seed);
  maybe(j, "epochs", cfg.epochs);
  maybe(j, "batch_size", cfg.batch_size);
  maybe(j, "lr", cfg.optim.lr_from_scratch);
  maybe(j, "lr_fine_tuned", cfg.optim.lr_fine_tuned);
  maybe(j, "weight_decay", cfg.optim.weight_decay);
  maybe(j, "focal_gamma", cfg.focal_gamma);
  if (j.contains("focal_alpha")) {
    const auto a = j.at("focal_alpha");
    check(a.is_array() && a.size() == 3, "focal_alpha must have 3 entries");
    for (int i = 0; i < 3; ++i) cfg.focal_alpha[i] = a[i].get<double>();
  }
  maybe(j, "oversample", cfg.oversample);
  maybe(j, "augment", cfg.augment);
  if (j.contains("train_mix")) {
    cfg.train_mix = train_mix_from_name(j.at("train_mix").get<std::string>());
  }
}

nlohmann::json experiment_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = models::model_config_to_json(cfg.model);
  j["dataset_dir"] = cfg.dataset_dir;
  j["split_path"] = cfg.split_path;
  j["checkpoint_path"] = cfg.checkpoint_path;
  j["seed"] = cfg.seed;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["lr"] = cfg.optim.lr_from_scratch;
  j["lr_fine_tuned"] = cfg.optim.lr_fine_tuned;
  j["weight_decay"] = cfg.optim.weight_decay;
  j["focal_gamma"] = cfg.focal_gamma;
  j["focal_alpha"] = cfg.focal_alpha;
  j["oversample"] = cfg.oversample;
  j["augment"] = cfg.augment;
  j["train_mix"] = train_mix_name(cfg.train_mix);
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  const auto text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("config ", path, ": ", e.what());
  }
  apply_config_json(cfg, j);
  return cfg;
}

}  // namespace egonav::harness
