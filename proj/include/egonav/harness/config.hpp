#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "egonav/core/augment.hpp"
#include "egonav/models/config.hpp"
#include "egonav/nn/optim.hpp"

namespace egonav::harness {

enum class TrainMix { kIndoor, kOutdoor, kCombined };

const char* train_mix_name(TrainMix m);
TrainMix train_mix_from_name(const std::string& name);

struct ExperimentConfig {
  models::ModelConfig model;
  std::string dataset_dir = "dataset";
  std::string split_path;  // defaults to <dataset_dir>/split.json
  std::string checkpoint_path = "model.ckpt";

  std::uint64_t seed = 1;
  int epochs = 30;
  int batch_size = 64;
  nn::AdamConfig optim;
  double focal_gamma = 2.0;
  std::array<double, 3> focal_alpha = {1.2, 1.2, 0.6};
  bool oversample = true;
  bool augment = false;
  AugmentConfig augment_config;
  TrainMix train_mix = TrainMix::kCombined;

  std::string resolved_split_path() const;
  void validate() const;
};

// only keys present in `j` are applied, so CLI flags can layer on top
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace egonav::harness
