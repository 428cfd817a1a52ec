// ego-nav: synthesize walks, build datasets, train and run direction models
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "egonav/common/error.hpp"
#include "egonav/common/io.hpp"
#include "egonav/common/rng.hpp"
#include "egonav/core/dataset.hpp"
#include "egonav/core/split.hpp"
#include "egonav/harness/ablate.hpp"
#include "egonav/harness/config.hpp"
#include "egonav/harness/eval.hpp"
#include "egonav/harness/train.hpp"
#include "egonav/nn/checkpoint.hpp"
#include "egonav/runtime/runtime.hpp"
#include "egonav/sim/scene.hpp"

namespace {

using namespace egonav;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  check(file.good(), "cannot open ", path, " for writing");
  return file;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(what, ": ", e.what());
  }
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string out;
  int indoor = 25;
  int outdoor_count = 25;
  std::uint64_t seed = 1;
  double duration = 90.0;
  bool noise_free = false;
  double heading_sigma = 1.0;
  double gps_rms = 4.9;
  int indoor_grid = 4;
  int outdoor_grid = 5;
};

void run_simulate(const SimulateArgs& a) {
  sim::SceneParams params;
  params.duration_s = a.duration;
  params.indoor_grid = a.indoor_grid;
  params.outdoor_grid = a.outdoor_grid;
  if (a.noise_free) {
    params.noise = sim::NoiseConfig::noiseless();
  } else {
    params.noise.heading_sigma_deg = a.heading_sigma;
    params.noise.gps_rms_m = a.gps_rms;
  }

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  std::size_t total_records = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const auto kind = pass == 0 ? SceneKind::kIndoor : SceneKind::kOutdoor;
    const int count = pass == 0 ? a.indoor : a.outdoor_count;
    for (int i = 0; i < count; ++i) {
      const auto built = sim::build_scene(a.seed + i, kind, params);
      save_scene(dir, built.scene);
      save_sensors(dir / (built.scene.id + ".sensors.jsonl"), built.sensors);
      write_text_file(
          dir / (built.scene.id + ".script.json"),
          sim::script_to_json(sim::make_script(built, a.duration)).dump(2) + "\n");
      total_records += built.scene.records.size();
      std::cout << built.scene.id << "  " << built.scene.records.size()
                << " records  " << built.trace.turns.size() << " turns\n";
    }
  }
  std::cout << "wrote " << a.indoor + a.outdoor_count << " scenes, "
            << total_records << " records to " << a.out << "\n";
}

// --- label ------------------------------------------------------------------

void run_label(const std::string& sensors_path, const std::string& script_path,
               const std::string& out_path) {
  const auto sensors = load_sensors(sensors_path);
  const auto script =
      sim::script_from_json(parse_json_text(read_text_file(script_path), script_path));

  std::vector<double> times;
  const int n = static_cast<int>(std::floor(
      (script.duration_s - labeling::kLabelHorizonS - labeling::kTurnIntervalS) /
          kFramePeriodS + 1e-9)) + 1;
  for (int k = 0; k < n; ++k) times.push_back(k * kFramePeriodS);

  const auto labels = sim::label_from_sensors(
      sensors, times, sim::events_from_turns(script.turns),
      script.kind == SceneKind::kIndoor);

  std::ofstream file;
  auto& out = open_out(file, out_path);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const nlohmann::json j = {{"t", times[i]},
                              {"left", labels[i].left},
                              {"right", labels[i].right},
                              {"front", labels[i].front}};
    out << j.dump() << "\n";
  }
}

// --- dataset ----------------------------------------------------------------

void run_dataset(const std::string& dir, std::uint64_t seed,
                 std::array<double, 3> ratios, std::string out_path) {
  const auto dataset = load_dataset(dir);
  check(!dataset.scenes.empty(), "no scenes found in ", dir);
  const auto split = split_dataset(dataset.sizes(), ratios, seed);
  if (out_path.empty()) out_path = (std::filesystem::path(dir) / "split.json").string();
  write_text_file(out_path, split_to_json(split).dump(2) + "\n");

  const auto count_records = [&](const std::vector<std::string>& ids) {
    std::size_t n = 0;
    for (const auto& id : ids) n += dataset.at(id).records.size();
    return n;
  };
  std::cout << "train      " << split.train.size() << " scenes  "
            << count_records(split.train) << " records\n";
  std::cout << "validation " << split.validation.size() << " scenes  "
            << count_records(split.validation) << " records\n";
  std::cout << "test       " << split.test.size() << " scenes  "
            << count_records(split.test) << " records\n";
  std::cout << "wrote " << out_path << "\n";
}

// --- config plumbing shared by train/eval/ablate ------------------------------

harness::ExperimentConfig base_config(const std::string& config_path) {
  harness::ExperimentConfig cfg;
  if (!config_path.empty()) {
    harness::apply_config_json(
        cfg, parse_json_text(read_text_file(config_path), config_path));
  }
  return cfg;
}

DatasetSplit load_split(const harness::ExperimentConfig& cfg) {
  const auto path = cfg.resolved_split_path();
  return split_from_json(parse_json_text(read_text_file(path), path));
}

struct TrainFlags {
  std::string config_path;
  std::string arch;
  std::string mix;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> lr;
  std::optional<double> weight_decay;
  std::optional<double> gamma;
  std::optional<std::string> dataset_dir;
  std::optional<std::string> checkpoint;
  bool augment_on = false, augment_off = false;
  bool oversample_on = false, oversample_off = false;

  void apply(harness::ExperimentConfig& cfg) const {
    if (!arch.empty()) {
      const auto a = models::architecture_from_name(arch);
      check(a.has_value(), "unknown architecture \"", arch, "\"");
      cfg.model.architecture = *a;
    }
    if (!mix.empty()) cfg.train_mix = harness::train_mix_from_name(mix);
    if (seed) cfg.seed = *seed;
    if (epochs) cfg.epochs = *epochs;
    if (batch) cfg.batch_size = *batch;
    if (lr) cfg.optim.lr_from_scratch = *lr;
    if (weight_decay) cfg.optim.weight_decay = *weight_decay;
    if (gamma) cfg.focal_gamma = *gamma;
    if (dataset_dir) cfg.dataset_dir = *dataset_dir;
    if (checkpoint) cfg.checkpoint_path = *checkpoint;
    if (augment_on) cfg.augment = true;
    if (augment_off) cfg.augment = false;
    if (oversample_on) cfg.oversample = true;
    if (oversample_off) cfg.oversample = false;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--arch", f.arch, "model architecture");
  cmd->add_option("--mix", f.mix, "train mix: indoor|outdoor|combined");
  cmd->add_option("--seed", f.seed, "experiment seed");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch", f.batch, "batch size");
  cmd->add_option("--lr", f.lr, "from-scratch learning rate");
  cmd->add_option("--weight-decay", f.weight_decay, "L2 coefficient");
  cmd->add_option("--gamma", f.gamma, "focal loss gamma");
  cmd->add_option("--dataset", f.dataset_dir, "dataset directory");
  cmd->add_flag("--augment", f.augment_on, "enable augmentation");
  cmd->add_flag("--no-augment", f.augment_off, "disable augmentation");
  cmd->add_flag("--oversample", f.oversample_on, "enable turn oversampling");
  cmd->add_flag("--no-oversample", f.oversample_off, "disable turn oversampling");
}

// --- train ------------------------------------------------------------------

void run_train(const TrainFlags& flags) {
  auto cfg = base_config(flags.config_path);
  flags.apply(cfg);
  cfg.validate();

  const auto dataset = load_dataset(cfg.dataset_dir);
  const auto split = load_split(cfg);
  auto model = models::build_model<float>(cfg.model,
                                          hash_mix(cfg.seed, fnv1a("init")));
  std::cout << models::architecture_name(cfg.model.architecture) << ": "
            << model->params().total_values() << " parameters\n";

  const auto result = harness::train_model(*model, dataset, split, cfg, &std::cout);
  std::cout << "best epoch " << result.best_epoch << "  val turn auc_pr "
            << result.best_val_turn_auc_pr << "\n";

  nn::save_checkpoint(model->params(), cfg.checkpoint_path);
  write_text_file(cfg.checkpoint_path + ".json",
                  harness::experiment_to_json(cfg).dump(2) + "\n");
  std::cout << "wrote " << cfg.checkpoint_path << "\n";
}

// --- eval -------------------------------------------------------------------

harness::ExperimentConfig sidecar_config(const std::string& ckpt) {
  const auto sidecar = ckpt + ".json";
  check(std::filesystem::exists(sidecar), "missing config sidecar ", sidecar);
  harness::ExperimentConfig cfg;
  harness::apply_config_json(
      cfg, parse_json_text(read_text_file(sidecar), sidecar));
  return cfg;
}

std::unique_ptr<models::Model<float>> load_model(
    const std::string& ckpt, const harness::ExperimentConfig& cfg) {
  auto model = models::build_model<float>(cfg.model, 0);
  nn::load_checkpoint_into(model->params(), ckpt);
  return model;
}

void run_eval(const std::string& ckpt, const std::string& dataset_dir,
              const std::string& which, const std::string& out_path, int batch) {
  auto cfg = sidecar_config(ckpt);
  if (!dataset_dir.empty()) cfg.dataset_dir = dataset_dir;
  auto model = load_model(ckpt, cfg);

  const auto dataset = load_dataset(cfg.dataset_dir);
  const auto split = load_split(cfg);
  const std::vector<std::string>* ids = nullptr;
  if (which == "train") ids = &split.train;
  else if (which == "validation") ids = &split.validation;
  else if (which == "test") ids = &split.test;
  else fail("unknown split \"", which, "\" (train|validation|test)");
  check(!ids->empty(), "split \"", which, "\" is empty");

  const auto report =
      harness::evaluate(*model, harness::split_scenes(dataset, *ids), batch);
  std::cout << harness::report_table(report);
  if (!report.indoor) std::cout << "note: no indoor scenes in this split\n";
  if (!report.outdoor) std::cout << "note: no outdoor scenes in this split\n";
  if (!out_path.empty()) {
    write_text_file(out_path, harness::report_to_json(report).dump(2) + "\n");
    std::cout << "wrote " << out_path << "\n";
  }
}

// --- infer ------------------------------------------------------------------

void run_infer(const std::string& ckpt, const std::string& dataset_dir,
               const std::string& scene_id, const std::string& out_path,
               bool latency_report, bool no_commands) {
  auto cfg = sidecar_config(ckpt);
  if (!dataset_dir.empty()) cfg.dataset_dir = dataset_dir;
  auto model = load_model(ckpt, cfg);

  const Scene scene = load_scene(cfg.dataset_dir, scene_id);
  runtime::StreamRunner runner(std::move(model), scene.route);
  runtime::CommandGate gate;

  std::ofstream file;
  auto& out = open_out(file, out_path);
  for (const auto& record : scene.records) {
    const auto scores = runner.step(
        scene.frames.frame(static_cast<std::size_t>(record.frame_id)),
        record.gps);
    nlohmann::json j = {{"t", record.t},
                        {"scores",
                         {{"left", scores.left},
                          {"right", scores.right},
                          {"front", scores.front}}}};
    if (!no_commands) {
      if (auto cmd = gate.push(scores)) j["command"] = *cmd;
    }
    out << j.dump() << "\n";
  }
  if (latency_report) {
    const auto s = runner.latency_summary();
    std::cerr << "latency ms over " << s.calls << " calls: p50 " << s.p50_ms
              << "  p95 " << s.p95_ms << "  max " << s.max_ms << "\n";
  }
}

// --- quantize ---------------------------------------------------------------

void run_quantize(const std::string& in, const std::string& out) {
  nn::transcode_checkpoint(in, out, nn::CheckpointDType::kF16);
  const auto sidecar = in + ".json";
  if (std::filesystem::exists(sidecar)) {
    write_text_file(out + ".json", read_text_file(sidecar));
  }
  std::cout << "wrote " << out << " (" << std::filesystem::file_size(in)
            << " -> " << std::filesystem::file_size(out) << " bytes)\n";
}

// --- route ------------------------------------------------------------------

void run_route(const std::string& file, std::optional<double> lat,
               std::optional<double> lng) {
  const auto route = intent::parse_route(read_text_file(file));
  std::cout << route.steps.size() << " steps\n";
  for (std::size_t i = 0; i < route.steps.size(); ++i) {
    const auto& s = route.steps[i];
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%3zu  %-18s (%.6f, %.6f) -> (%.6f, %.6f)\n", i,
                  intent::maneuver_name(s.maneuver), s.start.lat, s.start.lon,
                  s.end.lat, s.end.lon);
    std::cout << buf;
  }
  check(lat.has_value() == lng.has_value(), "--lat and --lng come as a pair");
  if (lat) {
    const GpsFix gps{*lat, *lng};
    const auto step = intent::select_segment(route, gps);
    const auto feature = intent::encode_intent_for_step(route, step, gps);
    nlohmann::json j = {{"segment", step},
                        {"maneuver",
                         intent::maneuver_name(route.steps[step].maneuver)},
                        {"intent", feature}};
    std::cout << j.dump() << "\n";
  }
}

// --- ablate -----------------------------------------------------------------

void run_ablate(const TrainFlags& flags, const std::string& archs_csv,
                const std::string& mixes_csv, bool quantize,
                const std::string& out_path) {
  auto cfg = base_config(flags.config_path);
  flags.apply(cfg);
  cfg.validate();

  harness::AblationOptions opts;
  opts.quantize = quantize;
  if (!archs_csv.empty()) {
    std::istringstream in(archs_csv);
    std::string name;
    while (std::getline(in, name, ',')) {
      const auto a = models::architecture_from_name(name);
      check(a.has_value(), "unknown architecture \"", name, "\"");
      opts.archs.push_back(*a);
    }
  }
  if (!mixes_csv.empty()) {
    std::istringstream in(mixes_csv);
    std::string name;
    while (std::getline(in, name, ',')) {
      opts.mixes.push_back(harness::train_mix_from_name(name));
    }
  }

  const auto dataset = load_dataset(cfg.dataset_dir);
  const auto split = load_split(cfg);
  const auto cells =
      harness::run_ablation(dataset, split, cfg, opts, &std::cout);
  std::cout << harness::ablation_table(cells);
  if (!out_path.empty()) {
    write_text_file(out_path, harness::ablation_to_json(cells).dump(2) + "\n");
    std::cout << "wrote " << out_path << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"synthetic egocentric walk simulation and direction prediction"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "generate synthetic scenes");
  SimulateArgs sim_args;
  simulate->add_option("--out", sim_args.out, "output directory")->required();
  simulate->add_option("--indoor", sim_args.indoor, "indoor scene count");
  simulate->add_option("--outdoor", sim_args.outdoor_count, "outdoor scene count");
  simulate->add_option("--seed", sim_args.seed, "base scene seed");
  simulate->add_option("--duration", sim_args.duration, "walk seconds per scene");
  simulate->add_flag("--noise-free", sim_args.noise_free, "exact sensors");
  simulate->add_option("--heading-sigma", sim_args.heading_sigma,
                       "heading noise, degrees");
  simulate->add_option("--gps-rms", sim_args.gps_rms, "gps noise, meters rms");
  simulate->add_option("--indoor-grid", sim_args.indoor_grid, "indoor grid size");
  simulate->add_option("--outdoor-grid", sim_args.outdoor_grid, "outdoor grid size");
  simulate->callback([&] { run_simulate(sim_args); });

  auto* label = app.add_subcommand("label", "labels from a sensor stream");
  std::string label_sensors, label_script, label_out;
  label->add_option("--sensors", label_sensors, "sensor JSONL")->required();
  label->add_option("--script", label_script, "scene script JSON")->required();
  label->add_option("--out", label_out, "output JSONL (default stdout)");
  label->callback([&] { run_label(label_sensors, label_script, label_out); });

  auto* dataset_cmd = app.add_subcommand("dataset", "scene-disjoint splits");
  std::string ds_dir, ds_out;
  std::uint64_t ds_seed = 1;
  std::array<double, 3> ds_ratios = kDefaultSplitRatios;
  dataset_cmd->add_option("--dir", ds_dir, "scene directory")->required();
  dataset_cmd->add_option("--seed", ds_seed, "split shuffle seed");
  dataset_cmd->add_option("--train-ratio", ds_ratios[0], "train share");
  dataset_cmd->add_option("--validation-ratio", ds_ratios[1], "validation share");
  dataset_cmd->add_option("--test-ratio", ds_ratios[2], "test share");
  dataset_cmd->add_option("--out", ds_out, "split file (default <dir>/split.json)");
  dataset_cmd->callback([&] { run_dataset(ds_dir, ds_seed, ds_ratios, ds_out); });

  auto* train = app.add_subcommand("train", "train a model");
  TrainFlags train_flags;
  add_train_flags(train, train_flags);
  train->add_option("--out", train_flags.checkpoint, "checkpoint path");
  train->callback([&] { run_train(train_flags); });

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ev_ckpt, ev_dataset, ev_split = "test", ev_out;
  int ev_batch = 64;
  eval->add_option("--checkpoint", ev_ckpt, "checkpoint path")->required();
  eval->add_option("--dataset", ev_dataset, "dataset directory override");
  eval->add_option("--split", ev_split, "train|validation|test");
  eval->add_option("--out", ev_out, "report JSON path");
  eval->add_option("--batch", ev_batch, "eval batch size");
  eval->callback([&] { run_eval(ev_ckpt, ev_dataset, ev_split, ev_out, ev_batch); });

  auto* infer = app.add_subcommand("infer", "stream a scene through a model");
  std::string in_ckpt, in_dataset, in_scene, in_out;
  bool in_latency = false, in_no_commands = false;
  infer->add_option("--checkpoint", in_ckpt, "checkpoint path")->required();
  infer->add_option("--dataset", in_dataset, "dataset directory override");
  infer->add_option("--scene", in_scene, "scene id")->required();
  infer->add_option("--out", in_out, "score JSONL (default stdout)");
  infer->add_flag("--latency-report", in_latency, "print p50/p95 latency");
  infer->add_flag("--no-commands", in_no_commands, "scores only");
  infer->callback([&] {
    run_infer(in_ckpt, in_dataset, in_scene, in_out, in_latency, in_no_commands);
  });

  auto* quantize = app.add_subcommand("quantize", "rewrite a checkpoint as f16");
  std::string q_in, q_out;
  quantize->add_option("--in", q_in, "input checkpoint")->required();
  quantize->add_option("--out", q_out, "output checkpoint")->required();
  quantize->callback([&] { run_quantize(q_in, q_out); });

  auto* route = app.add_subcommand("route", "inspect a route file");
  std::string r_file;
  std::optional<double> r_lat, r_lng;
  route->add_option("--file", r_file, "route JSON")->required();
  route->add_option("--lat", r_lat, "query latitude");
  route->add_option("--lng", r_lng, "query longitude");
  route->callback([&] { run_route(r_file, r_lat, r_lng); });

  auto* ablate = app.add_subcommand("ablate", "architecture x mix grid");
  TrainFlags ab_flags;
  add_train_flags(ablate, ab_flags);
  std::string ab_archs, ab_mixes, ab_out;
  bool ab_quantize = false;
  ablate->add_option("--archs", ab_archs, "comma-separated architectures");
  ablate->add_option("--mixes", ab_mixes, "comma-separated train mixes");
  ablate->add_flag("--quantize", ab_quantize, "add binary16 rows");
  ablate->add_option("--out", ab_out, "report JSON path");
  ablate->callback(
      [&] { run_ablate(ab_flags, ab_archs, ab_mixes, ab_quantize, ab_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
}
