#include "nqs/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nqs/ed.hpp"
#include "nqs/errors.hpp"
#include "nqs/io.hpp"
#include "nqs/kernels.hpp"
#include "nqs/parallel.hpp"

namespace nqs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

json manifest_skeleton(const json& config, std::uint64_t seed,
                       unsigned threads) {
  json m;
  m["format"] = 1;
  m["csv_schema"] = 1;
  m["tool"] = {{"name", "nqsvmc"}, {"version", kToolVersion}};
  m["isa"] = kernels::isa_name(kernels::active_isa());
  m["threads"] = threads;
  m["seed"] = seed;
  m["config"] = config;
  m["chain_streams"] =
      "chain i (1-based) -> CounterRng stream (seed, i); swap stream "
      "(seed, 0x5afe); init stream (seed, 0x1417); exact sampler "
      "(seed, 0xe5ac7)";
  return m;
}

void write_manifest(const json& m, const fs::path& path) {
  std::ofstream out(path);
  out << m.dump(2) << "\n";
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t point,
                            unsigned instance) {
  return CounterRng::mix64(
      CounterRng::mix64(base + 0x9E3779B97F4A7C15ULL * (point + 1)) +
      instance);
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void add_artifact(json& manifest, const fs::path& root, const fs::path& file) {
  manifest["artifacts"][fs::relative(file, root).string()] =
      fnv1a_file(file.string());
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  set_max_threads(cfg.threads);
  fs::create_directories(cfg.out_dir);
  const fs::path root(cfg.out_dir);

  std::vector<std::vector<double>> points;
  std::vector<double> point_values;
  std::vector<std::string> point_labels;
  if (cfg.sweep) {
    const std::size_t idx = sweep_parameter_index(
        cfg.run.model.name, cfg.run.model.params.size(), cfg.sweep->parameter);
    for (double v : cfg.sweep->values) {
      auto params = cfg.run.model.params;
      params[idx] = v;
      points.push_back(std::move(params));
      point_values.push_back(v);
      point_labels.push_back(cfg.sweep->parameter + "=" + format_double(v));
    }
  } else {
    points.push_back(cfg.run.model.params);
    point_values.push_back(0.0);
    point_labels.push_back("run");
  }

  // One diagonalization per sweep point, shared across the instances.
  std::vector<double> references(points.size(),
                                 std::numeric_limits<double>::quiet_NaN());
  if (cfg.run.ed_reference) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      TrainingRun probe = cfg.run;
      probe.model =
          make_model(cfg.run.model.name, points[p], cfg.run.model.n_sites);
      references[p] =
          lanczos_ground(probe.model, training_sector(probe)).energy;
    }
  }

  const std::size_t n_tasks = points.size() * cfg.instances;
  std::vector<SummaryRow> rows(n_tasks);
  std::vector<std::string> errors(n_tasks);
  std::vector<fs::path> artifacts(2 * n_tasks);

  parallel_blocks(n_tasks, [&](std::size_t t) {
    const std::size_t p = t / cfg.instances;
    const unsigned inst = static_cast<unsigned>(t % cfg.instances);
    const fs::path dir = root / point_labels[p] / std::to_string(inst);
    fs::create_directories(dir);
    TrainingRun run = cfg.run;
    run.model =
        make_model(cfg.run.model.name, points[p], cfg.run.model.n_sites);
    run.seed = instance_seed(cfg.run.seed, p, inst);
    run.reference_energy = references[p];
    run.checkpoint_dir = dir.string();
    SummaryRow row;
    row.sweep_value = point_values[p];
    row.instance = inst;
    Stopwatch watch;
    try {
      const TrainingResult result = run_training(run);
      write_curve_csv(result.curve, (dir / "curve.csv").string());
      save_rbm(result.params, (dir / "final.rbm").string());
      row.final_norm_energy = result.curve.back().norm_energy;
      row.epochs = static_cast<unsigned>(result.curve.size());
      artifacts[2 * t] = dir / "curve.csv";
      artifacts[2 * t + 1] = dir / "final.rbm";
    } catch (const std::exception& e) {
      errors[t] = e.what();
      row.final_norm_energy = std::numeric_limits<double>::quiet_NaN();
      row.epochs = 0;
    }
    row.wall_time = watch.seconds();
    rows[t] = row;
  });

  write_summary_csv(rows, (root / "summary.csv").string());

  json manifest = manifest_skeleton(experiment_config_to_json(cfg),
                                    cfg.run.seed, max_threads());
  for (std::size_t p = 0; p < points.size(); ++p)
    for (unsigned i = 0; i < cfg.instances; ++i)
      manifest["seeds"][point_labels[p] + "/" + std::to_string(i)] =
          instance_seed(cfg.run.seed, p, i);
  add_artifact(manifest, root, root / "summary.csv");
  for (const auto& a : artifacts)
    if (!a.empty()) add_artifact(manifest, root, a);
  bool any_failed = false;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (errors[t].empty()) continue;
    any_failed = true;
    manifest["failures"][std::to_string(t)] = errors[t];
  }
  write_manifest(manifest, root / "manifest.json");
  return any_failed ? 1 : 0;
}

int run_single(const ExperimentConfig& cfg) {
  set_max_threads(cfg.threads);
  fs::create_directories(cfg.out_dir);
  const fs::path root(cfg.out_dir);
  TrainingRun run = cfg.run;
  run.checkpoint_dir = cfg.out_dir;
  const TrainingResult result = run_training(run);
  write_curve_csv(result.curve, (root / "curve.csv").string());
  save_rbm(result.params, (root / "final.rbm").string());
  json manifest = manifest_skeleton(experiment_config_to_json(cfg),
                                    cfg.run.seed, max_threads());
  if (std::isfinite(result.reference_energy))
    manifest["reference_energy"] = result.reference_energy;
  add_artifact(manifest, root, root / "curve.csv");
  add_artifact(manifest, root, root / "final.rbm");
  write_manifest(manifest, root / "manifest.json");
  std::printf("final energy %s (normalized %s) after %zu epochs\n",
              format_double(result.curve.back().energy.real()).c_str(),
              format_double(result.curve.back().norm_energy).c_str(),
              result.curve.size());
  return 0;
}

int run_anneal(const ExperimentConfig& cfg) {
  if (!cfg.anneal)
    throw ConfigError("anneal subcommand requires an 'anneal' section");
  set_max_threads(cfg.threads);
  fs::create_directories(cfg.out_dir);
  const fs::path root(cfg.out_dir);
  const AnnealSpec& spec = *cfg.anneal;

  RbmParameters start;
  LearningCurve full_curve;
  std::vector<AnnealPoint> rows;
  std::vector<std::vector<double>> path = spec.path;

  if (!spec.start_checkpoint.empty()) {
    start = load_rbm(spec.start_checkpoint);
  } else {
    // Converge at the first path point, then continue along the rest.
    TrainingRun warm = cfg.run;
    warm.model =
        make_model(cfg.run.model.name, path.front(), cfg.run.model.n_sites);
    const TrainingResult r = run_training(warm);
    start = r.params;
    full_curve = r.curve;
    AnnealPoint p0;
    p0.model_params = path.front();
    p0.energy = r.curve.back().energy.real();
    p0.norm_energy = r.curve.back().norm_energy;
    rows.push_back(p0);
    path.erase(path.begin());
  }

  RbmParameters final_params = start;
  if (!path.empty()) {
    const AnnealResult res =
        anneal(cfg.run, start, path, spec.epochs_per_step);
    const unsigned offset = static_cast<unsigned>(full_curve.size());
    for (EpochRecord rec : res.curve) {
      rec.epoch += offset;
      full_curve.push_back(rec);
    }
    for (const auto& p : res.points) rows.push_back(p);
    final_params = res.params;
  }

  // anneal.csv: step, param columns, energy, normalized energy.
  {
    std::FILE* f = std::fopen((root / "anneal.csv").string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot write anneal.csv");
    std::fprintf(f, "step");
    for (std::size_t k = 0; k < cfg.run.model.params.size(); ++k)
      std::fprintf(f, ",param%zu", k);
    std::fprintf(f, ",energy,norm_energy\n");
    for (std::size_t s = 0; s < rows.size(); ++s) {
      std::fprintf(f, "%zu", s);
      for (double v : rows[s].model_params)
        std::fprintf(f, ",%s", format_double(v).c_str());
      std::fprintf(f, ",%s,%s\n", format_double(rows[s].energy).c_str(),
                   format_double(rows[s].norm_energy).c_str());
    }
    std::fclose(f);
  }
  write_curve_csv(full_curve, (root / "curve.csv").string());
  save_rbm(final_params, (root / "final.rbm").string());
  json manifest = manifest_skeleton(experiment_config_to_json(cfg),
                                    cfg.run.seed, max_threads());
  add_artifact(manifest, root, root / "anneal.csv");
  add_artifact(manifest, root, root / "curve.csv");
  add_artifact(manifest, root, root / "final.rbm");
  write_manifest(manifest, root / "manifest.json");
  return 0;
}

int run_supervised_experiment(const SupervisedConfig& cfg) {
  set_max_threads(cfg.threads);
  fs::create_directories(cfg.out_dir);
  const fs::path root(cfg.out_dir);
  const SupervisedResult result = run_supervised(cfg.run);
  {
    std::FILE* f =
        std::fopen((root / "infidelity.csv").string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot write infidelity.csv");
    std::fprintf(f, "epoch,loss,infidelity\n");
    for (const auto& p : result.curve)
      std::fprintf(f, "%u,%s,%s\n", p.epoch, format_double(p.loss).c_str(),
                   format_double(p.infidelity).c_str());
    std::fclose(f);
  }
  save_convnet(result.params, (root / "final.cnet").string());
  json manifest = manifest_skeleton(supervised_config_to_json(cfg),
                                    cfg.run.seed, max_threads());
  manifest["ground_energy"] = result.ground_energy;
  manifest["final_infidelity"] = result.final_infidelity;
  add_artifact(manifest, root, root / "infidelity.csv");
  add_artifact(manifest, root, root / "final.cnet");
  write_manifest(manifest, root / "manifest.json");
  std::printf("final infidelity %s\n",
              format_double(result.final_infidelity).c_str());
  return 0;
}

}  // namespace nqs
