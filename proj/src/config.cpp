#include "nqs/config.hpp"

#include <fstream>

#include "nqs/errors.hpp"

namespace nqs {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

template <typename T>
T require(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key))
    throw ConfigError(ctx + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(ctx + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& ctx, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(ctx + "." + key + ": " + e.what());
  }
}

XyzChainModel parse_model(const json& j) {
  check_keys(j, "model", {"name", "params", "n_sites"});
  const auto name = require<std::string>(j, "model", "name");
  const auto params = require<std::vector<double>>(j, "model", "params");
  const auto n = require<unsigned>(j, "model", "n_sites");
  try {
    return make_model(name, params, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

json model_to_json(const XyzChainModel& m) {
  return json{{"name", m.name}, {"params", m.params}, {"n_sites", m.n_sites}};
}

}  // namespace

std::size_t sweep_parameter_index(const std::string& model_name,
                                  std::size_t arity,
                                  const std::string& parameter) {
  if (parameter.rfind("param", 0) == 0) {
    const std::size_t idx = std::stoul(parameter.substr(5));
    if (idx >= arity)
      throw ConfigError("sweep parameter index out of range: " + parameter);
    return idx;
  }
  if (model_name == "xxz" || model_name == "xxz-sr") {
    if (parameter == "delta") return 0;
  } else if (model_name == "j1j2" || model_name == "j1j2-sr") {
    if (parameter == "j1") return 0;
    if (parameter == "j2") return 1;
  } else if (model_name.rfind("txyz", 0) == 0) {
    if (parameter == "a") return 0;
    if (parameter == "b") return 1;
    if (parameter == "j1") return 2;
    if (parameter == "j2") return 3;
  }
  throw ConfigError("unknown sweep parameter '" + parameter + "' for model '" +
                    model_name + "'");
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  const json& j = doc.contains("config") ? doc.at("config") : doc;
  check_keys(j, "config",
             {"model", "ansatz", "optimizer", "sampler", "reference", "seed",
              "out_dir", "sweep", "anneal", "instances", "threads"});
  ExperimentConfig cfg;
  cfg.run.model = parse_model(
      j.contains("model") ? j.at("model")
                          : throw ConfigError("config: missing 'model'"));

  if (j.contains("ansatz")) {
    const json& a = j.at("ansatz");
    check_keys(a, "ansatz", {"alpha", "sigma"});
    cfg.run.alpha = get_or<unsigned>(a, "ansatz", "alpha", 3);
    cfg.run.sigma = get_or<double>(a, "ansatz", "sigma", 1e-3);
    if (cfg.run.alpha < 1) throw ConfigError("ansatz.alpha must be >= 1");
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "optimizer",
               {"method", "eta", "lambda0", "lambda_decay", "lambda_min",
                "beta1", "beta2", "epochs"});
    const auto method = get_or<std::string>(o, "optimizer", "method", "sr");
    if (method == "sr")
      cfg.run.method = Method::SR;
    else if (method == "er")
      cfg.run.method = Method::ER;
    else
      throw ConfigError("optimizer.method must be 'sr' or 'er'");
    cfg.run.schedule.eta = get_or<double>(o, "optimizer", "eta", 0.02);
    cfg.run.schedule.lambda0 = get_or<double>(o, "optimizer", "lambda0", 1.0);
    cfg.run.schedule.lambda_decay =
        get_or<double>(o, "optimizer", "lambda_decay", 0.9);
    cfg.run.schedule.lambda_min =
        get_or<double>(o, "optimizer", "lambda_min", 1e-3);
    cfg.run.schedule.beta1 = get_or<double>(o, "optimizer", "beta1", 0.0);
    cfg.run.schedule.beta2 = get_or<double>(o, "optimizer", "beta2", 0.0);
    cfg.run.schedule.epochs = get_or<unsigned>(o, "optimizer", "epochs", 2500);
    if (!(cfg.run.schedule.eta > 0.0))
      throw ConfigError("optimizer.eta must be positive");
    if (!(cfg.run.schedule.lambda_min > 0.0))
      throw ConfigError("optimizer.lambda_min must be positive");
    if (cfg.run.schedule.beta1 < 0.0 || cfg.run.schedule.beta1 >= 1.0 ||
        cfg.run.schedule.beta2 < 0.0 || cfg.run.schedule.beta2 >= 1.0)
      throw ConfigError("optimizer momenta must lie in [0, 1)");
  }

  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    check_keys(s, "sampler",
               {"kind", "update", "chains", "sweeps_between", "burn_in",
                "samples_multiplier"});
    const auto kind = get_or<std::string>(s, "sampler", "kind", "mcmc");
    if (kind == "mcmc")
      cfg.run.sampler.kind = SamplerSettings::Kind::Mcmc;
    else if (kind == "exact")
      cfg.run.sampler.kind = SamplerSettings::Kind::Exact;
    else
      throw ConfigError("sampler.kind must be 'mcmc' or 'exact'");
    const auto update = get_or<std::string>(s, "sampler", "update", "exchange");
    if (update == "flip")
      cfg.run.sampler.update = UpdateRule::SingleFlip;
    else if (update == "exchange")
      cfg.run.sampler.update = UpdateRule::Exchange;
    else
      throw ConfigError("sampler.update must be 'flip' or 'exchange'");
    cfg.run.sampler.chains = get_or<unsigned>(s, "sampler", "chains", 16);
    cfg.run.sampler.sweeps_between =
        get_or<unsigned>(s, "sampler", "sweeps_between", 1);
    cfg.run.sampler.burn_in = get_or<unsigned>(s, "sampler", "burn_in", 1000);
    cfg.run.sampler.samples_multiplier =
        get_or<double>(s, "sampler", "samples_multiplier", 1.0);
  }

  if (j.contains("reference")) {
    const json& r = j.at("reference");
    check_keys(r, "reference", {"ed"});
    cfg.run.ed_reference = get_or<bool>(r, "reference", "ed", true);
  }

  cfg.run.seed = require<std::uint64_t>(j, "config", "seed");
  cfg.out_dir = require<std::string>(j, "config", "out_dir");
  cfg.instances = get_or<unsigned>(j, "config", "instances", 12);
  cfg.threads = get_or<unsigned>(j, "config", "threads", 0);
  if (cfg.instances < 1) throw ConfigError("instances must be >= 1");

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"parameter", "values"});
    SweepSpec spec;
    spec.parameter = require<std::string>(s, "sweep", "parameter");
    spec.values = require<std::vector<double>>(s, "sweep", "values");
    if (spec.values.empty()) throw ConfigError("sweep.values is empty");
    // Validate the parameter name against the model now.
    sweep_parameter_index(cfg.run.model.name, cfg.run.model.params.size(),
                          spec.parameter);
    cfg.sweep = std::move(spec);
  }

  if (j.contains("anneal")) {
    const json& a = j.at("anneal");
    check_keys(a, "anneal", {"path", "epochs_per_step", "start_checkpoint"});
    AnnealSpec spec;
    spec.path = require<std::vector<std::vector<double>>>(a, "anneal", "path");
    if (spec.path.empty()) throw ConfigError("anneal.path is empty");
    for (const auto& point : spec.path)
      if (point.size() != cfg.run.model.params.size())
        throw ConfigError("anneal.path points must match the model arity");
    spec.epochs_per_step = get_or<unsigned>(a, "anneal", "epochs_per_step", 200);
    spec.start_checkpoint =
        get_or<std::string>(a, "anneal", "start_checkpoint", "");
    cfg.anneal = std::move(spec);
  }
  return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = model_to_json(cfg.run.model);
  j["ansatz"] = {{"alpha", cfg.run.alpha}, {"sigma", cfg.run.sigma}};
  j["optimizer"] = {{"method", cfg.run.method == Method::SR ? "sr" : "er"},
                    {"eta", cfg.run.schedule.eta},
                    {"lambda0", cfg.run.schedule.lambda0},
                    {"lambda_decay", cfg.run.schedule.lambda_decay},
                    {"lambda_min", cfg.run.schedule.lambda_min},
                    {"beta1", cfg.run.schedule.beta1},
                    {"beta2", cfg.run.schedule.beta2},
                    {"epochs", cfg.run.schedule.epochs}};
  j["sampler"] = {
      {"kind",
       cfg.run.sampler.kind == SamplerSettings::Kind::Mcmc ? "mcmc" : "exact"},
      {"update",
       cfg.run.sampler.update == UpdateRule::SingleFlip ? "flip" : "exchange"},
      {"chains", cfg.run.sampler.chains},
      {"sweeps_between", cfg.run.sampler.sweeps_between},
      {"burn_in", cfg.run.sampler.burn_in},
      {"samples_multiplier", cfg.run.sampler.samples_multiplier}};
  j["reference"] = {{"ed", cfg.run.ed_reference}};
  j["seed"] = cfg.run.seed;
  j["out_dir"] = cfg.out_dir;
  j["instances"] = cfg.instances;
  j["threads"] = cfg.threads;
  if (cfg.sweep)
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"values", cfg.sweep->values}};
  if (cfg.anneal) {
    j["anneal"] = {{"path", cfg.anneal->path},
                   {"epochs_per_step", cfg.anneal->epochs_per_step}};
    if (!cfg.anneal->start_checkpoint.empty())
      j["anneal"]["start_checkpoint"] = cfg.anneal->start_checkpoint;
  }
  return j;
}

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(load_json_file(path));
}

SupervisedConfig parse_supervised_config(const nlohmann::json& doc) {
  const json& j = doc.contains("config") ? doc.at("config") : doc;
  check_keys(j, "config",
             {"model", "network", "kind", "sign_rule", "optimizer",
              "eval_every", "seed", "out_dir", "threads"});
  SupervisedConfig cfg;
  cfg.run.model = parse_model(
      j.contains("model") ? j.at("model")
                          : throw ConfigError("config: missing 'model'"));
  if (j.contains("network")) {
    const json& n = j.at("network");
    check_keys(n, "network", {"width"});
    cfg.run.width = get_or<unsigned>(n, "network", "width", 16);
  }
  const auto kind = require<std::string>(j, "config", "kind");
  if (kind == "amplitude") {
    cfg.run.kind = ReconstructionKind::Amplitude;
    cfg.run.eta = 1e-4;
    cfg.run.minibatch = 1024;
  } else if (kind == "sign") {
    cfg.run.kind = ReconstructionKind::Sign;
    cfg.run.eta = 2.5e-5;
    cfg.run.minibatch = 32;
  } else {
    throw ConfigError("kind must be 'amplitude' or 'sign'");
  }
  cfg.run.sign_rule = get_or<bool>(j, "config", "sign_rule", false);
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "optimizer",
               {"eta", "beta1", "beta2", "lambda", "epochs", "minibatch"});
    cfg.run.eta = get_or<double>(o, "optimizer", "eta", cfg.run.eta);
    cfg.run.beta1 = get_or<double>(o, "optimizer", "beta1", cfg.run.beta1);
    cfg.run.beta2 = get_or<double>(o, "optimizer", "beta2", cfg.run.beta2);
    cfg.run.lambda = get_or<double>(o, "optimizer", "lambda", cfg.run.lambda);
    cfg.run.epochs = get_or<unsigned>(o, "optimizer", "epochs", cfg.run.epochs);
    cfg.run.minibatch =
        get_or<std::size_t>(o, "optimizer", "minibatch", cfg.run.minibatch);
  }
  cfg.run.eval_every = get_or<unsigned>(j, "config", "eval_every", 50);
  cfg.run.seed = require<std::uint64_t>(j, "config", "seed");
  cfg.out_dir = require<std::string>(j, "config", "out_dir");
  cfg.threads = get_or<unsigned>(j, "config", "threads", 0);
  return cfg;
}

nlohmann::json supervised_config_to_json(const SupervisedConfig& cfg) {
  json j;
  j["model"] = model_to_json(cfg.run.model);
  j["network"] = {{"width", cfg.run.width}};
  j["kind"] =
      cfg.run.kind == ReconstructionKind::Amplitude ? "amplitude" : "sign";
  j["sign_rule"] = cfg.run.sign_rule;
  j["optimizer"] = {{"eta", cfg.run.eta},       {"beta1", cfg.run.beta1},
                    {"beta2", cfg.run.beta2},   {"lambda", cfg.run.lambda},
                    {"epochs", cfg.run.epochs}, {"minibatch", cfg.run.minibatch}};
  j["eval_every"] = cfg.run.eval_every;
  j["seed"] = cfg.run.seed;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  return j;
}

SupervisedConfig load_supervised_config(const std::string& path) {
  return parse_supervised_config(load_json_file(path));
}

}  // namespace nqs
