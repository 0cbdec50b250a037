#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqs/ed.hpp"
#include "nqs/errors.hpp"
#include "nqs/io.hpp"
#include "nqs/runner.hpp"
#include "nqs/stoq.hpp"

using nlohmann::json;

namespace {

struct CommonOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config (or manifest) file")
      ->required();
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_option("--out", o.out_dir, "override the output directory");
  cmd->add_option("--threads", o.threads, "worker thread budget");
}

nqs::ExperimentConfig load_with_overrides(const CommonOverrides& o) {
  nqs::ExperimentConfig cfg = nqs::load_experiment_config(o.config_path);
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

json stoq_verdict_json(const nqs::StoqVerdict& v) {
  json out;
  out["transformable"] = v.transformable;
  out["rank_degenerate"] = v.rank_degenerate;
  if (v.witness) {
    out["witness"] = {{"permutation", nqs::perm_name(*v.witness)},
                      {"parity_site_flip", v.witness->parity_site_flip}};
  }
  json table = json::array();
  for (const auto& c : v.checked_permutations)
    table.push_back({{"permutation", nqs::perm_name(c.perm)},
                     {"satisfied", c.satisfied},
                     {"parity_site_flip", c.perm.parity_site_flip}});
  out["checked_permutations"] = table;
  return out;
}

int cmd_stoq_check(const std::string& name, const std::vector<double>& params,
                   unsigned n, bool json_only) {
  const auto model = nqs::make_model(name, params, n);
  const auto verdict = nqs::find_stoquastic_transformation(
      model.beta1, model.beta2, model.j1, model.j2);
  if (!json_only) {
    std::printf("model %s, beta1 = (%g, %g, %g), beta2 = (%g, %g, %g), "
                "j1 = %g, j2 = %g\n",
                name.c_str(), model.beta1.bx, model.beta1.by, model.beta1.bz,
                model.beta2.bx, model.beta2.by, model.beta2.bz, model.j1,
                model.j2);
    std::printf("%-12s %-10s %s\n", "permutation", "satisfied", "even-site flip");
    for (const auto& c : verdict.checked_permutations)
      std::printf("%-12s %-10s %s\n", nqs::perm_name(c.perm).c_str(),
                  c.satisfied ? "yes" : "no",
                  c.perm.parity_site_flip ? "yes" : "no");
    if (verdict.transformable)
      std::printf("transformable via %s%s\n",
                  nqs::perm_name(*verdict.witness).c_str(),
                  verdict.witness->parity_site_flip ? " + even-site flip" : "");
    else
      std::printf("not transformable by on-site signed permutations%s\n",
                  verdict.rank_degenerate ? " (rank-degenerate couplings; "
                                            "uniform search only)"
                                          : "");
  }
  std::printf("%s\n", stoq_verdict_json(verdict).dump().c_str());
  return 0;
}

int cmd_ed(const std::string& name, const std::vector<double>& params,
           unsigned n, const std::string& sector_name, double tol,
           const std::string& dump_gs, bool observables,
           const std::vector<double>& d2) {
  const auto model = nqs::make_model(name, params, n);
  const auto sector = nqs::make_sector(sector_name == "jz0"
                                           ? nqs::SectorKind::ZeroMagnetization
                                           : nqs::SectorKind::Full,
                                       n);
  const auto result = nqs::lanczos_ground(model, sector, tol);
  json out;
  out["model"] = {{"name", name}, {"params", params}, {"n_sites", n}};
  out["sector"] = sector_name;
  out["energy"] = result.energy;
  out["energy_per_site"] = result.energy / n;
  out["iterations"] = result.n_iterations;
  out["residual"] = result.residual;
  if (observables) {
    json obs;
    obs["entanglement_entropy_half_cut"] =
        nqs::entanglement_entropy(result, n / 2);
    obs["susceptibility"] = {{"x", nqs::susceptibility(result, 'x')},
                             {"y", nqs::susceptibility(result, 'y')},
                             {"z", nqs::susceptibility(result, 'z')}};
    // Variance-of-total-magnetization susceptibility per site.
    obs["susceptibility_definition"] =
        "(<J_a^2> - <J_a>^2)/N, J_a = sum_i sigma_i^a";
    json corr = json::array();
    for (unsigned k = 0; k <= n / 2; ++k)
      corr.push_back(nqs::correlation(result, 'y', k));
    obs["correlation_yy"] = corr;
    obs["top_1000_mass"] =
        nqs::top_k_mass(result, std::min<std::size_t>(1000, sector.size));
    const auto [es, ea] = nqs::z2_resolved_energies(model, tol);
    obs["z2_symmetric_energy"] = es;
    obs["z2_antisymmetric_energy"] = ea;
    out["observables"] = obs;
  }
  if (!d2.empty()) {
    if (d2.size() != 2 || name.rfind("txyz", 0) != 0)
      throw nqs::ConfigError(
          "--d2 takes theta,h and requires a txyz-family model");
    const auto family = [&](double t) {
      auto p = params;
      p[0] += t;
      p[1] += t;
      return nqs::make_model(name, p, n);
    };
    out["d2_energy"] = nqs::energy_second_derivative(
        family, d2[0], d2[1],
        sector_name == "jz0" ? nqs::SectorKind::ZeroMagnetization
                             : nqs::SectorKind::Full,
        tol);
  }
  if (!dump_gs.empty()) {
    nqs::save_gsvec(result.vector, sector, dump_gs);
    out["gs_vector"] = dump_gs;
  }
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Monte Carlo for spin chains with complex RBM "
               "states: exact diagonalization, SR/ER training, stoquasticity "
               "analysis, and supervised learnability experiments"};
  app.require_subcommand(1);

  // ed
  auto* ed = app.add_subcommand("ed", "exact diagonalization of a chain");
  std::string ed_model = "xxz";
  std::vector<double> ed_params;
  unsigned ed_n = 12;
  std::string ed_sector = "full";
  double ed_tol = 1e-10;
  std::string ed_dump;
  bool ed_obs = false;
  std::vector<double> ed_d2;
  ed->add_option("--model", ed_model, "model name")->required();
  ed->add_option("--params", ed_params, "model parameters")
      ->required()
      ->delimiter(',');
  ed->add_option("--n", ed_n, "number of sites")->required();
  ed->add_option("--sector", ed_sector, "full | jz0")
      ->check(CLI::IsMember({"full", "jz0"}));
  ed->add_option("--tol", ed_tol, "residual tolerance");
  ed->add_option("--dump-gs", ed_dump, "write the ground vector (.gsvec)");
  ed->add_flag("--observables", ed_obs,
               "entropy, susceptibilities, correlations, parity energies");
  ed->add_option("--d2", ed_d2,
                 "theta,h: second derivative of E along (a,b) += t(1,1)")
      ->delimiter(',');

  // stoq-check
  auto* stoq = app.add_subcommand("stoq-check",
                                  "on-site stoquasticity transformation test");
  std::string st_model = "txyz";
  std::vector<double> st_params;
  unsigned st_n = 8;
  bool st_json = false;
  stoq->add_option("--model", st_model, "model name")->required();
  stoq->add_option("--params", st_params, "model parameters")
      ->required()
      ->delimiter(',');
  stoq->add_option("--n", st_n, "number of sites (construction only)");
  stoq->add_flag("--json", st_json, "machine-readable output only");

  // vqmc / sweep / anneal / supervised
  CommonOverrides vq, sw, an, su;
  auto* vqmc = app.add_subcommand("vqmc", "single SR/ER training run");
  add_common(vqmc, vq);
  auto* sweep = app.add_subcommand(
      "sweep", "parameter sweep x instances batch with summary.csv");
  add_common(sweep, sw);
  auto* anneal =
      app.add_subcommand("anneal", "warm-started continuation along a path");
  add_common(anneal, an);
  auto* supervised = app.add_subcommand(
      "supervised", "amplitude/sign learnability experiment");
  add_common(supervised, su);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ed->parsed())
      return cmd_ed(ed_model, ed_params, ed_n, ed_sector, ed_tol, ed_dump,
                    ed_obs, ed_d2);
    if (stoq->parsed())
      return cmd_stoq_check(st_model, st_params, st_n, st_json);
    if (vqmc->parsed()) {
      const auto cfg = load_with_overrides(vq);
      if (cfg.sweep)
        throw nqs::ConfigError(
            "config contains a sweep section; use the sweep subcommand");
      return nqs::run_single(cfg);
    }
    if (sweep->parsed()) return nqs::run_experiment(load_with_overrides(sw));
    if (anneal->parsed()) return nqs::run_anneal(load_with_overrides(an));
    if (supervised->parsed()) {
      nqs::SupervisedConfig cfg = nqs::load_supervised_config(su.config_path);
      if (su.seed) cfg.run.seed = *su.seed;
      if (su.out_dir) cfg.out_dir = *su.out_dir;
      if (su.threads) cfg.threads = *su.threads;
      return nqs::run_supervised_experiment(cfg);
    }
  } catch (const nqs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
