#include <cstdlib>
#include <iostream>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "socmc/runner.hpp"

namespace {

struct FitFlags {
  std::string config_path;
  std::optional<std::string> model, table, prior_set, data, schedule, out_dir, select;
  std::optional<int> min_obs, lfo_j2;
  std::optional<int> iterations, burn_in, thin, n_particles, n_chains, checkpoint_every;
  std::optional<double> tau, init_scale, accept_target, kappa;
  std::optional<std::uint64_t> seed;
  bool no_trajectories = false;
  bool all_channels_in_pf = false;
  bool no_adapt = false;
};

void add_run_options(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config or run manifest");
  cmd->add_option("--model", f.model,
                  "three-pool | three-pool-biok | five-pool | five-pool-biok");
  cmd->add_option("--table", f.table, "input table: tarlee | brigalow | rothamsted");
  cmd->add_option("--prior-set", f.prior_set, "tarlee | brigalow | broadbalk");
  cmd->add_option("--data", f.data, "observation CSV (field,year,channel,value)");
  cmd->add_option("--schedule", f.schedule, "schedule CSV (field,year,treatment)");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--select", f.select, "model selection: none | waic | lfo-cv");
  cmd->add_option("--min-obs", f.min_obs, "lfo-cv: observed years conditioned on first");
  cmd->add_option("--lfo-j2", f.lfo_j2, "lfo-cv: particles per predictive draw");
  cmd->add_option("--iterations", f.iterations, "MCMC iterations per chain");
  cmd->add_option("--burn-in", f.burn_in, "burn-in iterations");
  cmd->add_option("--thin", f.thin, "retention stride");
  cmd->add_option("--tau", f.tau, "noise-stream autocorrelation in [0,1)");
  cmd->add_option("--particles", f.n_particles, "particles per filter");
  cmd->add_option("--chains", f.n_chains, "number of chains");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--init-scale", f.init_scale, "initial proposal scale");
  cmd->add_option("--accept-target", f.accept_target, "burn-in acceptance target");
  cmd->add_option("--checkpoint-every", f.checkpoint_every, "checkpoint stride (iterations)");
  cmd->add_option("--kappa", f.kappa, "microbial carrying capacity fraction");
  cmd->add_flag("--no-trajectories", f.no_trajectories, "skip latent-trajectory retention");
  cmd->add_flag("--all-channels-in-pf", f.all_channels_in_pf,
                "weight plant channels inside the particle filter (cross-check mode)");
  cmd->add_flag("--no-adapt", f.no_adapt, "freeze the proposal scale");
}

socmc::RunConfig resolve(const FitFlags& f) {
  socmc::RunConfig rc;
  if (!f.config_path.empty()) rc = socmc::load_run_config(f.config_path);
  if (f.model) rc.model = *f.model;
  if (f.table) rc.table = *f.table;
  if (f.prior_set) rc.prior_set = *f.prior_set;
  if (f.data) rc.data_path = *f.data;
  if (f.schedule) rc.schedule_path = *f.schedule;
  if (f.out_dir) rc.out_dir = *f.out_dir;
  if (f.select) rc.select = *f.select;
  if (f.min_obs) rc.min_obs = *f.min_obs;
  if (f.lfo_j2) rc.lfo_j2 = *f.lfo_j2;
  if (f.iterations) rc.sampler.iterations = *f.iterations;
  if (f.burn_in) rc.sampler.burn_in = *f.burn_in;
  if (f.thin) rc.sampler.thin = *f.thin;
  if (f.tau) rc.sampler.tau = *f.tau;
  if (f.n_particles) rc.sampler.n_particles = *f.n_particles;
  if (f.n_chains) rc.sampler.n_chains = *f.n_chains;
  if (f.seed) rc.sampler.seed = *f.seed;
  if (f.init_scale) rc.sampler.init_scale = *f.init_scale;
  if (f.accept_target) rc.sampler.accept_target = *f.accept_target;
  if (f.checkpoint_every) rc.sampler.checkpoint_every = *f.checkpoint_every;
  if (f.kappa) rc.kappa = *f.kappa;
  if (f.no_trajectories) rc.store_trajectories = false;
  if (f.all_channels_in_pf) rc.all_channels_in_pf = true;
  if (f.no_adapt) rc.sampler.adapt = false;
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* th = std::getenv("SOCMC_THREADS")) {
    const int n = std::atoi(th);
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
  }

  CLI::App app{"state-space SOC model fitting, selection and simulation"};
  app.require_subcommand(1);

  FitFlags fit_flags, select_flags, diagnose_flags, report_flags;
  CLI::App* fit = app.add_subcommand("fit", "run the sampler and write all artifacts");
  add_run_options(fit, fit_flags);
  CLI::App* select =
      app.add_subcommand("select", "fit plus a required model-selection metric");
  add_run_options(select, select_flags);
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "recompute convergence diagnostics from checkpoints");
  add_run_options(diagnose, diagnose_flags);
  CLI::App* report =
      app.add_subcommand("report", "re-emit report CSVs from checkpoints (no new sampling)");
  add_run_options(report, report_flags);

  socmc::SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("--model", sim.model, "model variant");
  simulate->add_option("--table", sim.table, "input table");
  simulate->add_option("--prior-set", sim.prior_set, "prior set for the generating draw");
  simulate->add_option("--fields", sim.n_fields, "number of fields");
  simulate->add_option("--year0", sim.year0, "initial-state year");
  simulate->add_option("--years", sim.n_years, "horizon (years incl. the initial one)");
  simulate->add_option("--seed", sim.seed, "seed");
  simulate->add_option("--sparsity", sim.obs_sparsity, "per-year observation probability");
  simulate->add_option("--kappa", sim.kappa, "microbial carrying capacity fraction");
  simulate->add_option("--out", sim.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) socmc::run_fit(resolve(fit_flags));
    if (select->parsed()) {
      const socmc::RunConfig rc = resolve(select_flags);
      if (rc.select == "none")
        throw socmc::ConfigError("select needs --select waic or --select lfo-cv");
      socmc::run_fit(rc);
    }
    if (diagnose->parsed()) socmc::run_diagnose(resolve(diagnose_flags));
    if (report->parsed()) socmc::run_report(resolve(report_flags));
    if (simulate->parsed()) socmc::run_simulate(sim);
  } catch (const socmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const socmc::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const socmc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
