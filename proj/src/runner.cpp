#include "socmc/runner.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "socmc/diagnostics.hpp"
#include "socmc/selection.hpp"
#include "socmc/simulate.hpp"
#include "socmc/soc_target.hpp"

namespace socmc {

namespace fs = std::filesystem;

namespace {
struct LoadedRun {
  SocModelSpec spec;
  ManagementSchedule sched;
  Dataset data;
  std::unique_ptr<SocTarget> target;
};

LoadedRun load(const RunConfig& rc) {
  if (rc.data_path.empty() || rc.schedule_path.empty())
    throw ConfigError("a run needs both a dataset and a schedule file");
  LoadedRun lr;
  lr.spec = rc.model_spec();
  lr.sched = read_schedule_csv(rc.schedule_path);
  lr.data = read_dataset_csv(rc.data_path, lr.sched);
  SocTargetOptions opt;
  opt.all_channels_in_pf = rc.all_channels_in_pf;
  lr.target = std::make_unique<SocTarget>(lr.spec, lr.data, lr.sched, rc.priors(),
                                          rc.prior_overrides, opt);
  return lr;
}

SamplerConfig chain_config(const RunConfig& rc) {
  SamplerConfig cfg = rc.sampler;
  cfg.checkpoint_path = (fs::path(rc.out_dir) / "chains" / "chain").string();
  cfg.store_trajectories = rc.store_trajectories;
  return cfg;
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

void write_posterior_csv(const fs::path& p, const std::vector<ChainOutput>& chains,
                         const ParamSpace& space) {
  std::ofstream os = open_csv(p);
  os << "chain,draw,loglik";
  for (const auto& d : space.defs()) os << ',' << d.name;
  os << '\n';
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t i = 0; i < chains[c].draws.size(); ++i) {
      const Draw& dr = chains[c].draws[i];
      os << (c + 1) << ',' << i << ',' << fmt17(dr.loglik);
      for (int j = 0; j < space.size(); ++j)
        os << ',' << fmt17(space.defs()[j].tf.to_natural(dr.z[j]));
      os << '\n';
    }
}

void write_rhat_csv(const fs::path& p, const std::vector<ChainOutput>& chains,
                    const ParamSpace& space) {
  const std::vector<RhatRow> rows = rhat_report(chains, space);
  std::ofstream os = open_csv(p);
  os << "parameter,rhat,rhat_upper,rhat_natural,rhat_natural_upper\n";
  for (const RhatRow& r : rows)
    os << r.name << ',' << fmt17(r.z.rhat) << ',' << fmt17(r.z.upper) << ','
       << fmt17(r.natural.rhat) << ',' << fmt17(r.natural.upper) << '\n';
}

void write_quantiles_csv(const fs::path& p, const std::vector<ChainOutput>& chains,
                         const TrajectoryMeta& meta) {
  std::vector<int> all(meta.components.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = int(c);
  const QuantileTrajectories qt = quantile_trajectories(chains, meta, all);
  std::ofstream os = open_csv(p);
  os << "field,year";
  for (double l : qt.levels) os << ",q" << l;
  os << '\n';
  for (int f = 0; f < meta.n_fields; ++f)
    for (int t = 0; t < meta.n_years; ++t) {
      os << (f + 1) << ',' << (meta.year0 + t);
      for (std::size_t l = 0; l < qt.levels.size(); ++l) os << ',' << fmt17(qt.at(f, t, int(l)));
      os << '\n';
    }
}

void write_waic_csv(const fs::path& p, const WaicResult& w) {
  std::ofstream os = open_csv(p);
  os << "chain,lppd,p_waic,waic\n";
  for (std::size_t c = 0; c < w.per_chain.size(); ++c)
    os << (c + 1) << ',' << fmt17(w.per_chain[c].lppd) << ',' << fmt17(w.per_chain[c].p_waic)
       << ',' << fmt17(w.per_chain[c].waic) << '\n';
  os << "pooled," << fmt17(w.pooled.lppd) << ',' << fmt17(w.pooled.p_waic) << ','
     << fmt17(w.pooled.waic) << '\n';
}

void write_elpd_csv(const fs::path& p, const ElpdResult& e) {
  std::ofstream os = open_csv(p);
  os << "row,k,year,chain,value\n";
  for (const ElpdStep& s : e.steps) {
    os << "step," << s.k << ',' << s.year << ",pooled," << fmt17(s.log_pred) << '\n';
    for (std::size_t c = 0; c < s.per_chain.size(); ++c)
      os << "step," << s.k << ',' << s.year << ',' << (c + 1) << ',' << fmt17(s.per_chain[c])
         << '\n';
    os << "step_rhat," << s.k << ',' << s.year << ",," << fmt17(s.max_rhat) << '\n';
  }
  os << "total,,,pooled," << fmt17(e.total) << '\n';
  for (std::size_t c = 0; c < e.per_chain_total.size(); ++c)
    os << "total,,," << (c + 1) << ',' << fmt17(e.per_chain_total[c]) << '\n';
  os << "mean,,,," << fmt17(e.mean) << '\n';
  os << "sd,,,," << fmt17(e.sd) << '\n';
  os << "converged,,,," << (e.converged ? 1 : 0) << '\n';
}

void run_selection(const RunConfig& rc, const LoadedRun& lr,
                   const std::vector<ChainOutput>& chains) {
  if (rc.select == "none") return;
  if (rc.select == "waic") {
    write_waic_csv(fs::path(rc.out_dir) / "waic.csv", waic(chains));
    return;
  }
  if (rc.select == "lfo-cv") {
    LfoConfig lc;
    lc.first_k = rc.min_obs;
    lc.j2 = rc.lfo_j2;
    lc.sampler = rc.sampler;
    lc.sampler.checkpoint_path = (fs::path(rc.out_dir) / "chains" / "lfo").string();
    write_elpd_csv(fs::path(rc.out_dir) / "elpd.csv", lfo_cv(*lr.target, lc));
    return;
  }
  throw ConfigError("unknown selection method '" + rc.select + "' (none|waic|lfo-cv)");
}
}  // namespace

void run_fit(const RunConfig& rc) {
  const LoadedRun lr = load(rc);
  fs::create_directories(fs::path(rc.out_dir) / "chains");

  const std::vector<ChainOutput> chains = run_chains(*lr.target, chain_config(rc));
  write_posterior_csv(fs::path(rc.out_dir) / "posterior_theta.csv", chains,
                      lr.target->param_space());
  if (chains.size() >= 2)
    write_rhat_csv(fs::path(rc.out_dir) / "rhat.csv", chains, lr.target->param_space());
  if (rc.store_trajectories)
    write_quantiles_csv(fs::path(rc.out_dir) / "trajectories_quantiles.csv", chains,
                        lr.target->trajectory_meta());
  run_selection(rc, lr, chains);
  write_manifest((fs::path(rc.out_dir) / "run_manifest.json").string(), rc);
}

void run_diagnose(const RunConfig& rc) {
  const LoadedRun lr = load(rc);
  fs::create_directories(fs::path(rc.out_dir) / "chains");
  const std::vector<ChainOutput> chains = run_chains(*lr.target, chain_config(rc));
  if (chains.size() < 2)
    throw ConfigError("convergence diagnostics need at least 2 chains");
  write_rhat_csv(fs::path(rc.out_dir) / "rhat.csv", chains, lr.target->param_space());
}

void run_report(const RunConfig& rc) {
  const LoadedRun lr = load(rc);
  fs::create_directories(fs::path(rc.out_dir) / "chains");
  const std::vector<ChainOutput> chains = run_chains(*lr.target, chain_config(rc));
  write_posterior_csv(fs::path(rc.out_dir) / "posterior_theta.csv", chains,
                      lr.target->param_space());
  if (chains.size() >= 2)
    write_rhat_csv(fs::path(rc.out_dir) / "rhat.csv", chains, lr.target->param_space());
  if (rc.store_trajectories)
    write_quantiles_csv(fs::path(rc.out_dir) / "trajectories_quantiles.csv", chains,
                        lr.target->trajectory_meta());
  if (rc.select == "waic")
    write_waic_csv(fs::path(rc.out_dir) / "waic.csv", waic(chains));
}

void run_simulate(const SimulateArgs& args) {
  if (args.n_years < 2) throw ConfigError("simulation horizon must span at least 2 years");
  if (args.n_fields < 1) throw ConfigError("need at least one field");
  SocModelSpec spec;
  spec.variant = variant_from_string(args.model);
  spec.table = input_table_from_string(args.table);
  spec.kappa = args.kappa;
  const PriorSet pset =
      prior_set_from_string(args.prior_set.empty() ? args.table : args.prior_set);

  const ManagementSchedule sched =
      rotation_schedule(spec.table, args.n_fields, args.year0 + 1, args.n_years - 1);

  // parameter space via a frame-only (observation-free) fitting problem
  const Dataset frame = Dataset::empty(args.n_fields, args.year0, args.n_years);
  const SocTarget shell(spec, frame, sched, pset);
  const ParamSpace& space = shell.param_space();

  SimulateOptions opt;
  opt.obs_sparsity = args.obs_sparsity;

  SyntheticData truth;
  bool done = false;
  for (std::uint64_t attempt = 0; attempt < 50 && !done; ++attempt) {
    DetRng rng(derive_seed(args.seed, 0x100 + attempt));
    const ParameterVector th = space.natural(space.sample_z(rng));
    try {
      truth = generate_synthetic(spec, th, sched, args.n_years,
                                 derive_seed(args.seed, 0x200 + attempt), opt);
      done = true;
    } catch (const NumericalError&) {
      // a degenerate trajectory under this prior draw; take the next one
    }
  }
  if (!done)
    throw NumericalError("simulation degenerated for 50 consecutive prior draws");

  fs::create_directories(args.out_dir);
  write_dataset_csv((fs::path(args.out_dir) / "dataset.csv").string(), truth.data);
  write_schedule_csv((fs::path(args.out_dir) / "schedule.csv").string(), sched);

  {
    std::ofstream os = open_csv(fs::path(args.out_dir) / "truth.csv");
    os << "field,year,component,value\n";
    const TrajectoryMeta& meta = truth.meta;
    SocModel model(spec, active_plants(spec.table, sched));
    for (int f = 0; f < meta.n_fields; ++f)
      for (int t = 0; t < meta.n_years; ++t) {
        for (std::size_t c = 0; c < meta.components.size(); ++c)
          os << (f + 1) << ',' << (meta.year0 + t) << ',' << meta.components[c] << ','
             << fmt17(truth.true_states[meta.index(f, t, int(c))]) << '\n';
        for (int i = 0; i < model.n_plants(); ++i)
          os << (f + 1) << ',' << (meta.year0 + t) << ",log_"
             << to_string(model.plants()[i]) << ','
             << fmt17(truth.true_plant_log[(std::size_t(f) * meta.n_years + t) *
                                               model.n_plants() +
                                           i])
             << '\n';
      }
  }
  {
    std::ofstream os = open_csv(fs::path(args.out_dir) / "theta.csv");
    os << "parameter,value\n";
    for (int j = 0; j < space.size(); ++j)
      os << space.defs()[j].name << ',' << fmt17(space.defs()[j].get(truth.theta)) << '\n';
  }
  {
    nlohmann::json j;
    j["model"] = args.model;
    j["table"] = args.table;
    j["prior_set"] = to_string(pset);
    j["n_fields"] = args.n_fields;
    j["year0"] = args.year0;
    j["n_years"] = args.n_years;
    j["seed"] = args.seed;
    j["obs_sparsity"] = args.obs_sparsity;
    j["kappa"] = args.kappa;
    std::ofstream os = open_csv(fs::path(args.out_dir) / "simulate_manifest.json");
    os << j.dump(2) << '\n';
  }
}

}  // namespace socmc
