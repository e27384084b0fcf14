#pragma once
#include <cstdint>
#include <string>

#include "socmc/io.hpp"

namespace socmc {

// Orchestration behind the CLI verbs. Every run writes its artifacts under
// rc.out_dir: chains/*.ckpt, posterior_theta.csv, rhat.csv,
// trajectories_quantiles.csv, waic.csv / elpd.csv, run_manifest.json.
// Deterministic given the manifest: a rerun reproduces the CSVs byte for
// byte (existing checkpoints are picked up, a fresh directory is re-sampled
// to the same result).
void run_fit(const RunConfig& rc);

// rhat.csv only, from the checkpoints of a finished run
void run_diagnose(const RunConfig& rc);

// re-emit all post-processing artifacts from checkpoints (no new sampling;
// lfo-cv scores are not re-derivable and are skipped)
void run_report(const RunConfig& rc);

struct SimulateArgs {
  std::string model = "three-pool-biok";
  std::string table = "tarlee";
  std::string prior_set;  // empty: named after the table
  int n_fields = 3;
  int year0 = 1986;   // initial-state year; treatments start the next year
  int n_years = 20;   // horizon including the initial year
  std::uint64_t seed = 1;
  double obs_sparsity = 1.0;
  double kappa = kKappaBioDefault;
  std::string out_dir = "sim";
};

// Draws theta from the prior (support-constrained), forward-simulates, and
// writes dataset.csv, schedule.csv, truth.csv, theta.csv into out_dir.
void run_simulate(const SimulateArgs& args);

}  // namespace socmc
