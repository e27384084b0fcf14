#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "socmc/target.hpp"

namespace socmc {

// Random-walk pseudo-marginal MCMC with a correlated likelihood-noise stream:
// one block update of (theta, stream) per iteration, the stream refreshed by
// a Crank-Nicolson step with autocorrelation tau. tau = 0 refreshes the
// stream completely (plain pseudo-marginal); tau -> 1 keeps consecutive
// likelihood estimates tightly coupled so the estimator noise largely cancels
// in the acceptance ratio.
struct SamplerConfig {
  int iterations = 10000;
  int burn_in = 2000;
  int thin = 20;
  double tau = 0.99;
  int n_particles = 100;
  int n_chains = 3;
  std::uint64_t seed = 1;

  double init_scale = 0.1;  // RW step scale on the transformed scale
  bool adapt = true;        // adapt the global scale during burn-in only
  double accept_target = 0.15;
  int max_init_attempts = 200;

  bool store_trajectories = false;

  std::string checkpoint_path;  // empty: no checkpointing
  int checkpoint_every = 0;     // additionally every k iterations (0: only at the end)
  int stop_after = 0;           // >0: stop early after this many iterations (tests)

  void validate() const;  // ConfigError on bad settings (tau outside [0,1), ...)
};

// one retained (thinned) draw
struct Draw {
  std::vector<double> z;             // transformed-scale parameters
  double loglik = 0;                 // pseudo-marginal estimate carried by the chain
  std::vector<double> step_loglik;   // per-year contributions (information criteria)
  std::vector<double> trajectory;    // optional latent-state draw (TrajectoryMeta layout)
};

struct ChainOutput {
  std::vector<std::string> param_names;
  std::vector<Draw> draws;
  std::vector<double> loglik_trace;  // per iteration, after the accept/reject step
  long long n_accept = 0, n_reject = 0, n_degenerate = 0;
  double final_scale = 0;
  std::uint64_t chain_seed = 0;
  int iterations_done = 0;

  double accept_rate() const {
    const long long n = n_accept + n_reject + n_degenerate;
    return n ? double(n_accept) / double(n) : 0.0;
  }
  // column j of the retained transformed-scale draws
  std::vector<double> param_z(int j) const;
};

// Runs one chain. If cfg.checkpoint_path names an existing file the chain is
// resumed from it and the final output is identical to an uninterrupted run;
// otherwise the chain starts fresh (prior draw retried until the likelihood
// evaluates finite). Degenerate likelihood evaluations (particle collapse)
// reject the proposal and are counted, never fatal.
ChainOutput run_chain(const TargetModel& target, const SamplerConfig& cfg,
                      std::uint64_t chain_seed);

// n_chains independent chains seeded derive_seed(cfg.seed, k); per-chain
// checkpoints at cfg.checkpoint_path + "<k>.ckpt" when a path is set.
std::vector<ChainOutput> run_chains(const TargetModel& target, const SamplerConfig& cfg);

// Monte-Carlo standard error of the mean of a (correlated) scalar trace,
// estimated by non-overlapping batch means with ~sqrt(n) batches.
double batch_means_se(const std::vector<double>& x);

}  // namespace socmc
