#pragma once
#include <vector>

#include "socmc/cpm.hpp"
#include "socmc/target.hpp"

namespace socmc {

struct LfoConfig {
  int first_k = 1;  // condition on at least this many observed years
  int j2 = 0;       // particles per predictive evaluation (0: sampler.n_particles)
  double rhat_threshold = 1.2;
  SamplerConfig sampler;  // settings for each truncated-data sub-fit
};

struct ElpdStep {
  int k = 0;     // number of observed years conditioned on
  int year = 0;  // year index being predicted
  std::vector<double> per_chain;  // log predictive density per chain
  double log_pred = 0;            // draws of all chains pooled
  double max_rhat = 0;            // sub-fit convergence (transformed scale)
  bool converged = true;
};

struct ElpdResult {
  std::vector<ElpdStep> steps;
  double total = 0;                     // sum of pooled per-step terms
  std::vector<double> per_chain_total;  // per-chain ELPD
  double mean = 0, sd = 0;              // across chains
  bool converged = true;                // every sub-fit below the R-hat threshold
};

// Exact leave-future-out cross-validation: for each split k = first_k ...
// n_obs-1, refits the model on the first k observed years with the full
// sampler, then scores the next observed year by the nested Monte-Carlo
// predictive (average over retained draws of the particle predictive
// estimate). Sub-fits failing the R-hat threshold flag the result, never
// abort it.
ElpdResult lfo_cv(const TargetModel& target, const LfoConfig& cfg);

struct WaicResult {
  struct Parts {
    double lppd = 0, p_waic = 0, waic = 0;
  };
  Parts pooled;                   // all chains' draws together
  std::vector<Parts> per_chain;
};

// WAIC from the per-draw conditional log-likelihood decompositions the chains
// retained: lppd_t by log-sum-exp over draws, the effective-parameter penalty
// as the per-year posterior variance of the log conditional density.
WaicResult waic(const std::vector<ChainOutput>& chains);

}  // namespace socmc
