#include "socmc/selection.hpp"

#include <cmath>

#include "socmc/diagnostics.hpp"
#include "socmc/math.hpp"

namespace socmc {

ElpdResult lfo_cv(const TargetModel& target, const LfoConfig& cfg) {
  cfg.sampler.validate();
  const std::vector<int> obs = target.observed_years();
  const int n_obs = int(obs.size());
  if (cfg.first_k < 1 || cfg.first_k >= n_obs)
    throw ConfigError("leave-future-out needs 1 <= first_k < number of observed years");
  const int j2 = cfg.j2 > 0 ? cfg.j2 : cfg.sampler.n_particles;

  ElpdResult out;
  out.per_chain_total.assign(cfg.sampler.n_chains, 0.0);

  for (int k = cfg.first_k; k < n_obs; ++k) {
    SamplerConfig sub_cfg = cfg.sampler;
    sub_cfg.seed = derive_seed(cfg.sampler.seed, 1000 + std::uint64_t(k));
    if (!sub_cfg.checkpoint_path.empty())
      sub_cfg.checkpoint_path += "_k" + std::to_string(k) + "_";
    sub_cfg.store_trajectories = false;

    const std::unique_ptr<TargetModel> sub = target.truncated(k);
    const std::vector<ChainOutput> chains = run_chains(*sub, sub_cfg);
    const ParamSpace& space = sub->param_space();

    ElpdStep step;
    step.k = k;
    step.year = obs[k];
    std::vector<double> all_logp;
    for (int c = 0; c < int(chains.size()); ++c) {
      std::vector<double> logp;
      logp.reserve(chains[c].draws.size());
      for (std::size_t j = 0; j < chains[c].draws.size(); ++j) {
        const ParameterVector th = space.natural(chains[c].draws[j].z);
        const std::uint64_t seed =
            derive_seed(derive_seed(sub_cfg.seed, std::uint64_t(c)), 7000 + std::uint64_t(j));
        logp.push_back(target.log_one_step_predictive(th, k, j2, seed));
      }
      if (logp.empty()) throw ConfigError("sub-fit retained no draws; raise iterations or lower thin");
      step.per_chain.push_back(log_sum_exp(logp) - std::log(double(logp.size())));
      all_logp.insert(all_logp.end(), logp.begin(), logp.end());
    }
    step.log_pred = log_sum_exp(all_logp) - std::log(double(all_logp.size()));

    if (chains.size() >= 2) {
      step.max_rhat = max_rhat(rhat_report(chains, space));
      step.converged = step.max_rhat < cfg.rhat_threshold;
    }

    out.total += step.log_pred;
    for (int c = 0; c < int(chains.size()); ++c) out.per_chain_total[c] += step.per_chain[c];
    out.converged = out.converged && step.converged;
    out.steps.push_back(std::move(step));
  }

  out.mean = mean(out.per_chain_total);
  out.sd = out.per_chain_total.size() > 1
               ? std::sqrt(sample_variance(out.per_chain_total))
               : 0.0;
  return out;
}

namespace {
WaicResult::Parts waic_parts(const std::vector<const Draw*>& draws) {
  const int s = int(draws.size());
  if (s == 0) throw ContractViolation("no retained draws");
  if (s == 1) throw ConfigError("WAIC needs at least 2 retained draws");
  const std::size_t ny = (*draws[0]).step_loglik.size();
  if (ny == 0)
    throw ContractViolation("retained draws carry no per-year likelihood decomposition");
  for (const Draw* d : draws)
    if (d->step_loglik.size() != ny)
      throw ContractViolation("retained draws disagree on the year count");

  WaicResult::Parts p;
  std::vector<double> col(s);
  for (std::size_t t = 0; t < ny; ++t) {
    for (int i = 0; i < s; ++i) col[i] = draws[i]->step_loglik[t];
    p.lppd += log_sum_exp(col) - std::log(double(s));
    p.p_waic += sample_variance(col);
  }
  p.waic = -2.0 * p.lppd + 2.0 * p.p_waic;
  return p;
}
}  // namespace

WaicResult waic(const std::vector<ChainOutput>& chains) {
  if (chains.empty()) throw ContractViolation("no chains");
  WaicResult out;
  std::vector<const Draw*> pooled;
  for (const ChainOutput& c : chains) {
    std::vector<const Draw*> own;
    for (const Draw& d : c.draws) {
      own.push_back(&d);
      pooled.push_back(&d);
    }
    out.per_chain.push_back(waic_parts(own));
  }
  out.pooled = waic_parts(pooled);
  return out;
}

}  // namespace socmc
