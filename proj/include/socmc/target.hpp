#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "socmc/filters.hpp"
#include "socmc/kalman.hpp"
#include "socmc/params.hpp"
#include "socmc/random_stream.hpp"

namespace socmc {

// Shape of stored latent-trajectory draws: flat [field][year][component].
struct TrajectoryMeta {
  int n_fields = 0, n_years = 0, year0 = 0;
  std::vector<std::string> components;
  std::size_t size() const {
    return std::size_t(n_fields) * n_years * components.size();
  }
  std::size_t index(int f, int t, int c) const {
    return (std::size_t(f) * n_years + t) * components.size() + c;
  }
};

// One fitting problem as the sampler sees it: a parameter space plus a
// likelihood (estimator) that is a pure function of (theta, stream). Exact-
// likelihood targets simply ignore the stream.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual const ParamSpace& param_space() const = 0;
  virtual StreamLayout stream_layout(int n_particles) const = 0;
  // loglik plus its per-year decomposition (0 for unobserved years)
  virtual FilterResult log_likelihood(const ParameterVector& th, const RandomStream& stream,
                                      int n_particles) const = 0;

  // leave-future-out support
  virtual std::vector<int> observed_years() const = 0;
  virtual std::unique_ptr<TargetModel> truncated(int k_obs_years) const = 0;
  // log p(Y at the (k+1)-th observed year | first k observed years, theta);
  // particle-based targets draw a fresh stream from `seed`
  virtual double log_one_step_predictive(const ParameterVector& th, int k_obs_years,
                                         int n_particles, std::uint64_t seed) const = 0;

  // optional latent-trajectory retention (empty meta = none recorded)
  virtual TrajectoryMeta trajectory_meta() const { return {}; }
  virtual void sample_trajectory(const ParameterVector&, const RandomStream&, int,
                                 std::vector<double>&) const {
    throw ContractViolation("target records no trajectories");
  }
};

// iid y_t ~ N(theta, obs_var) with theta ~ N(prior_mean, prior_var): exact
// likelihood, closed-form posterior and one-step predictive. The workhorse
// oracle for sampler and selection tests.
class ConjugateNormalTarget final : public TargetModel {
 public:
  ConjugateNormalTarget(std::vector<double> y, double obs_var, double prior_mean,
                        double prior_var);

  const ParamSpace& param_space() const override { return space_; }
  StreamLayout stream_layout(int) const override { return {1, 1, 1, 1}; }
  FilterResult log_likelihood(const ParameterVector& th, const RandomStream&,
                              int) const override;
  std::vector<int> observed_years() const override;
  std::unique_ptr<TargetModel> truncated(int k) const override;
  double log_one_step_predictive(const ParameterVector& th, int k, int,
                                 std::uint64_t) const override;

  // closed forms for oracle comparisons (conditioning on the first k points;
  // k < 0 means all)
  double posterior_mean(int k = -1) const;
  double posterior_var(int k = -1) const;
  double log_predictive_exact(int k) const;  // log p(y_{k+1} | y_{1:k})

 private:
  std::vector<double> y_;
  double obs_var_, prior_mean_, prior_var_;
  ParamSpace space_;
};

// Scalar linear-Gaussian state-space test kernel:
//   x_0 ~ N(m0, p0_sd^2); x_t = a x_{t-1} + b + q_sd z_t; y_t ~ N(c x_t, r_var).
// NaN observations are missing years. Doubles as the benchmark workload.
class ScalarLgssKernel final : public ParticleKernel {
 public:
  ScalarLgssKernel(double a, double b, double q_sd, double c, double r_var, double m0,
                   double p0_sd, std::vector<double> y);

  int state_dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  int n_years() const override { return int(y_.size()); }
  bool year_has_obs(int t) const override { return !std::isnan(y_[t]); }
  void init(double* state, const double* z) const override { state[0] = m0_ + p0_sd_ * z[0]; }
  void step(double* state, int, const double* z) const override {
    state[0] = a_ * state[0] + b_ + q_sd_ * z[0];
  }
  double log_weight(const double* state, int t) const override;
  double sort_key(const double* state) const override { return state[0]; }

  // the same model for the exact Kalman oracle
  LinearGaussianModel to_linear_gaussian() const;
  const std::vector<double>& observations() const { return y_; }

 private:
  double a_, b_, q_sd_, c_, r_var_, m0_, p0_sd_;
  std::vector<double> y_;
};

}  // namespace socmc
