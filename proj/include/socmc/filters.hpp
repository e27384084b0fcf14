#pragma once
#include <vector>

#include "socmc/random_stream.hpp"

namespace socmc {

// One sequential filtering problem as seen by the particle engines: how many
// doubles a particle carries, how many standard normals each (year, particle)
// consumes, and how to initialize / propagate / weight. A kernel flags an
// untenable particle by writing NaN into its state; its weight becomes -inf.
class ParticleKernel {
 public:
  virtual ~ParticleKernel() = default;
  virtual int state_dim() const = 0;
  virtual int noise_dim() const = 0;
  virtual int n_years() const = 0;
  virtual bool year_has_obs(int t) const = 0;
  virtual void init(double* state, const double* z) const = 0;
  // advance into year t (t >= 1), consuming noise_dim() normals from z
  virtual void step(double* state, int t, const double* z) const = 0;
  // joint log-density of year t's observations given the state
  virtual double log_weight(const double* state, int t) const = 0;
  // scalar ordering key used before systematic resampling
  virtual double sort_key(const double* state) const = 0;
};

struct FilterResult {
  double loglik = 0.0;
  std::vector<double> step_loglik;  // per year; 0 where nothing is observed
};

// Retained filtering trajectory: one state row per year (ancestral path of a
// single particle drawn at the end proportional to final weights).
struct Trajectory {
  int state_dim = 0;
  std::vector<double> states;  // n_years x state_dim
  const double* at(int t) const { return states.data() + std::size_t(t) * state_dim; }
};

// Plain bootstrap filter: propagation noise and multinomial resampling drawn
// freely from `rng`. Reference estimator for oracle comparisons.
FilterResult bootstrap_filter(const ParticleKernel& k, int n_particles, DetRng& rng,
                              double resample_ess_frac = -1.0);

struct CorrelatedOptions {
  int field_slot = 0;            // which field's block of the stream to read
  double resample_ess_frac = -1; // <0: always resample at observation years
  int threads = 0;               // 0: library default
  Trajectory* trajectory = nullptr;  // optional ancestral-path capture
};

// Fixed-randomness filter: a pure function of (kernel, stream). Particles are
// sorted by the kernel's key before systematic resampling, whose single
// uniform is the normal cdf of the year's V entry. Bit-identical results for
// identical (theta, U, V) regardless of thread count.
FilterResult correlated_filter(const ParticleKernel& k, int n_particles,
                               const RandomStream& stream, const CorrelatedOptions& opt = {});

namespace reference {
// Serial reference engine with the same contract as correlated_filter;
// kept for differential testing and benchmarking of the parallel kernel.
FilterResult correlated_filter(const ParticleKernel& k, int n_particles,
                               const RandomStream& stream, int field_slot = 0);
}  // namespace reference

// Filter through observation years <= upto_year, then propagate without
// weighting and return log( (1/N) sum_j p(Y_target | X_target^j) ).
double correlated_filter_predictive(const ParticleKernel& k, int n_particles,
                                    const RandomStream& stream, int field_slot,
                                    int upto_year, int target_year);

// Systematic resampling: positions (v + j)/N against the cumulative
// normalized weights. v in [0,1). Returns parent indices in order.
std::vector<int> systematic_resample(const std::vector<double>& weights, int n_out,
                                     double v);

}  // namespace socmc
