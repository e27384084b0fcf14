#include "socmc/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "socmc/errors.hpp"
#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int effective_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// Deterministic total order on (key, index); NaN keys sink to the bottom.
void sort_indices_by_key(const std::vector<double>& key, std::vector<int>& idx) {
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&key](int a, int b) {
    double ka = key[a], kb = key[b];
    if (std::isnan(ka)) ka = kNegInf;
    if (std::isnan(kb)) kb = kNegInf;
    if (ka != kb) return ka < kb;
    return a < b;
  });
}

[[noreturn]] void throw_degenerate(int year) {
  std::ostringstream os;
  os << "particle filter degenerate: all weights vanished at year index " << year;
  throw NumericalError(os.str());
}
}  // namespace

std::vector<int> systematic_resample(const std::vector<double>& weights, int n_out, double v) {
  const int n = static_cast<int>(weights.size());
  if (n == 0 || n_out <= 0) throw ContractViolation("systematic_resample: empty input");
  if (!(v >= 0.0 && v < 1.0)) throw ContractViolation("systematic_resample: v outside [0,1)");
  std::vector<int> parents(n_out);
  double cum = weights[0];
  int i = 0;
  for (int j = 0; j < n_out; ++j) {
    const double pos = (v + j) / n_out;
    while (cum < pos && i + 1 < n) {
      ++i;
      cum += weights[i];
    }
    parents[j] = i;
  }
  return parents;
}

FilterResult bootstrap_filter(const ParticleKernel& k, int n_particles, DetRng& rng,
                              double resample_ess_frac) {
  const int dim = k.state_dim();
  const int nd = k.noise_dim();
  const int ny = k.n_years();
  if (n_particles <= 0) throw ContractViolation("bootstrap_filter: n_particles <= 0");

  std::vector<double> st(std::size_t(n_particles) * dim);
  std::vector<double> buf(st.size());
  std::vector<double> z(nd);
  std::vector<double> lw(n_particles, 0.0);
  std::vector<double> logw(n_particles);

  FilterResult out;
  out.step_loglik.assign(ny, 0.0);

  for (int t = 0; t < ny; ++t) {
    for (int j = 0; j < n_particles; ++j) {
      for (int d = 0; d < nd; ++d) z[d] = rng.normal();
      double* s = st.data() + std::size_t(j) * dim;
      if (t == 0)
        k.init(s, z.data());
      else
        k.step(s, t, z.data());
    }
    if (!k.year_has_obs(t)) continue;

    for (int j = 0; j < n_particles; ++j) logw[j] = k.log_weight(st.data() + std::size_t(j) * dim, t);
    const double before = log_sum_exp(lw);
    for (int j = 0; j < n_particles; ++j) lw[j] += logw[j];
    const double after = log_sum_exp(lw);
    if (!std::isfinite(after)) throw_degenerate(t);
    out.loglik += after - before;
    out.step_loglik[t] = after - before;

    std::vector<double> w(n_particles);
    double ess_inv = 0.0;
    for (int j = 0; j < n_particles; ++j) {
      w[j] = std::exp(lw[j] - after);
      ess_inv += w[j] * w[j];
    }
    const bool do_resample =
        resample_ess_frac < 0.0 || 1.0 / ess_inv < resample_ess_frac * n_particles;
    if (!do_resample) continue;

    // multinomial: one free uniform per offspring
    std::vector<double> cum(n_particles);
    std::partial_sum(w.begin(), w.end(), cum.begin());
    cum.back() = 1.0;
    for (int j = 0; j < n_particles; ++j) {
      const double u = rng.u01();
      const int p = int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      std::memcpy(buf.data() + std::size_t(j) * dim, st.data() + std::size_t(p) * dim,
                  sizeof(double) * dim);
    }
    st.swap(buf);
    std::fill(lw.begin(), lw.end(), 0.0);
  }
  return out;
}

namespace {

// Shared body for the parallel and predictive variants. `weight_upto` bounds
// the years treated as observed (inclusive); pass ny-1 for plain filtering.
FilterResult correlated_filter_core(const ParticleKernel& k, int n_particles,
                                    const RandomStream& stream, const CorrelatedOptions& opt,
                                    int weight_upto, int predict_year, double* predictive_out) {
  const int dim = k.state_dim();
  const int nd = k.noise_dim();
  const int ny = k.n_years();
  if (n_particles <= 0) throw ContractViolation("correlated_filter: n_particles <= 0");
  const StreamLayout& L = stream.layout;
  if (L.particles != n_particles || L.noise_dim < nd || L.years < ny)
    throw ContractViolation("correlated_filter: stream layout too small for kernel");
  if (opt.field_slot < 0 || opt.field_slot >= L.fields)
    throw ContractViolation("correlated_filter: field slot out of range");
  const int f = opt.field_slot;
  const int nthreads = effective_threads(opt.threads);
  (void)nthreads;

  std::vector<double> st(std::size_t(n_particles) * dim);
  std::vector<double> buf(st.size());
  std::vector<double> lw(n_particles, 0.0);
  std::vector<double> logw(n_particles);
  std::vector<double> key(n_particles);
  std::vector<int> order(n_particles);

  const bool track = opt.trajectory != nullptr;
  std::vector<std::vector<double>> hist_states;
  std::vector<std::vector<int>> hist_parent;
  if (track) {
    hist_states.assign(ny, {});
    hist_parent.assign(ny, {});
  }

  FilterResult out;
  out.step_loglik.assign(ny, 0.0);
  const int last_year = predict_year >= 0 ? predict_year : ny - 1;

  for (int t = 0; t <= last_year; ++t) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int j = 0; j < n_particles; ++j) {
      const double* z = stream.u.data() + L.u_index(f, t, j, 0);
      double* s = st.data() + std::size_t(j) * dim;
      if (t == 0)
        k.init(s, z);
      else
        k.step(s, t, z);
    }

    if (predict_year >= 0 && t == predict_year) {
      // unweighted one-step-ahead predictive density estimate
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
      for (int j = 0; j < n_particles; ++j)
        logw[j] = k.log_weight(st.data() + std::size_t(j) * dim, t);
      // combine with carried weights so skipped resamples stay correct
      std::vector<double> comb(n_particles);
      const double before = log_sum_exp(lw);
      for (int j = 0; j < n_particles; ++j) comb[j] = lw[j] + logw[j];
      const double after = log_sum_exp(comb);
      if (!std::isfinite(after)) throw_degenerate(t);
      *predictive_out = after - before;
      return out;
    }

    const bool weighted = k.year_has_obs(t) && t <= weight_upto;
    if (!weighted) {
      if (track) {
        hist_states[t] = st;
        hist_parent[t].resize(n_particles);
        std::iota(hist_parent[t].begin(), hist_parent[t].end(), 0);
      }
      continue;
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int j = 0; j < n_particles; ++j)
      logw[j] = k.log_weight(st.data() + std::size_t(j) * dim, t);

    // serial reduction keeps the sum bit-identical across thread counts
    const double before = log_sum_exp(lw);
    for (int j = 0; j < n_particles; ++j) lw[j] += logw[j];
    const double after = log_sum_exp(lw);
    if (!std::isfinite(after)) throw_degenerate(t);
    out.loglik += after - before;
    out.step_loglik[t] = after - before;

    std::vector<double> w(n_particles);
    double ess_inv = 0.0;
    for (int j = 0; j < n_particles; ++j) {
      w[j] = std::exp(lw[j] - after);
      ess_inv += w[j] * w[j];
    }
    const bool do_resample =
        opt.resample_ess_frac < 0.0 || 1.0 / ess_inv < opt.resample_ess_frac * n_particles;
    if (!do_resample) {
      if (track) {
        hist_states[t] = st;
        hist_parent[t].resize(n_particles);
        std::iota(hist_parent[t].begin(), hist_parent[t].end(), 0);
      }
      continue;
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int j = 0; j < n_particles; ++j) key[j] = k.sort_key(st.data() + std::size_t(j) * dim);
    sort_indices_by_key(key, order);

    std::vector<double> ws(n_particles);
    for (int j = 0; j < n_particles; ++j) ws[j] = w[order[j]];
    const double v = norm_cdf(stream.v[L.v_index(f, t)]);
    const std::vector<int> parents = systematic_resample(ws, n_particles, v);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int j = 0; j < n_particles; ++j)
      std::memcpy(buf.data() + std::size_t(j) * dim, st.data() + std::size_t(order[parents[j]]) * dim,
                  sizeof(double) * dim);
    st.swap(buf);
    std::fill(lw.begin(), lw.end(), 0.0);
    if (track) {
      hist_states[t] = st;
      hist_parent[t].resize(n_particles);
      for (int j = 0; j < n_particles; ++j) hist_parent[t][j] = order[parents[j]];
    }
  }

  if (track) {
    Trajectory& traj = *opt.trajectory;
    traj.state_dim = dim;
    traj.states.assign(std::size_t(ny) * dim, 0.0);
    // select the retained path with the stream's dedicated per-field slot
    const double norm = log_sum_exp(lw);
    const double u = norm_cdf(stream.v[L.v_trajectory_index(f)]);
    int j = n_particles - 1;
    double cum = 0.0;
    for (int i = 0; i < n_particles; ++i) {
      cum += std::exp(lw[i] - norm);
      if (cum >= u) {
        j = i;
        break;
      }
    }
    for (int t = ny - 1; t >= 0; --t) {
      std::memcpy(traj.states.data() + std::size_t(t) * dim,
                  hist_states[t].data() + std::size_t(j) * dim, sizeof(double) * dim);
      j = hist_parent[t][j];
    }
  }
  return out;
}

}  // namespace

FilterResult correlated_filter(const ParticleKernel& k, int n_particles,
                               const RandomStream& stream, const CorrelatedOptions& opt) {
  return correlated_filter_core(k, n_particles, stream, opt, k.n_years() - 1, -1, nullptr);
}

double correlated_filter_predictive(const ParticleKernel& k, int n_particles,
                                    const RandomStream& stream, int field_slot,
                                    int upto_year, int target_year) {
  if (target_year <= upto_year || target_year >= k.n_years())
    throw ContractViolation("correlated_filter_predictive: bad year range");
  CorrelatedOptions opt;
  opt.field_slot = field_slot;
  double pred = 0.0;
  // core returns log( sum_j wnorm_j p(Y_target | X_target^j) ), already normalized
  correlated_filter_core(k, n_particles, stream, opt, upto_year, target_year, &pred);
  return pred;
}

namespace reference {

FilterResult correlated_filter(const ParticleKernel& k, int n_particles,
                               const RandomStream& stream, int field_slot) {
  const int dim = k.state_dim();
  const int nd = k.noise_dim();
  const int ny = k.n_years();
  if (n_particles <= 0) throw ContractViolation("correlated_filter: n_particles <= 0");
  const StreamLayout& L = stream.layout;
  if (L.particles != n_particles || L.noise_dim < nd || L.years < ny)
    throw ContractViolation("correlated_filter: stream layout too small for kernel");
  const int f = field_slot;

  std::vector<double> st(std::size_t(n_particles) * dim);
  std::vector<double> buf(st.size());
  std::vector<double> lw(n_particles, 0.0);
  std::vector<double> logw(n_particles);
  std::vector<double> key(n_particles);
  std::vector<int> order(n_particles);

  FilterResult out;
  out.step_loglik.assign(ny, 0.0);

  for (int t = 0; t < ny; ++t) {
    for (int j = 0; j < n_particles; ++j) {
      const double* z = stream.u.data() + L.u_index(f, t, j, 0);
      double* s = st.data() + std::size_t(j) * dim;
      if (t == 0)
        k.init(s, z);
      else
        k.step(s, t, z);
    }
    if (!k.year_has_obs(t)) continue;

    for (int j = 0; j < n_particles; ++j) logw[j] = k.log_weight(st.data() + std::size_t(j) * dim, t);
    const double before = log_sum_exp(lw);
    for (int j = 0; j < n_particles; ++j) lw[j] += logw[j];
    const double after = log_sum_exp(lw);
    if (!std::isfinite(after)) throw_degenerate(t);
    out.loglik += after - before;
    out.step_loglik[t] = after - before;

    std::vector<double> w(n_particles);
    for (int j = 0; j < n_particles; ++j) w[j] = std::exp(lw[j] - after);

    for (int j = 0; j < n_particles; ++j) key[j] = k.sort_key(st.data() + std::size_t(j) * dim);
    sort_indices_by_key(key, order);
    std::vector<double> ws(n_particles);
    for (int j = 0; j < n_particles; ++j) ws[j] = w[order[j]];
    const double v = norm_cdf(stream.v[L.v_index(f, t)]);
    const std::vector<int> parents = systematic_resample(ws, n_particles, v);
    for (int j = 0; j < n_particles; ++j)
      std::memcpy(buf.data() + std::size_t(j) * dim,
                  st.data() + std::size_t(order[parents[j]]) * dim, sizeof(double) * dim);
    st.swap(buf);
    std::fill(lw.begin(), lw.end(), 0.0);
  }
  return out;
}

}  // namespace reference

}  // namespace socmc
