// Timing harness for the correlated particle filter: serial reference engine
// vs the OpenMP kernel at 1 thread and at the machine width. The parallel
// kernel must be bit-identical to the reference on every workload -- the run
// fails (exit 1) on any mismatch, so the smoke invocation doubles as a test.
//
//   bench_filters [--quick] [--reps K]
//
// --quick shrinks the workloads to smoke-test size (used by ctest).
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "socmc/filters.hpp"
#include "socmc/simulate.hpp"
#include "socmc/soc_model.hpp"
#include "socmc/target.hpp"

using namespace socmc;

namespace {

double time_once(const std::function<FilterResult()>& fn, FilterResult& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

double median_ms(const std::function<FilterResult()>& fn, int reps, FilterResult& out) {
  std::vector<double> ms(reps);
  for (int i = 0; i < reps; ++i) ms[i] = time_once(fn, out);
  std::sort(ms.begin(), ms.end());
  return ms[reps / 2];
}

bool same_result(const FilterResult& a, const FilterResult& b) {
  if (a.loglik != b.loglik || a.step_loglik.size() != b.step_loglik.size()) return false;
  for (std::size_t i = 0; i < a.step_loglik.size(); ++i)
    if (a.step_loglik[i] != b.step_loglik[i]) return false;
  return true;
}

struct Workload {
  std::string name;
  const ParticleKernel* kernel;
  int n_particles;
  RandomStream stream;
};

ParameterVector bench_theta() {
  ParameterVector th;
  th.k_c = 0.2;
  th.k_b = 0.6;
  th.pi_cb = 0.3;
  th.pi_bb = 0.2;
  th.pi_bc = 0.25;
  th.c = 0.45;
  th.r_w = 0.5;
  th.r_p = 1.0;
  th.p_hay = 0.1;
  th.h_w = 2.0;
  th.sig2_w = 0.04;
  th.mu_gw = 0.4;
  th.rho_gw = 0.6;
  th.sig2_gw = 0.25;
  th.mu_p = 1.4;
  th.rho_p = 0.5;
  th.sig2_p = 0.2;
  th.sig2_eta_c = 0.01;
  th.sig2_eta_b = 0.01;
  th.m_iom = 4.0;
  th.x0 = {40.0};
  return th;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  int reps = 5;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--quick")) quick = true;
    else if (!std::strcmp(argv[i], "--reps") && i + 1 < argc) reps = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--quick] [--reps K]\n", argv[0]);
      return 2;
    }
  }
  if (quick) reps = 1;

  // scalar linear-Gaussian workloads
  DetRng rng(404);
  const int T = quick ? 12 : 40;
  std::vector<double> y(T);
  double x = 1.0 + 0.7 * rng.normal();
  for (int t = 0; t < T; ++t) {
    if (t > 0) x = 0.9 * x + 0.4 + 0.5 * rng.normal();
    y[t] = 1.2 * x + std::sqrt(0.3) * rng.normal();
  }
  const ScalarLgssKernel scalar(0.9, 0.4, 0.5, 1.2, 0.3, 1.0, 0.7, y);

  // one field of the SOC model, SOC channels weighted in the filter
  SocModelSpec spec;
  spec.variant = ModelVariant::ThreePoolBioK;
  const int soc_T = quick ? 8 : 20;
  const ManagementSchedule sched = rotation_schedule(InputTable::Tarlee, 1, 1988, soc_T - 1);
  const ParameterVector th = bench_theta();
  const SyntheticData syn = generate_synthetic(spec, th, sched, soc_T, 11);
  const SocModel model(spec, active_plants(InputTable::Tarlee, sched));
  const SocFieldKernel soc(model, th, syn.data, sched, 0, true);

  std::vector<Workload> work;
  DetRng srng(707);
  for (int n : quick ? std::vector<int>{1000} : std::vector<int>{2000, 20000, 200000})
    work.push_back({"scalar-lgss", &scalar, n,
                    RandomStream::draw({1, scalar.n_years(), n, scalar.noise_dim()}, srng)});
  for (int n : quick ? std::vector<int>{200} : std::vector<int>{200, 1000, 5000})
    work.push_back({"soc-3pool-biok", &soc, n,
                    RandomStream::draw({1, soc.n_years(), n, soc.noise_dim()}, srng)});

  const int width = omp_get_max_threads();
  std::printf("%-16s %8s %4s %10s %10s %10s %8s  %s\n", "workload", "N", "T", "ref ms",
              "omp1 ms", "ompN ms", "speedup", "bit-identical");
  bool all_ok = true;
  for (const Workload& w : work) {
    FilterResult ref, omp1, ompn;
    const double t_ref = median_ms(
        [&] { return reference::correlated_filter(*w.kernel, w.n_particles, w.stream); }, reps,
        ref);
    CorrelatedOptions o1;
    o1.threads = 1;
    const double t_1 = median_ms(
        [&] { return correlated_filter(*w.kernel, w.n_particles, w.stream, o1); }, reps, omp1);
    CorrelatedOptions on;
    on.threads = width;
    const double t_n = median_ms(
        [&] { return correlated_filter(*w.kernel, w.n_particles, w.stream, on); }, reps, ompn);
    const bool ok = same_result(ref, omp1) && same_result(ref, ompn);
    all_ok = all_ok && ok;
    std::printf("%-16s %8d %4d %10.2f %10.2f %10.2f %7.2fx  %s\n", w.name.c_str(),
                w.n_particles, w.kernel->n_years(), t_ref, t_1, t_n, t_ref / t_n,
                ok ? "yes" : "NO");
  }
  std::printf("threads: %d\n", width);
  if (!all_ok) {
    std::fprintf(stderr, "parallel kernel diverged from the reference\n");
    return 1;
  }
  return 0;
}
