#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "socmc/filters.hpp"
#include "socmc/kalman.hpp"
#include "socmc/math.hpp"
#include "socmc/target.hpp"

using namespace socmc;

namespace {

std::vector<double> simulate_lgss(DetRng& rng, double a, double b, double q_sd, double c,
                                  double r_sd, double m0, double p0_sd, int T) {
  std::vector<double> y(T);
  double x = m0 + p0_sd * rng.normal();
  y[0] = c * x + r_sd * rng.normal();
  for (int t = 1; t < T; ++t) {
    x = a * x + b + q_sd * rng.normal();
    y[t] = c * x + r_sd * rng.normal();
  }
  return y;
}

RandomStream stream_for(const ParticleKernel& k, int n, std::uint64_t seed) {
  StreamLayout lay{1, k.n_years(), n, k.noise_dim()};
  DetRng rng(seed);
  return RandomStream::draw(lay, rng);
}

}  // namespace

TEST_CASE("systematic resampling walks the cumulative weights") {
  CHECK(systematic_resample({0.5, 0.5}, 2, 0.3) == std::vector<int>{0, 1});
  CHECK(systematic_resample({0.9, 0.1}, 2, 0.5) == std::vector<int>{0, 0});
  CHECK(systematic_resample({0.9, 0.1}, 2, 0.85) == std::vector<int>{0, 1});
  CHECK(systematic_resample({1.0, 0.0, 0.0}, 3, 0.0) == std::vector<int>{0, 0, 0});
  CHECK(systematic_resample({0.0, 0.0, 1.0}, 3, 0.5) == std::vector<int>{2, 2, 2});
  // offspring counts can differ from weights by at most one slot
  const auto p = systematic_resample({0.25, 0.25, 0.25, 0.25}, 4, 0.7);
  CHECK(p == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(systematic_resample({}, 2, 0.1), ContractViolation);
  CHECK_THROWS_AS(systematic_resample({1.0}, 0, 0.1), ContractViolation);
  CHECK_THROWS_AS(systematic_resample({1.0}, 1, 1.0), ContractViolation);
  CHECK_THROWS_AS(systematic_resample({1.0}, 1, -0.1), ContractViolation);
}

TEST_CASE("bootstrap filter is unbiased for the linear-gaussian likelihood") {
  DetRng data_rng(8);
  const auto y = simulate_lgss(data_rng, 0.85, 0.3, 0.5, 1.0, std::sqrt(0.4), 1.0, 0.7, 12);
  ScalarLgssKernel k(0.85, 0.3, 0.5, 1.0, 0.4, 1.0, 0.7, y);
  const double exact = kalman_filter(k.to_linear_gaussian(), Eigen::Map<const Eigen::MatrixXd>(
                                                                 y.data(), int(y.size()), 1))
                           .loglik;

  DetRng rng(21);
  const int reps = 40, N = 1500;
  std::vector<double> ratio(reps);
  for (int r = 0; r < reps; ++r)
    ratio[r] = std::exp(bootstrap_filter(k, N, rng).loglik - exact);
  const double m = mean(ratio);
  const double se = std::sqrt(sample_variance(ratio) / reps);
  CHECK(std::abs(m - 1.0) < 4.0 * se + 0.02);

  // ESS-gated variant stays a sane estimator
  DetRng rng2(22);
  const double ll = bootstrap_filter(k, 4000, rng2, 0.5).loglik;
  CHECK(std::abs(ll - exact) < 1.5);
}

TEST_CASE("parallel correlated filter is bit-identical to the serial reference") {
  DetRng data_rng(9);
  auto y = simulate_lgss(data_rng, 0.9, 0.1, 0.6, 1.2, 0.5, 0.5, 1.0, 14);
  y[3] = std::numeric_limits<double>::quiet_NaN();  // a gap year
  y[9] = std::numeric_limits<double>::quiet_NaN();
  ScalarLgssKernel k(0.9, 0.1, 0.6, 1.2, 0.25, 0.5, 1.0, y);

  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto s = stream_for(k, 64, seed);
    const auto ref = reference::correlated_filter(k, 64, s);
    for (int threads : {0, 1, 2, 4}) {
      CorrelatedOptions opt;
      opt.threads = threads;
      const auto par = correlated_filter(k, 64, s, opt);
      CHECK(par.loglik == ref.loglik);
      CHECK(par.step_loglik == ref.step_loglik);
    }
  }
}

TEST_CASE("correlated filter is a pure function of the stream") {
  DetRng data_rng(10);
  const auto y = simulate_lgss(data_rng, 0.8, 0.0, 0.5, 1.0, 0.6, 0.0, 1.0, 10);
  ScalarLgssKernel k(0.8, 0.0, 0.5, 1.0, 0.36, 0.0, 1.0, y);
  const auto s1 = stream_for(k, 50, 100);
  const auto s2 = stream_for(k, 50, 101);
  CHECK(correlated_filter(k, 50, s1).loglik == correlated_filter(k, 50, s1).loglik);
  CHECK(correlated_filter(k, 50, s1).loglik != correlated_filter(k, 50, s2).loglik);

  // undersized stream or bad field slot is a caller bug
  ScalarLgssKernel k2(0.8, 0.0, 0.5, 1.0, 0.36, 0.0, 1.0,
                      std::vector<double>(11, 0.0));
  CHECK_THROWS_AS(correlated_filter(k2, 50, s1), ContractViolation);
  CorrelatedOptions bad;
  bad.field_slot = 1;
  CHECK_THROWS_AS(correlated_filter(k, 50, s1, bad), ContractViolation);
}

TEST_CASE("small crank-nicolson moves perturb the estimate less than a fresh stream") {
  DetRng data_rng(12);
  const auto y = simulate_lgss(data_rng, 0.9, 0.2, 0.7, 1.0, 0.5, 0.0, 1.0, 15);
  ScalarLgssKernel k(0.9, 0.2, 0.7, 1.0, 0.25, 0.0, 1.0, y);
  const int N = 200;

  DetRng rng(55);
  double d_corr = 0.0, d_fresh = 0.0;
  const int reps = 30;
  for (int r = 0; r < reps; ++r) {
    auto s = RandomStream::draw(StreamLayout{1, k.n_years(), N, 1}, rng);
    const double l0 = correlated_filter(k, N, s).loglik;
    auto sc = s;
    sc.crank_nicolson(0.995, rng);
    d_corr += std::abs(correlated_filter(k, N, sc).loglik - l0);
    auto sf = RandomStream::draw(s.layout, rng);
    d_fresh += std::abs(correlated_filter(k, N, sf).loglik - l0);
  }
  CHECK(d_corr < 0.5 * d_fresh);
}

TEST_CASE("one particle reduces to a single weighted path") {
  DetRng data_rng(13);
  const auto y = simulate_lgss(data_rng, 0.7, 0.4, 0.5, 1.0, 0.7, 1.0, 0.5, 8);
  ScalarLgssKernel k(0.7, 0.4, 0.5, 1.0, 0.49, 1.0, 0.5, y);
  const auto s = stream_for(k, 1, 7);
  const auto r = correlated_filter(k, 1, s);

  double x = 0.0, ll = 0.0;
  for (int t = 0; t < k.n_years(); ++t) {
    const double z = s.u[s.layout.u_index(0, t, 0, 0)];
    if (t == 0)
      x = 1.0 + 0.5 * z;
    else
      x = 0.7 * x + 0.4 + 0.5 * z;
    ll += norm_logpdf(y[t], x, 0.49);
  }
  CHECK(r.loglik == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("a noise-free kernel collapses to the deterministic path") {
  std::vector<double> y{1.2, 0.8, 1.5, 0.9};
  ScalarLgssKernel k(0.9, 0.3, 0.0, 1.0, 0.5, 1.0, 0.0, y);
  const auto s = stream_for(k, 32, 77);
  const auto r = correlated_filter(k, 32, s);

  double x = 1.0, ll = 0.0;
  std::vector<double> path{x};
  for (int t = 1; t < 4; ++t) {
    x = 0.9 * x + 0.3;
    path.push_back(x);
  }
  for (int t = 0; t < 4; ++t) ll += norm_logpdf(y[t], path[t], 0.5);
  CHECK(r.loglik == doctest::Approx(ll).epsilon(1e-12));

  Trajectory traj;
  CorrelatedOptions opt;
  opt.trajectory = &traj;
  correlated_filter(k, 32, s, opt);
  REQUIRE(traj.state_dim == 1);
  REQUIRE(traj.states.size() == 4);
  for (int t = 0; t < 4; ++t) CHECK(traj.at(t)[0] == doctest::Approx(path[t]).epsilon(1e-12));
}

TEST_CASE("trajectory capture is deterministic and tracks ancestry") {
  DetRng data_rng(14);
  const auto y = simulate_lgss(data_rng, 0.85, 0.1, 0.6, 1.0, 0.4, 0.0, 1.0, 9);
  ScalarLgssKernel k(0.85, 0.1, 0.6, 1.0, 0.16, 0.0, 1.0, y);
  const auto s = stream_for(k, 40, 88);

  Trajectory t1, t2;
  CorrelatedOptions o1, o2;
  o1.trajectory = &t1;
  o2.trajectory = &t2;
  correlated_filter(k, 40, s, o1);
  correlated_filter(k, 40, s, o2);
  CHECK(t1.states == t2.states);
  REQUIRE(t1.states.size() == 9);
  for (double v : t1.states) CHECK(std::isfinite(v));
}

TEST_CASE("skipping resamples keeps the sequential-importance identity") {
  DetRng data_rng(15);
  const auto y = simulate_lgss(data_rng, 0.9, 0.0, 0.4, 1.0, 0.8, 0.0, 1.0, 7);
  ScalarLgssKernel k(0.9, 0.0, 0.4, 1.0, 0.64, 0.0, 1.0, y);
  const int N = 60;
  const auto s = stream_for(k, N, 31);

  CorrelatedOptions opt;
  opt.resample_ess_frac = 1e-9;  // the ESS gate never trips
  const auto r = correlated_filter(k, N, s, opt);

  // no resampling: log( (1/N) sum_j prod_t w_jt ) from raw particle paths
  std::vector<double> lw(N, 0.0);
  for (int j = 0; j < N; ++j) {
    double x = 0.0;
    for (int t = 0; t < k.n_years(); ++t) {
      const double z = s.u[s.layout.u_index(0, t, j, 0)];
      x = t == 0 ? 0.0 + 1.0 * z : 0.9 * x + 0.4 * z;
      lw[j] += norm_logpdf(y[t], x, 0.64);
    }
  }
  CHECK(r.loglik == doctest::Approx(log_sum_exp(lw) - std::log(double(N))).epsilon(1e-12));
}

TEST_CASE("one-step predictive matches the exact conditional") {
  DetRng data_rng(16);
  const auto y = simulate_lgss(data_rng, 0.8, 0.25, 0.5, 1.0, 0.5, 0.6, 0.8, 10);
  ScalarLgssKernel k(0.8, 0.25, 0.5, 1.0, 0.25, 0.6, 0.8, y);
  const auto m = k.to_linear_gaussian();
  const Eigen::Map<const Eigen::MatrixXd> Y(y.data(), int(y.size()), 1);

  const int upto = 4, target = 7;
  const double exact = kalman_log_predictive(m, Y, upto, target);

  const int N = 30000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = stream_for(k, N, seed);
    const double est = correlated_filter_predictive(k, N, s, 0, upto, target);
    CHECK(est == doctest::Approx(exact).epsilon(0.05));
  }

  const auto s = stream_for(k, 16, 4);
  CHECK_THROWS_AS(correlated_filter_predictive(k, 16, s, 0, 5, 5), ContractViolation);
  CHECK_THROWS_AS(correlated_filter_predictive(k, 16, s, 0, 5, 10), ContractViolation);
}

namespace {
// test double: particles die (NaN state) from a chosen year onward
class DyingKernel final : public ParticleKernel {
 public:
  explicit DyingKernel(int die_at) : die_at_(die_at) {}
  int state_dim() const override { return 1; }
  int noise_dim() const override { return 1; }
  int n_years() const override { return 5; }
  bool year_has_obs(int) const override { return true; }
  void init(double* s, const double* z) const override {
    s[0] = die_at_ == 0 ? std::numeric_limits<double>::quiet_NaN() : z[0];
  }
  void step(double* s, int t, const double* z) const override {
    s[0] = t >= die_at_ ? std::numeric_limits<double>::quiet_NaN() : s[0] + z[0];
  }
  double log_weight(const double* s, int) const override {
    if (std::isnan(s[0])) return -std::numeric_limits<double>::infinity();
    return norm_logpdf(s[0], 0.0, 1.0);
  }
  double sort_key(const double* s) const override { return s[0]; }

 private:
  int die_at_;
};
}  // namespace

TEST_CASE("a fully degenerate year reports its index") {
  DyingKernel k(2);
  const auto s = stream_for(k, 8, 5);
  try {
    correlated_filter(k, 8, s);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("year index 2") != std::string::npos);
  }
  DyingKernel k0(0);
  try {
    DetRng rng(6);
    bootstrap_filter(k0, 8, rng);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("year index 0") != std::string::npos);
  }
}
