#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace socmc {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// Standard normal cdf / log-pdf.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double norm_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

// Inverse standard normal cdf (Wichura's AS 241, double precision).
double norm_invcdf(double p);

// Log-normal log-density on the mass scale (includes the 1/y Jacobian).
inline double lognorm_logpdf(double y, double log_mean, double var) {
  if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
  const double ly = std::log(y);
  return -ly + norm_logpdf(ly, log_mean, var);
}

double log_sum_exp(const double* x, std::size_t n);
inline double log_sum_exp(const std::vector<double>& x) {
  return log_sum_exp(x.data(), x.size());
}

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);  // n-1 denominator

// Quantile with linear interpolation between order statistics (the common
// "type 7" rule: h = (n-1)p). p in [0,1]; input need not be sorted.
double quantile_type7(std::vector<double> x, double p);

// F-distribution quantile (via GSL), used by the convergence diagnostic's
// upper confidence bound.
double f_quantile(double p, double df1, double df2);

// Kolmogorov-Smirnov one-sample test against a cdf; returns asymptotic p-value.
template <class Cdf>
double ks_test_pvalue(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::max(f - double(i) / n, double(i + 1) / n - f));
  }
  const double lambda = (std::sqrt(double(n)) + 0.12 + 0.11 / std::sqrt(double(n))) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace socmc
