#include "socmc/math.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>

#include <stdexcept>

namespace socmc {

// AS 241 (Wichura 1988), PPND16: max relative error about 1e-15.
double norm_invcdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_invcdf: p outside (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double log_sum_exp(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  if (!std::isfinite(m)) return m;  // all -inf (or a nan propagates below)
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / double(x.size());
}

double sample_variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / double(x.size() - 1);
}

double quantile_type7(std::vector<double> x, double p) {
  if (x.empty()) throw std::domain_error("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = double(x.size() - 1) * p;
  const std::size_t lo = std::size_t(std::floor(h));
  if (lo + 1 >= x.size()) return x.back();
  const double frac = h - double(lo);
  return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

double f_quantile(double p, double df1, double df2) {
  // GSL's default handler aborts the process on convergence failures; the
  // inverse-beta iteration behind Pinv gives up for very lopsided df pairs
  // (e.g. df2 ~ 1e6 from near-identical long chains). Take the error code
  // path instead and fall back to the df2 -> inf limit df1*F -> chi^2(df1),
  // which is what such df pairs are numerically anyway.
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;
  const double q = gsl_cdf_fdist_Pinv(p, df1, df2);
  if (std::isfinite(q)) return q;
  const double limit = gsl_cdf_chisq_Pinv(p, df1) / df1;
  if (std::isfinite(limit)) return limit;
  throw std::domain_error("F quantile failed to converge");
}

}  // namespace socmc
