#pragma once
#include <map>
#include <string>

#include "socmc/rng.hpp"

namespace socmc {

// One marginal prior. Parameter meaning by family:
//   Normal(a =mean, b = sd), TruncNormalLB0(a = mean, b = sd, support [0,inf)),
//   LogNormal(a = log-mean, b = log-sd), Uniform(a, b), Beta(a, b),
//   InvGamma(a = shape, b = scale), Fixed(a).
struct Prior {
  enum class Family { Normal, TruncNormalLB0, LogNormal, Uniform, Beta, InvGamma, Fixed };
  Family family = Family::Normal;
  double a = 0.0, b = 1.0;

  double logpdf(double x) const;
  double sample(DetRng& rng) const;
  double support_lo() const;
  double support_hi() const;
  bool fixed() const { return family == Family::Fixed; }

  static Prior normal(double mean, double sd) { return {Family::Normal, mean, sd}; }
  static Prior truncnormal(double mean, double sd) { return {Family::TruncNormalLB0, mean, sd}; }
  static Prior lognormal(double mu, double sigma) { return {Family::LogNormal, mu, sigma}; }
  static Prior uniform(double lo, double hi) { return {Family::Uniform, lo, hi}; }
  static Prior beta(double a, double b) { return {Family::Beta, a, b}; }
  static Prior inv_gamma(double shape, double scale) { return {Family::InvGamma, shape, scale}; }
  static Prior fixed(double v) { return {Family::Fixed, v, 0.0}; }
};

// Site-specific prior sets. Tarlee is the base table; the other two override
// the entries that differ (decay rates, initial stocks, IOM mass, crop links).
enum class PriorSet { Tarlee, Brigalow, Broadbalk };
std::string to_string(PriorSet s);
PriorSet prior_set_from_string(const std::string& s);

// name -> prior for every parameter the engine knows, including fixed
// observation variances. Initial-stock entries are named X0_1, X0_2, ...
std::map<std::string, Prior> default_priors(PriorSet set, int n_fields);

}  // namespace socmc
