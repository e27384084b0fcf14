#include "socmc/priors.hpp"

#include <cmath>
#include <limits>

#include "socmc/errors.hpp"
#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double Prior::logpdf(double x) const {
  switch (family) {
    case Family::Normal:
      return norm_logpdf(x, a, b * b);
    case Family::TruncNormalLB0: {
      if (x < 0.0) return kNegInf;
      // renormalized by P(X >= 0) = Phi(mean/sd)
      return norm_logpdf(x, a, b * b) - std::log(norm_cdf(a / b));
    }
    case Family::LogNormal:
      return lognorm_logpdf(x, a, b * b);
    case Family::Uniform:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case Family::Beta: {
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
             std::lgamma(a) - std::lgamma(b);
    }
    case Family::InvGamma: {
      if (x <= 0.0) return kNegInf;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    }
    case Family::Fixed:
      return 0.0;  // point mass; density conventionally dropped
  }
  return kNegInf;
}

double Prior::sample(DetRng& rng) const {
  switch (family) {
    case Family::Normal: return rng.normal(a, b);
    case Family::TruncNormalLB0: return rng.truncnormal_lb0(a, b);
    case Family::LogNormal: return std::exp(rng.normal(a, b));
    case Family::Uniform: return rng.uniform(a, b);
    case Family::Beta: return rng.beta(a, b);
    case Family::InvGamma: return rng.inv_gamma(a, b);
    case Family::Fixed: return a;
  }
  return a;
}

double Prior::support_lo() const {
  switch (family) {
    case Family::Normal: return -std::numeric_limits<double>::infinity();
    case Family::TruncNormalLB0: return 0.0;
    case Family::LogNormal: return 0.0;
    case Family::Uniform: return a;
    case Family::Beta: return 0.0;
    case Family::InvGamma: return 0.0;
    case Family::Fixed: return a;
  }
  return 0.0;
}

double Prior::support_hi() const {
  switch (family) {
    case Family::Normal: return std::numeric_limits<double>::infinity();
    case Family::TruncNormalLB0: return std::numeric_limits<double>::infinity();
    case Family::LogNormal: return std::numeric_limits<double>::infinity();
    case Family::Uniform: return b;
    case Family::Beta: return 1.0;
    case Family::InvGamma: return std::numeric_limits<double>::infinity();
    case Family::Fixed: return a;
  }
  return 0.0;
}

std::string to_string(PriorSet s) {
  switch (s) {
    case PriorSet::Tarlee: return "tarlee";
    case PriorSet::Brigalow: return "brigalow";
    case PriorSet::Broadbalk: return "broadbalk";
  }
  return "tarlee";
}

PriorSet prior_set_from_string(const std::string& s) {
  if (s == "tarlee") return PriorSet::Tarlee;
  if (s == "brigalow") return PriorSet::Brigalow;
  if (s == "broadbalk") return PriorSet::Broadbalk;
  throw ConfigError("unknown prior set: " + s);
}

std::map<std::string, Prior> default_priors(PriorSet set, int n_fields) {
  std::map<std::string, Prior> p;

  // decay rates
  p["K_C"] = Prior::lognormal(-2.71, 0.127);
  p["K_D"] = Prior::lognormal(-2.71, 0.127);
  p["K_R"] = Prior::lognormal(-2.5, 0.135);
  p["K_B"] = Prior::truncnormal(0.66, 0.3);
  p["K_H"] = Prior::truncnormal(0.02, 0.01);

  // carbon input coefficients
  p["c"] = Prior::normal(0.45, 0.01);
  p["r_W"] = Prior::normal(0.5, 0.067);
  p["r_P"] = Prior::normal(1.0, 0.125);
  p["r_S"] = Prior::normal(0.5, 0.067);
  p["p"] = Prior::beta(89.9, 809.1);
  p["h_W"] = Prior::lognormal(0.825, 0.36);
  p["h_S"] = Prior::lognormal(0.46, 1.6);

  // plant dry-matter AR(1) processes
  p["mu_GW"] = Prior::normal(0.42, 1.18);
  p["mu_GS"] = Prior::normal(0.42, 1.18);
  p["mu_P"] = Prior::normal(1.41, 1.81);
  p["mu_G"] = Prior::normal(0.42, 1.18);
  p["mu_Str"] = Prior::normal(0.42, 1.18);
  for (const char* r : {"rho_GW", "rho_GS", "rho_P", "rho_G", "rho_Str"})
    p[r] = Prior::uniform(-1.0, 1.0);
  for (const char* s2 :
       {"sig2_GW", "sig2_GS", "sig2_P", "sig2_G", "sig2_Str", "sig2_W", "sig2_S"})
    p[s2] = Prior::truncnormal(0.0, 0.5);

  // transfer proportions
  for (const char* pi : {"pi_CB", "pi_BB", "pi_BC", "pi_DH", "pi_RH", "pi_HH",
                         "pi_BH", "pi_DB", "pi_RB", "pi_HB", "P_D"})
    p[pi] = Prior::uniform(0.0, 1.0);

  // process noise variances (sig2_eta is in the table but no equation uses it)
  for (const char* s2 : {"sig2_eta", "sig2_eta_C", "sig2_eta_B", "sig2_eta_D",
                         "sig2_eta_R", "sig2_eta_H"})
    p[s2] = Prior::truncnormal(0.0, 0.5);

  // IOM mass and initial decomposable stocks
  p["M"] = Prior::truncnormal(4.0, 0.5);
  for (int i = 1; i <= n_fields; ++i)
    p["X0_" + std::to_string(i)] = Prior::truncnormal(40.0, 5.0);

  // fixed observation variances
  p["sig2_e_TOC"] = Prior::fixed(0.025);
  p["sig2_e_POC"] = Prior::fixed(0.9);
  p["sig2_e_HUM"] = Prior::fixed(0.1);
  p["sig2_e_IOM"] = Prior::fixed(0.01);
  p["sig2_e_GW"] = Prior::fixed(0.023);
  p["sig2_e_W"] = Prior::fixed(0.133);
  p["sig2_e_GS"] = Prior::fixed(0.023);
  p["sig2_e_S"] = Prior::fixed(0.133);
  p["sig2_e_P"] = Prior::fixed(0.067);
  p["sig2_e_G"] = Prior::fixed(0.023);
  p["sig2_e_Str"] = Prior::fixed(0.067);

  if (set == PriorSet::Brigalow) {
    p["M"] = Prior::truncnormal(12.0, 2.0);
    p["K_D"] = Prior::truncnormal(10.0, 5.0);
    p["K_R"] = Prior::truncnormal(0.15, 0.075);
    p["sig2_S"] = Prior::inv_gamma(0.01, 0.01);
    for (int i = 1; i <= n_fields; ++i)
      p["X0_" + std::to_string(i)] = Prior::truncnormal(60.0, 5.0);
  } else if (set == PriorSet::Broadbalk) {
    p["M"] = Prior::truncnormal(17.0, 2.0);
    p["K_D"] = Prior::truncnormal(10.0, 5.0);
    p["K_R"] = Prior::truncnormal(0.15, 0.075);
    for (int i = 1; i <= n_fields; ++i)
      p["X0_" + std::to_string(i)] = Prior::fixed(28.8);
  }
  return p;
}

}  // namespace socmc
