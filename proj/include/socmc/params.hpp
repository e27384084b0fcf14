#pragma once
#include <functional>
#include <string>
#include <vector>

#include "socmc/priors.hpp"

namespace socmc {

// Full parameter superset on the natural scale. A model variant reads only
// the fields it needs; the sampler touches only the entries its ParamSpace
// declares free. Initial decomposable stocks are per field.
struct ParameterVector {
  // decay rates (1/yr)
  double k_c = 0, k_d = 0, k_r = 0, k_h = 0, k_b = 0;
  // transfer proportions: three-pool
  double pi_cb = 0, pi_bb = 0, pi_bc = 0;
  // transfer proportions: five-pool (pi_bb shared)
  double pi_dh = 0, pi_rh = 0, pi_hh = 0, pi_bh = 0;
  double pi_db = 0, pi_rb = 0, pi_hb = 0;
  double p_d = 0;  // DPM share of fresh input
  // carbon input coefficients
  double c = 0, r_w = 0, r_p = 0, r_s = 0, p_hay = 0, h_w = 0, h_s = 0;
  // plant AR(1) processes (log scale)
  double mu_gw = 0, mu_gs = 0, mu_p = 0, mu_g = 0, mu_str = 0;
  double rho_gw = 0, rho_gs = 0, rho_p = 0, rho_g = 0, rho_str = 0;
  double sig2_gw = 0, sig2_gs = 0, sig2_p = 0, sig2_g = 0, sig2_str = 0;
  double sig2_w = 0, sig2_s = 0;
  // process noise variances (sig2_eta appears in the prior table only)
  double sig2_eta = 0;
  double sig2_eta_c = 0, sig2_eta_b = 0, sig2_eta_d = 0, sig2_eta_r = 0, sig2_eta_h = 0;
  // stocks
  double m_iom = 0;
  std::vector<double> x0;  // initial decomposable stock per field
  // fixed observation variances
  double sig2_e_toc = 0.025, sig2_e_poc = 0.9, sig2_e_hum = 0.1, sig2_e_iom = 0.01;
  double sig2_e_gw = 0.023, sig2_e_w = 0.133, sig2_e_gs = 0.023, sig2_e_s = 0.133;
  double sig2_e_p = 0.067, sig2_e_g = 0.023, sig2_e_str = 0.067;
};

// Bijection between a natural-scale parameter and the unconstrained scale the
// sampler random-walks on. Chosen from the prior's support.
struct Transform {
  enum class Kind { Identity, Log, Logit } kind = Kind::Identity;
  double lo = 0, hi = 1;  // Logit bounds

  static Transform for_prior(const Prior& p);
  double to_z(double x) const;
  double to_natural(double z) const;
  double log_jacobian(double z) const;  // log |d natural / d z|
};

// The free parameters of one fitting problem: names, priors, transforms and
// how each one lands in a ParameterVector. Extra joint support constraints
// (e.g. respiration feasibility) plug in as an indicator.
class ParamSpace {
 public:
  struct Def {
    std::string name;
    Prior prior;
    Transform tf;
    std::function<void(ParameterVector&, double)> set;
    std::function<double(const ParameterVector&)> get;
  };

  ParamSpace() = default;
  ParamSpace(ParameterVector base, std::vector<Def> defs)
      : base_(std::move(base)), defs_(std::move(defs)) {}

  int size() const { return int(defs_.size()); }
  const std::vector<Def>& defs() const { return defs_; }
  std::vector<std::string> names() const;
  const ParameterVector& base() const { return base_; }

  void set_support_indicator(std::function<bool(const ParameterVector&)> f) {
    indicator_ = std::move(f);
  }

  ParameterVector natural(const std::vector<double>& z) const;
  std::vector<double> to_z(const ParameterVector& theta) const;

  // log prior density of natural(z) plus the transform Jacobian; -inf outside
  // the support or when the joint indicator fails.
  double log_prior_z(const std::vector<double>& z) const;

  // prior draw on the z scale; re-draws until the joint indicator accepts
  std::vector<double> sample_z(DetRng& rng) const;

 private:
  ParameterVector base_;
  std::vector<Def> defs_;
  std::function<bool(const ParameterVector&)> indicator_;
};

}  // namespace socmc
