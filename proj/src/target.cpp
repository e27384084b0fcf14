#include "socmc/target.hpp"

#include <cmath>
#include <numeric>

#include "socmc/math.hpp"

namespace socmc {

namespace {
ParamSpace one_location_space(double prior_mean, double prior_sd) {
  ParameterVector base;
  ParamSpace::Def def;
  def.name = "theta";
  def.prior = Prior::normal(prior_mean, prior_sd);
  def.tf = Transform::for_prior(def.prior);
  def.set = [](ParameterVector& pv, double v) { pv.c = v; };
  def.get = [](const ParameterVector& pv) { return pv.c; };
  return ParamSpace(base, {def});
}
}  // namespace

ConjugateNormalTarget::ConjugateNormalTarget(std::vector<double> y, double obs_var,
                                             double prior_mean, double prior_var)
    : y_(std::move(y)),
      obs_var_(obs_var),
      prior_mean_(prior_mean),
      prior_var_(prior_var),
      space_(one_location_space(prior_mean, std::sqrt(prior_var))) {
  if (y_.empty()) throw ContractViolation("conjugate target needs data");
  if (!(obs_var_ > 0.0) || !(prior_var_ > 0.0))
    throw ConfigError("conjugate target variances must be positive");
}

FilterResult ConjugateNormalTarget::log_likelihood(const ParameterVector& th,
                                                   const RandomStream&, int) const {
  FilterResult r;
  r.step_loglik.resize(y_.size());
  for (std::size_t t = 0; t < y_.size(); ++t) {
    r.step_loglik[t] = norm_logpdf(y_[t], th.c, obs_var_);
    r.loglik += r.step_loglik[t];
  }
  return r;
}

std::vector<int> ConjugateNormalTarget::observed_years() const {
  std::vector<int> v(y_.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::unique_ptr<TargetModel> ConjugateNormalTarget::truncated(int k) const {
  if (k < 1 || k > int(y_.size())) throw ContractViolation("truncation out of range");
  return std::make_unique<ConjugateNormalTarget>(
      std::vector<double>(y_.begin(), y_.begin() + k), obs_var_, prior_mean_, prior_var_);
}

double ConjugateNormalTarget::log_one_step_predictive(const ParameterVector& th, int k, int,
                                                      std::uint64_t) const {
  if (k < 0 || k >= int(y_.size())) throw ContractViolation("predictive index out of range");
  return norm_logpdf(y_[k], th.c, obs_var_);
}

double ConjugateNormalTarget::posterior_var(int k) const {
  const int n = k < 0 ? int(y_.size()) : k;
  return 1.0 / (1.0 / prior_var_ + double(n) / obs_var_);
}

double ConjugateNormalTarget::posterior_mean(int k) const {
  const int n = k < 0 ? int(y_.size()) : k;
  const double sum = std::accumulate(y_.begin(), y_.begin() + n, 0.0);
  return posterior_var(k) * (prior_mean_ / prior_var_ + sum / obs_var_);
}

double ConjugateNormalTarget::log_predictive_exact(int k) const {
  if (k < 0 || k >= int(y_.size())) throw ContractViolation("predictive index out of range");
  return norm_logpdf(y_[k], posterior_mean(k), posterior_var(k) + obs_var_);
}

ScalarLgssKernel::ScalarLgssKernel(double a, double b, double q_sd, double c, double r_var,
                                   double m0, double p0_sd, std::vector<double> y)
    : a_(a), b_(b), q_sd_(q_sd), c_(c), r_var_(r_var), m0_(m0), p0_sd_(p0_sd), y_(std::move(y)) {
  if (y_.empty()) throw ContractViolation("lgss kernel needs at least one year");
  if (!(r_var_ > 0.0)) throw ConfigError("lgss kernel observation variance must be positive");
}

double ScalarLgssKernel::log_weight(const double* state, int t) const {
  return norm_logpdf(y_[t], c_ * state[0], r_var_);
}

LinearGaussianModel ScalarLgssKernel::to_linear_gaussian() const {
  LinearGaussianModel m;
  m.A = Eigen::MatrixXd::Constant(1, 1, a_);
  m.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.C = Eigen::MatrixXd::Constant(1, 1, c_);
  m.Q = Eigen::MatrixXd::Constant(1, 1, q_sd_ * q_sd_);
  m.R = Eigen::MatrixXd::Constant(1, 1, r_var_);
  m.x0 = Eigen::VectorXd::Constant(1, m0_);
  m.P0 = Eigen::MatrixXd::Constant(1, 1, p0_sd_ * p0_sd_);
  m.u.assign(y_.size(), Eigen::VectorXd::Constant(1, b_));
  return m;
}

}  // namespace socmc
