#include "socmc/params.hpp"

#include <cmath>
#include <limits>

#include "socmc/errors.hpp"
#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}

Transform Transform::for_prior(const Prior& p) {
  const double lo = p.support_lo(), hi = p.support_hi();
  Transform t;
  if (std::isinf(lo) && std::isinf(hi)) {
    t.kind = Kind::Identity;
  } else if (lo == 0.0 && std::isinf(hi)) {
    t.kind = Kind::Log;
  } else {
    t.kind = Kind::Logit;
    t.lo = lo;
    t.hi = hi;
  }
  return t;
}

double Transform::to_z(double x) const {
  switch (kind) {
    case Kind::Identity: return x;
    case Kind::Log: return std::log(x);
    case Kind::Logit: {
      const double u = (x - lo) / (hi - lo);
      return std::log(u) - std::log1p(-u);
    }
  }
  return x;
}

double Transform::to_natural(double z) const {
  switch (kind) {
    case Kind::Identity: return z;
    case Kind::Log: return std::exp(z);
    case Kind::Logit: return lo + (hi - lo) * expit(z);
  }
  return z;
}

double Transform::log_jacobian(double z) const {
  switch (kind) {
    case Kind::Identity: return 0.0;
    case Kind::Log: return z;
    case Kind::Logit: {
      // d/dz [lo + (hi-lo) expit(z)] = (hi-lo) expit(z) expit(-z)
      const double s = expit(z);
      return std::log(hi - lo) + std::log(s) + std::log1p(-s);
    }
  }
  return 0.0;
}

std::vector<std::string> ParamSpace::names() const {
  std::vector<std::string> out;
  out.reserve(defs_.size());
  for (const auto& d : defs_) out.push_back(d.name);
  return out;
}

ParameterVector ParamSpace::natural(const std::vector<double>& z) const {
  if (int(z.size()) != size())
    throw ContractViolation("ParamSpace::natural: dimension mismatch");
  ParameterVector theta = base_;
  for (int i = 0; i < size(); ++i) defs_[i].set(theta, defs_[i].tf.to_natural(z[i]));
  return theta;
}

std::vector<double> ParamSpace::to_z(const ParameterVector& theta) const {
  std::vector<double> z(size());
  for (int i = 0; i < size(); ++i) z[i] = defs_[i].tf.to_z(defs_[i].get(theta));
  return z;
}

double ParamSpace::log_prior_z(const std::vector<double>& z) const {
  double lp = 0.0;
  ParameterVector theta = base_;
  for (int i = 0; i < size(); ++i) {
    const double x = defs_[i].tf.to_natural(z[i]);
    const double l = defs_[i].prior.logpdf(x);
    if (!std::isfinite(l)) return kNegInf;
    lp += l + defs_[i].tf.log_jacobian(z[i]);
    defs_[i].set(theta, x);
  }
  if (indicator_ && !indicator_(theta)) return kNegInf;
  return lp;
}

std::vector<double> ParamSpace::sample_z(DetRng& rng) const {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    ParameterVector theta = base_;
    std::vector<double> z(size());
    for (int i = 0; i < size(); ++i) {
      const double x = defs_[i].prior.sample(rng);
      z[i] = defs_[i].tf.to_z(x);
      defs_[i].set(theta, x);
    }
    if (!indicator_ || indicator_(theta)) return z;
  }
  throw NumericalError("prior sampling: joint support indicator never satisfied");
}

}  // namespace socmc
