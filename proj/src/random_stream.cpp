#include "socmc/random_stream.hpp"

#include <cmath>

namespace socmc {

RandomStream RandomStream::draw(const StreamLayout& lay, DetRng& rng) {
  RandomStream s;
  s.layout = lay;
  s.u.resize(lay.u_size());
  s.v.resize(lay.v_size());
  for (double& x : s.u) x = rng.normal();
  for (double& x : s.v) x = rng.normal();
  return s;
}

void RandomStream::crank_nicolson(double tau, DetRng& rng) {
  if (!(tau >= 0.0 && tau < 1.0))
    throw ConfigError("crank_nicolson: tau must lie in [0,1)");
  const double w = std::sqrt(1.0 - tau * tau);
  for (double& x : u) x = tau * x + w * rng.normal();
  for (double& x : v) x = tau * x + w * rng.normal();
}

void RandomStream::require(const StreamLayout& needed) const {
  if (!(layout == needed) || u.size() < needed.u_size() || v.size() < needed.v_size())
    throw ContractViolation("random stream does not match the required layout");
}

}  // namespace socmc
