#include "socmc/rng.hpp"

#include <cmath>
#include <sstream>

namespace socmc {

double DetRng::gamma(double shape, double scale) {
  if (shape < 1.0) {
    // boost: G(a) = G(a+1) * U^(1/a)
    const double u = u01();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = u01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double DetRng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

double DetRng::truncnormal_lb0(double mean, double sd) {
  for (;;) {
    const double x = normal(mean, sd);
    if (x >= 0.0) return x;
  }
}

std::string DetRng::serialize() const {
  std::ostringstream os;
  os << eng_;
  return os.str();
}

void DetRng::deserialize(const std::string& s) {
  std::istringstream is(s);
  is >> eng_;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace socmc
