#pragma once
#include <cstdint>
#include <random>
#include <string>

#include "socmc/math.hpp"

namespace socmc {

// Deterministic RNG used everywhere randomness is needed. All variate
// transforms are implemented here (inverse-cdf normals etc.) so results are
// reproducible for a given seed regardless of the standard library build.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed = 1) : eng_(seed) {}

  // uniform on the open interval (0,1), 53-bit
  double u01() { return (double(eng_() >> 11) + 0.5) * 0x1p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  double normal() { return norm_invcdf(u01()); }
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Marsaglia-Tsang; shape boosting for shape < 1
  double gamma(double shape, double scale);
  double beta(double a, double b);
  double inv_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }
  // normal truncated to [0, inf); rejection (fine for the priors in use)
  double truncnormal_lb0(double mean, double sd);

  std::uint64_t next_u64() { return eng_(); }

  // engine state round-trips through text (checkpoint resume)
  std::string serialize() const;
  void deserialize(const std::string& s);

 private:
  std::mt19937_64 eng_;
};

// Splitmix64-style mixing for deriving independent seeds from a base seed
// and a stream index (chains, replicates, sub-fits ...).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace socmc
