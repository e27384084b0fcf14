#pragma once
#include <cstddef>
#include <vector>

#include "socmc/errors.hpp"
#include "socmc/rng.hpp"

namespace socmc {

// Index map for the fixed standard-normal block driving a correlated particle
// filter run. `u` carries state-propagation noise addressed by
// (field, year, particle, channel); `v` carries one resampling draw per
// (field, year) plus one trailing slot per field reserved for the ancestral
// trajectory draw. Year 0 blocks drive state initialization.
struct StreamLayout {
  int fields = 1;
  int years = 0;
  int particles = 0;
  int noise_dim = 0;

  std::size_t u_size() const {
    return std::size_t(fields) * years * particles * noise_dim;
  }
  std::size_t v_size() const { return std::size_t(fields) * (years + 1); }

  std::size_t u_index(int field, int year, int particle, int channel) const {
    return ((std::size_t(field) * years + year) * particles + particle) * noise_dim +
           channel;
  }
  std::size_t v_index(int field, int year) const {
    return std::size_t(field) * (years + 1) + year;
  }
  std::size_t v_trajectory_index(int field) const {
    return std::size_t(field) * (years + 1) + years;
  }

  bool operator==(const StreamLayout&) const = default;
};

// The fixed random numbers (U, V) of a correlated pseudo-marginal run. All
// entries are standard normal; V is pushed through the normal cdf where a
// uniform is required. A likelihood evaluation is a pure function of
// (theta, U, V), which is what makes consecutive estimates correlated when
// the stream moves by small Crank-Nicolson steps.
struct RandomStream {
  StreamLayout layout;
  std::vector<double> u, v;

  static RandomStream draw(const StreamLayout& lay, DetRng& rng);

  // u* = tau u + sqrt(1-tau^2) xi, applied to every entry of u and v;
  // preserves the standard-normal law of the stream exactly.
  void crank_nicolson(double tau, DetRng& rng);

  // throws ContractViolation if the buffers do not match `needed`
  void require(const StreamLayout& needed) const;
};

}  // namespace socmc
