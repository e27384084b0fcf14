#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "socmc/errors.hpp"

namespace socmc {

enum class ModelVariant { ThreePool, ThreePoolBioK, FivePool, FivePoolBioK };

inline bool is_biok(ModelVariant v) {
  return v == ModelVariant::ThreePoolBioK || v == ModelVariant::FivePoolBioK;
}
inline bool is_five_pool(ModelVariant v) {
  return v == ModelVariant::FivePool || v == ModelVariant::FivePoolBioK;
}
std::string to_string(ModelVariant v);
ModelVariant variant_from_string(const std::string& s);

// Land management per field-year; drives the carbon input formula.
enum class Treatment {
  WheatGrain, WheatHay, Pasture, PastureHay,
  SorghumGrain, SorghumHay, Fallow, Cleared
};
std::string to_string(Treatment t);
Treatment treatment_from_string(const std::string& s);

// Which site's input formulas apply (same treatment label can carry a
// different residue formula at a different site).
enum class InputTable { Tarlee, Brigalow, Rothamsted };
std::string to_string(InputTable t);
InputTable input_table_from_string(const std::string& s);

// Observation channels. TOC/POC/HUM/IOM are carbon measurements; the rest are
// plant dry-matter measurements.
enum class Channel { TOC, POC, HUM, IOM, GW, W, GS, S, P, G, Str };
inline constexpr int kNumChannel = 11;
std::string to_string(Channel c);
Channel channel_from_string(const std::string& s);
inline bool is_plant_channel(Channel c) { return int(c) >= int(Channel::GW); }

// Plant dry-matter processes (latent states, one AR(1) chain or a linked
// harvest total per active process). Indices are stable.
enum class Plant { GW = 0, W, GS, S, P, G, Str };
inline constexpr int kNumPlant = 7;
std::string to_string(Plant p);

// Latent state of one field in one year. Carbon masses in t C/ha; plant
// entries are dry-matter masses. Three-pool variants use `amalgam` (the
// single decomposable pool) + `bio`; five-pool variants use dpm/rpm/hum + bio.
struct StateVector {
  double amalgam = 0, dpm = 0, rpm = 0, hum = 0, bio = 0, iom = 0;
  std::array<double, kNumPlant> plant{};

  // Total decomposable stock: the BIO carrying capacity base. Excludes IOM.
  double total_decomposable(ModelVariant v) const {
    return is_five_pool(v) ? dpm + rpm + hum + bio : amalgam + bio;
  }
  double toc(ModelVariant v) const { return total_decomposable(v) + iom; }
};

// F = X_B / (X_Total * kappa): the microbial decay mediation factor.
// Dimensionless, homogeneous of degree 0 in (x_b, x_total).
inline double decay_mediation_factor(double x_b, double x_total, double kappa) {
  if (!(x_total > 0.0))
    throw NumericalError("decay mediation factor: nonpositive total stock");
  return x_b / (x_total * kappa);
}
inline double decay_mediation_factor(const StateVector& s, ModelVariant v, double kappa) {
  return decay_mediation_factor(s.bio, s.total_decomposable(v), kappa);
}

// Carrying-capacity clamp on the candidate BIO inflow u. Headroom is measured
// against the pre-step stock; floored at zero so a state already above
// capacity accepts nothing and everything overflows.
struct ClampResult {
  double accepted = 0, overflow = 0;
};
inline ClampResult clamp_bio_inflow(double u, double x_total, double x_b, double kappa) {
  if (u < 0.0) throw NumericalError("clamp_bio_inflow: negative inflow");
  const double headroom = std::max(kappa * x_total - x_b, 0.0);
  ClampResult r;
  if (u <= headroom) {
    r.accepted = u;
    return r;
  }
  // Conservation must be bitwise: accepted + overflow == u. Deriving accepted
  // from the rounded overflow makes u - overflow exact (overflow >= u/2 here,
  // Sterbenz; when headroom > u/2 the first subtraction was already exact).
  // If that rounding left accepted a half-ulp past the headroom, push the
  // excess into overflow instead -- the cap may never be exceeded.
  r.overflow = u - headroom;
  r.accepted = u - r.overflow;
  while (r.accepted > headroom) {
    r.overflow = std::nextafter(r.overflow, std::numeric_limits<double>::infinity());
    r.accepted = u - r.overflow;
  }
  return r;
}

inline constexpr double kKappaBioDefault = 0.05;

}  // namespace socmc
