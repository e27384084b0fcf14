#pragma once
#include <array>
#include <vector>

#include "socmc/core.hpp"
#include "socmc/dataset.hpp"
#include "socmc/filters.hpp"
#include "socmc/params.hpp"

namespace socmc {

// Structural choices of one SOC model instance beyond the variant itself.
struct SocModelSpec {
  ModelVariant variant = ModelVariant::ThreePoolBioK;
  InputTable table = InputTable::Tarlee;
  double kappa = kKappaBioDefault;
  double delta_t = 1.0;
  // five-pool: the DPM survival term is written without F while DPM's transfer
  // into BIO carries F; true mediates the survival term too (consistent form)
  bool mediate_dpm_decay = false;
  double bio_init_fraction = 0.5;  // X_B(0) = fraction * kappa * X0
  std::array<double, 3> five_pool_split{0.01, 0.14, 0.85};  // X0 shares: DPM, RPM, HUM
  double cleared_input = 0.0;      // carbon input assigned to Cleared years

  int n_pools() const { return is_five_pool(variant) ? 5 : 3; }  // incl. IOM
  int carbon_noise_dim() const { return is_five_pool(variant) ? 4 : 2; }
};

// Plant processes a treatment's input formula reads (site-specific). Throws
// ConfigError for a treatment the site's input table has no row for.
std::vector<Plant> required_plants(InputTable table, Treatment tr);
// Union across the whole schedule, in stable enum order.
std::vector<Plant> active_plants(InputTable table, const ManagementSchedule& sched);

// Fresh carbon entering the soil this year. plant_mass is indexed by Plant and
// holds current-year dry matter (t/ha). May be negative in corner cases
// (harvested grain exceeding biomass); callers treat that as degeneracy.
double carbon_input(const SocModelSpec& spec, Treatment tr,
                    const std::array<double, kNumPlant>& plant_mass,
                    const ParameterVector& th);

// Per-step mass bookkeeping for audits and property tests.
struct StepAudit {
  double input = 0;      // I_C
  double u = 0;          // candidate BIO inflow
  double accepted = 0;   // inflow kept by the clamp
  double overflow = 0;   // inflow diverted
  double respired = 0;   // implied CO2 loss
};

// Carbon-pool transition (pools only, plants untouched). The caller supplies
// F: the mediation factor for BIO-K, exactly 1 for regular variants. eta_z may
// be null for the deterministic skeleton (zero noise). Returns false when a
// pre-noise mass goes negative or non-finite; `next` is garbage then.
bool step_carbon_pools(const SocModelSpec& spec, const ParameterVector& th, double F,
                       double input, const StateVector& prev, const double* eta_z,
                       StateVector& next, StepAudit* audit = nullptr) noexcept;

// Joint prior support indicator: every respiration fraction implied by the
// transfer proportions must be nonnegative.
bool respiration_feasible(const ParameterVector& th, ModelVariant v);

// Advance the active plants' log-scale states one year in place (kNumPlant
// array indexed by Plant; inactive slots untouched). z holds one standard
// normal per active process, in `plants` order.
void plant_step(const ParameterVector& th, const std::vector<Plant>& plants,
                const double* z, double* log_plant);
// Stationary-distribution initialization of the same layout.
void plant_init_stationary(const ParameterVector& th, const std::vector<Plant>& plants,
                           const double* z, double* log_plant);

// Sum of log-normal observation log-densities for the channels present in the
// y row (kNumChannel entries, NaN missing), on the mass scale. Plant channels
// included only when include_plant_channels. -inf for an unexplainable row
// (zero latent mass under an observed channel, NaN state).
double observation_logdensity(const SocModelSpec& spec, const StateVector& s,
                              const double* y, const ParameterVector& th,
                              bool include_plant_channels);

// One bound model: spec + active plant set. Step and init helpers shared by
// the particle kernel and the forward simulator.
class SocModel {
 public:
  SocModel(SocModelSpec spec, std::vector<Plant> plants);

  const SocModelSpec& spec() const { return spec_; }
  const std::vector<Plant>& plants() const { return plants_; }
  int n_plants() const { return int(plants_.size()); }
  // noise layout per year: [carbon pools..., plant processes...]
  int noise_dim() const { return spec_.carbon_noise_dim() + n_plants(); }

  // Initial state: carbon pools deterministic given theta (X0 prior draws live
  // in theta), plants from their stationary law via plant_z (n_plants normals,
  // may be null for the stationary mean).
  StateVector initial_state(const ParameterVector& th, int field, const double* plant_z) const;

  // Full process update into the year with treatment `tr`. z layout
  // [carbon..., plants...]; null z means zero noise. Throws NumericalError on
  // degeneracy (negative pre-noise mass).
  StateVector step(const StateVector& prev, const ParameterVector& th, Treatment tr,
                   const double* z, StepAudit* audit = nullptr) const;

  // Regular-variant trajectory constraint, checked post-noise.
  bool violates_cap(const StateVector& s) const {
    return s.bio > spec_.kappa * s.total_decomposable(spec_.variant);
  }

 private:
  SocModelSpec spec_;
  std::vector<Plant> plants_;
};

// One field's filtering problem for the particle engines. State layout:
// [pools (3 or 5, incl. IOM), violation flag, log plant states (kNumPlant,
// inactive slots unused)]. In soc_channels_only mode (the Rao-Blackwellised
// split) plants are simulated from their prior law to drive carbon input and
// only SOC channels weight the particles; all-channel mode also weights the
// plant observations.
class SocFieldKernel final : public ParticleKernel {
 public:
  SocFieldKernel(const SocModel& model, const ParameterVector& th, const Dataset& data,
                 const ManagementSchedule& sched, int field, bool soc_channels_only,
                 int n_years_override = -1);

  int state_dim() const override { return np_ + 1 + kNumPlant; }
  int noise_dim() const override { return model_->noise_dim(); }
  int n_years() const override { return ny_; }
  bool year_has_obs(int t) const override { return has_obs_[t] != 0; }
  void init(double* state, const double* z) const override;
  void step(double* state, int t, const double* z) const override;
  double log_weight(const double* state, int t) const override;
  double sort_key(const double* state) const override;

 private:
  void pack(const StateVector& s, double* state) const;
  StateVector unpack(const double* state) const;

  const SocModel* model_;
  const ParameterVector* th_;
  const Dataset* data_;
  const ManagementSchedule* sched_;
  int field_;
  bool soc_only_;
  int ny_;
  int np_;
  std::vector<Treatment> treat_;  // per year index, validated at construction
  std::vector<char> has_obs_;
};

}  // namespace socmc
