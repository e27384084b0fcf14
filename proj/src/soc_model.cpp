#include "socmc/soc_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ArParams {
  double mu, rho, sig;
};

ArParams ar_params(const ParameterVector& th, Plant p) {
  switch (p) {
    case Plant::GW: return {th.mu_gw, th.rho_gw, std::sqrt(th.sig2_gw)};
    case Plant::GS: return {th.mu_gs, th.rho_gs, std::sqrt(th.sig2_gs)};
    case Plant::P: return {th.mu_p, th.rho_p, std::sqrt(th.sig2_p)};
    case Plant::G: return {th.mu_g, th.rho_g, std::sqrt(th.sig2_g)};
    case Plant::Str: return {th.mu_str, th.rho_str, std::sqrt(th.sig2_str)};
    default: throw ContractViolation("not an autoregressive plant process");
  }
}

}  // namespace

std::vector<Plant> required_plants(InputTable table, Treatment tr) {
  if (tr == Treatment::Fallow || tr == Treatment::Cleared) return {};
  if (table == InputTable::Rothamsted) {
    if (tr == Treatment::WheatGrain) return {Plant::G, Plant::Str};
    throw ConfigError("input table Rothamsted has no formula for treatment " + to_string(tr));
  }
  switch (tr) {
    case Treatment::WheatGrain:
    case Treatment::WheatHay:
      return {Plant::GW, Plant::W};
    case Treatment::Pasture:
    case Treatment::PastureHay:
      if (table == InputTable::Brigalow)
        throw ConfigError("input table Brigalow has no formula for treatment " + to_string(tr));
      return {Plant::P};
    case Treatment::SorghumGrain:
    case Treatment::SorghumHay:
      if (table == InputTable::Tarlee)
        throw ConfigError("input table Tarlee has no formula for treatment " + to_string(tr));
      return {Plant::GS, Plant::S};
    default:
      throw ConfigError("no input formula for treatment " + to_string(tr));
  }
}

std::vector<Plant> active_plants(InputTable table, const ManagementSchedule& sched) {
  std::set<int> seen;
  for (Treatment tr : sched.treatments)
    for (Plant p : required_plants(table, tr)) seen.insert(int(p));
  std::vector<Plant> out;
  for (int i = 0; i < kNumPlant; ++i)
    if (seen.count(i)) out.push_back(Plant(i));
  return out;
}

double carbon_input(const SocModelSpec& spec, Treatment tr,
                    const std::array<double, kNumPlant>& m, const ParameterVector& th) {
  const double c = th.c;
  switch (tr) {
    case Treatment::Fallow:
      return 0.0;
    case Treatment::Cleared:
      return spec.cleared_input;
    case Treatment::WheatGrain:
      if (spec.table == InputTable::Rothamsted)
        return c * m[int(Plant::Str)] + c * th.r_w * (m[int(Plant::G)] + m[int(Plant::Str)]);
      return c * (m[int(Plant::W)] - m[int(Plant::GW)]) + c * th.r_w * m[int(Plant::W)];
    case Treatment::WheatHay:
      return c * th.p_hay * m[int(Plant::W)] + c * th.r_w * m[int(Plant::W)];
    case Treatment::Pasture:
      return c * m[int(Plant::P)] + c * th.r_p * m[int(Plant::P)];
    case Treatment::PastureHay:
      return c * th.p_hay * m[int(Plant::P)] + c * th.r_p * m[int(Plant::P)];
    case Treatment::SorghumGrain:
      return c * (m[int(Plant::S)] - m[int(Plant::GS)]) + c * th.r_s * m[int(Plant::S)];
    case Treatment::SorghumHay:
      return c * th.p_hay * m[int(Plant::S)] + c * th.r_s * m[int(Plant::S)];
  }
  throw ConfigError("no input formula for treatment");
}

bool step_carbon_pools(const SocModelSpec& spec, const ParameterVector& th, double F,
                       double input, const StateVector& prev, const double* eta_z,
                       StateVector& next, StepAudit* audit) noexcept {
  const double dt = spec.delta_t;
  next = prev;  // carries iom and any plant fields through

  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  auto noise = [&](int k) { return eta_z ? eta_z[k] : 0.0; };

  if (!is_five_pool(spec.variant)) {
    const double sc = std::exp(-th.k_c * F * dt);
    const double sb = std::exp(-th.k_b * F * dt);
    const double dec_c = prev.amalgam * (1.0 - sc);
    const double dec_b = prev.bio * (1.0 - sb);
    const double u = dec_c * th.pi_cb + dec_b * th.pi_bb;
    const double total = prev.amalgam + prev.bio;
    if (!finite_nonneg(u)) return false;
    const auto [accepted, overflow] = clamp_bio_inflow(u, total, prev.bio, spec.kappa);

    const double pre_c = prev.amalgam * sc + input + th.pi_bc * overflow + dec_b * th.pi_bc;
    const double pre_b = prev.bio * sb + accepted;
    if (!finite_nonneg(pre_c) || !finite_nonneg(pre_b)) return false;

    next.amalgam = pre_c * std::exp(std::sqrt(th.sig2_eta_c) * noise(0));
    next.bio = pre_b * std::exp(std::sqrt(th.sig2_eta_b) * noise(1));
    if (audit) {
      audit->input = input;
      audit->u = u;
      audit->accepted = accepted;
      audit->overflow = overflow;
      audit->respired = dec_c * (1.0 - th.pi_cb) + dec_b * (1.0 - th.pi_bb - th.pi_bc) +
                        (1.0 - th.pi_bc) * overflow;
    }
    return true;
  }

  // five-pool: DPM's survival term carries no F as written; its transfer basis
  // does. The min() keeps transfers within the mass actually leaving the pool
  // when F > 1 (mediate_dpm_decay removes the mismatch altogether).
  const double sd = spec.mediate_dpm_decay ? std::exp(-th.k_d * F * dt) : std::exp(-th.k_d * dt);
  const double basis_d = std::min(1.0 - std::exp(-th.k_d * F * dt), 1.0 - sd);
  const double sr = std::exp(-th.k_r * F * dt);
  const double sh = std::exp(-th.k_h * F * dt);
  const double sb = std::exp(-th.k_b * F * dt);

  const double dec_d = prev.dpm * basis_d;
  const double dec_r = prev.rpm * (1.0 - sr);
  const double dec_h = prev.hum * (1.0 - sh);
  const double dec_b = prev.bio * (1.0 - sb);
  const double u = dec_d * th.pi_db + dec_r * th.pi_rb + dec_h * th.pi_hb + dec_b * th.pi_bb;
  const double total = prev.dpm + prev.rpm + prev.hum + prev.bio;
  if (!finite_nonneg(u)) return false;
  const auto [accepted, overflow] = clamp_bio_inflow(u, total, prev.bio, spec.kappa);

  const double pre_d = prev.dpm * sd + th.p_d * input;
  const double pre_r = prev.rpm * sr + (1.0 - th.p_d) * input;
  const double pre_h = prev.hum * sh + dec_d * th.pi_dh + dec_r * th.pi_rh + dec_h * th.pi_hh +
                       dec_b * th.pi_bh + th.pi_bh * overflow;
  const double pre_b = prev.bio * sb + accepted;
  if (!finite_nonneg(pre_d) || !finite_nonneg(pre_r) || !finite_nonneg(pre_h) ||
      !finite_nonneg(pre_b))
    return false;

  next.dpm = pre_d * std::exp(std::sqrt(th.sig2_eta_d) * noise(0));
  next.rpm = pre_r * std::exp(std::sqrt(th.sig2_eta_r) * noise(1));
  next.hum = pre_h * std::exp(std::sqrt(th.sig2_eta_h) * noise(2));
  next.bio = pre_b * std::exp(std::sqrt(th.sig2_eta_b) * noise(3));
  if (audit) {
    audit->input = input;
    audit->u = u;
    audit->accepted = accepted;
    audit->overflow = overflow;
    // DPM's outflow beyond the transfer basis respires as well
    audit->respired = prev.dpm * (1.0 - sd) - dec_d * (th.pi_dh + th.pi_db) +
                      dec_r * (1.0 - th.pi_rh - th.pi_rb) + dec_h * (1.0 - th.pi_hh - th.pi_hb) +
                      dec_b * (1.0 - th.pi_bh - th.pi_bb) + (1.0 - th.pi_bh) * overflow;
  }
  return true;
}

bool respiration_feasible(const ParameterVector& th, ModelVariant v) {
  auto frac = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!is_five_pool(v)) {
    return frac(th.pi_cb) && frac(th.pi_bb) && frac(th.pi_bc) && th.pi_bb + th.pi_bc <= 1.0;
  }
  return frac(th.pi_dh) && frac(th.pi_db) && frac(th.pi_rh) && frac(th.pi_rb) &&
         frac(th.pi_hh) && frac(th.pi_hb) && frac(th.pi_bh) && frac(th.pi_bb) &&
         th.pi_dh + th.pi_db <= 1.0 && th.pi_rh + th.pi_rb <= 1.0 &&
         th.pi_hh + th.pi_hb <= 1.0 && th.pi_bh + th.pi_bb <= 1.0;
}

void plant_step(const ParameterVector& th, const std::vector<Plant>& plants, const double* z,
                double* lp) {
  int k = 0;
  for (Plant p : plants) {
    const double zk = z ? z[k] : 0.0;
    ++k;
    if (p == Plant::W) {
      lp[int(Plant::W)] = std::log(th.h_w) + lp[int(Plant::GW)] + std::sqrt(th.sig2_w) * zk;
    } else if (p == Plant::S) {
      lp[int(Plant::S)] = std::log(th.h_s) + lp[int(Plant::GS)] + std::sqrt(th.sig2_s) * zk;
    } else {
      const ArParams a = ar_params(th, p);
      lp[int(p)] = a.mu * (1.0 - a.rho) + a.rho * lp[int(p)] + a.sig * zk;
    }
  }
}

void plant_init_stationary(const ParameterVector& th, const std::vector<Plant>& plants,
                           const double* z, double* lp) {
  int k = 0;
  for (Plant p : plants) {
    const double zk = z ? z[k] : 0.0;
    ++k;
    if (p == Plant::W) {
      lp[int(Plant::W)] = std::log(th.h_w) + lp[int(Plant::GW)] + std::sqrt(th.sig2_w) * zk;
    } else if (p == Plant::S) {
      lp[int(Plant::S)] = std::log(th.h_s) + lp[int(Plant::GS)] + std::sqrt(th.sig2_s) * zk;
    } else {
      const ArParams a = ar_params(th, p);
      const double sd0 = a.sig / std::sqrt(1.0 - a.rho * a.rho);
      lp[int(p)] = a.mu + sd0 * zk;
    }
  }
}

double observation_logdensity(const SocModelSpec& spec, const StateVector& s, const double* y,
                              const ParameterVector& th, bool include_plant_channels) {
  const bool five = is_five_pool(spec.variant);
  double ll = 0.0;
  bool ok = true;
  auto add_ln = [&](Channel ch, double mass, double var) {
    const double yv = y[int(ch)];
    if (std::isnan(yv)) return;
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      ok = false;
      return;
    }
    ll += lognorm_logpdf(yv, std::log(mass), var);
  };

  if (five) {
    add_ln(Channel::TOC, s.dpm + s.iom + s.bio + s.rpm + s.hum, th.sig2_e_toc);
    add_ln(Channel::POC, s.dpm + s.bio + s.rpm, th.sig2_e_poc);
    add_ln(Channel::HUM, s.hum, th.sig2_e_hum);
  } else {
    add_ln(Channel::TOC, s.amalgam + s.iom + s.bio, th.sig2_e_toc);
  }
  add_ln(Channel::IOM, s.iom, th.sig2_e_iom);
  if (include_plant_channels) {
    add_ln(Channel::GW, s.plant[int(Plant::GW)], th.sig2_e_gw);
    add_ln(Channel::W, s.plant[int(Plant::W)], th.sig2_e_w);
    add_ln(Channel::GS, s.plant[int(Plant::GS)], th.sig2_e_gs);
    add_ln(Channel::S, s.plant[int(Plant::S)], th.sig2_e_s);
    add_ln(Channel::P, s.plant[int(Plant::P)], th.sig2_e_p);
    add_ln(Channel::G, s.plant[int(Plant::G)], th.sig2_e_g);
    add_ln(Channel::Str, s.plant[int(Plant::Str)], th.sig2_e_str);
  }
  return ok ? ll : kNegInf;
}

SocModel::SocModel(SocModelSpec spec, std::vector<Plant> plants)
    : spec_(spec), plants_(std::move(plants)) {
  if (!(spec_.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(spec_.delta_t > 0.0)) throw ConfigError("delta_t must be positive");
  if (spec_.bio_init_fraction < 0.0 || spec_.bio_init_fraction > 1.0)
    throw ConfigError("bio_init_fraction must lie in [0,1]");
  const double split_sum =
      spec_.five_pool_split[0] + spec_.five_pool_split[1] + spec_.five_pool_split[2];
  if (is_five_pool(spec_.variant) && std::abs(split_sum - 1.0) > 1e-9)
    throw ConfigError("five_pool_split must sum to 1");
  if (!std::is_sorted(plants_.begin(), plants_.end()))
    throw ConfigError("plant list must be in enum order");
  auto has = [&](Plant p) { return std::find(plants_.begin(), plants_.end(), p) != plants_.end(); };
  if (has(Plant::W) && !has(Plant::GW))
    throw ConfigError("wheat biomass requires the wheat grain process");
  if (has(Plant::S) && !has(Plant::GS))
    throw ConfigError("sorghum biomass requires the sorghum grain process");
}

StateVector SocModel::initial_state(const ParameterVector& th, int field,
                                    const double* plant_z) const {
  if (field < 0 || field >= int(th.x0.size()))
    throw ContractViolation("initial_state: field has no initial stock");
  const double x0 = th.x0[field];
  StateVector s;
  s.iom = th.m_iom;
  if (is_five_pool(spec_.variant)) {
    s.dpm = spec_.five_pool_split[0] * x0;
    s.rpm = spec_.five_pool_split[1] * x0;
    s.hum = spec_.five_pool_split[2] * x0;
  } else {
    s.amalgam = x0;
  }
  s.bio = spec_.bio_init_fraction * spec_.kappa * x0;
  std::array<double, kNumPlant> lp{};
  plant_init_stationary(th, plants_, plant_z, lp.data());
  for (Plant p : plants_) s.plant[int(p)] = std::exp(lp[int(p)]);
  return s;
}

StateVector SocModel::step(const StateVector& prev, const ParameterVector& th, Treatment tr,
                           const double* z, StepAudit* audit) const {
  std::array<double, kNumPlant> lp{};
  for (Plant p : plants_) {
    if (!(prev.plant[int(p)] > 0.0))
      throw NumericalError("process step: nonpositive plant mass");
    lp[int(p)] = std::log(prev.plant[int(p)]);
  }
  plant_step(th, plants_, z ? z + spec_.carbon_noise_dim() : nullptr, lp.data());

  std::array<double, kNumPlant> mass{};
  for (Plant p : plants_) mass[int(p)] = std::exp(lp[int(p)]);
  const double input = carbon_input(spec_, tr, mass, th);

  const double F =
      is_biok(spec_.variant) ? decay_mediation_factor(prev, spec_.variant, spec_.kappa) : 1.0;
  StateVector next;
  if (!step_carbon_pools(spec_, th, F, input, prev, z, next, audit))
    throw NumericalError("process step: negative pre-noise mass");
  for (Plant p : plants_) next.plant[int(p)] = mass[int(p)];
  return next;
}

SocFieldKernel::SocFieldKernel(const SocModel& model, const ParameterVector& th,
                               const Dataset& data, const ManagementSchedule& sched, int field,
                               bool soc_channels_only, int n_years_override)
    : model_(&model),
      th_(&th),
      data_(&data),
      sched_(&sched),
      field_(field),
      soc_only_(soc_channels_only),
      ny_(n_years_override > 0 ? n_years_override : data.n_years),
      np_(model.spec().n_pools()) {
  if (field_ < 0 || field_ >= data.n_fields) throw ContractViolation("kernel: field out of range");
  if (ny_ > data.n_years) throw ContractViolation("kernel: horizon exceeds dataset");
  treat_.resize(ny_, Treatment::Fallow);
  for (int t = 1; t < ny_; ++t) {
    treat_[t] = sched.at(field_, data.year0 + t);
    // validates the treatment/table combination and plant coverage up front
    for (Plant p : required_plants(model.spec().table, treat_[t]))
      if (std::find(model.plants().begin(), model.plants().end(), p) == model.plants().end())
        throw ConfigError("treatment " + to_string(treat_[t]) +
                          " needs an inactive plant process");
  }
  const bool five = is_five_pool(model.spec().variant);
  has_obs_.assign(ny_, 0);
  for (int t = 0; t < ny_; ++t) {
    const double* y = data.row(field_, t);
    bool any = false;
    for (int c = 0; c < kNumChannel; ++c) {
      if (std::isnan(y[c])) continue;
      const Channel ch = Channel(c);
      if (is_plant_channel(ch)) {
        if (!soc_only_) any = true;
      } else if (ch == Channel::TOC || ch == Channel::IOM ||
                 (five && (ch == Channel::POC || ch == Channel::HUM))) {
        any = true;
      }
    }
    has_obs_[t] = any ? 1 : 0;
  }
}

void SocFieldKernel::pack(const StateVector& s, double* state) const {
  if (np_ == 5) {
    state[0] = s.dpm;
    state[1] = s.rpm;
    state[2] = s.hum;
    state[3] = s.bio;
    state[4] = s.iom;
  } else {
    state[0] = s.amalgam;
    state[1] = s.bio;
    state[2] = s.iom;
  }
}

StateVector SocFieldKernel::unpack(const double* state) const {
  StateVector s;
  if (np_ == 5) {
    s.dpm = state[0];
    s.rpm = state[1];
    s.hum = state[2];
    s.bio = state[3];
    s.iom = state[4];
  } else {
    s.amalgam = state[0];
    s.bio = state[1];
    s.iom = state[2];
  }
  return s;
}

void SocFieldKernel::init(double* state, const double* z) const {
  const int cn = model_->spec().carbon_noise_dim();
  double* lp = state + np_ + 1;
  std::fill(lp, lp + kNumPlant, 0.0);
  plant_init_stationary(*th_, model_->plants(), z + cn, lp);
  StateVector s;
  const double x0 = (*th_).x0[field_];
  s.iom = th_->m_iom;
  if (np_ == 5) {
    s.dpm = model_->spec().five_pool_split[0] * x0;
    s.rpm = model_->spec().five_pool_split[1] * x0;
    s.hum = model_->spec().five_pool_split[2] * x0;
  } else {
    s.amalgam = x0;
  }
  s.bio = model_->spec().bio_init_fraction * model_->spec().kappa * x0;
  pack(s, state);
  state[np_] = 0.0;  // cap-violation flag
}

void SocFieldKernel::step(double* state, int t, const double* z) const {
  if (std::isnan(state[0])) return;  // degenerate particle stays degenerate
  const SocModelSpec& spec = model_->spec();
  const int cn = spec.carbon_noise_dim();
  double* lp = state + np_ + 1;
  plant_step(*th_, model_->plants(), z + cn, lp);

  std::array<double, kNumPlant> mass{};
  for (Plant p : model_->plants()) mass[int(p)] = std::exp(lp[int(p)]);
  const double input = carbon_input(spec, treat_[t], mass, *th_);

  const StateVector prev = unpack(state);
  double F = 1.0;
  if (is_biok(spec.variant)) {
    const double total = prev.total_decomposable(spec.variant);
    if (!(total > 0.0)) {
      state[0] = kNaN;
      return;
    }
    F = prev.bio / (total * spec.kappa);
  }
  StateVector next;
  if (!step_carbon_pools(spec, *th_, F, input, prev, z, next, nullptr)) {
    state[0] = kNaN;
    return;
  }
  pack(next, state);
  if (!is_biok(spec.variant) && model_->violates_cap(next)) state[np_] = 1.0;
}

double SocFieldKernel::log_weight(const double* state, int t) const {
  if (std::isnan(state[0])) return kNegInf;
  if (state[np_] != 0.0) return kNegInf;  // regular-variant trajectory rejection
  StateVector s = unpack(state);
  if (!soc_only_) {
    const double* lp = state + np_ + 1;
    for (Plant p : model_->plants()) s.plant[int(p)] = std::exp(lp[int(p)]);
  }
  return observation_logdensity(model_->spec(), s, data_->row(field_, t), *th_, !soc_only_);
}

double SocFieldKernel::sort_key(const double* state) const {
  return np_ == 5 ? state[0] + state[1] + state[2] + state[3] : state[0] + state[1];
}

}  // namespace socmc
