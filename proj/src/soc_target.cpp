#include "socmc/soc_target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Channel channel_of(Plant p) { return Channel(int(Channel::GW) + int(p)); }

double obs_var_of(const ParameterVector& th, Plant p) {
  switch (p) {
    case Plant::GW: return th.sig2_e_gw;
    case Plant::W: return th.sig2_e_w;
    case Plant::GS: return th.sig2_e_gs;
    case Plant::S: return th.sig2_e_s;
    case Plant::P: return th.sig2_e_p;
    case Plant::G: return th.sig2_e_g;
    case Plant::Str: return th.sig2_e_str;
  }
  throw ContractViolation("unknown plant");
}

using Member = double ParameterVector::*;
const std::map<std::string, Member>& scalar_members() {
  static const std::map<std::string, Member> m = {
      {"K_C", &ParameterVector::k_c},       {"K_D", &ParameterVector::k_d},
      {"K_R", &ParameterVector::k_r},       {"K_H", &ParameterVector::k_h},
      {"K_B", &ParameterVector::k_b},       {"pi_CB", &ParameterVector::pi_cb},
      {"pi_BB", &ParameterVector::pi_bb},   {"pi_BC", &ParameterVector::pi_bc},
      {"pi_DH", &ParameterVector::pi_dh},   {"pi_RH", &ParameterVector::pi_rh},
      {"pi_HH", &ParameterVector::pi_hh},   {"pi_BH", &ParameterVector::pi_bh},
      {"pi_DB", &ParameterVector::pi_db},   {"pi_RB", &ParameterVector::pi_rb},
      {"pi_HB", &ParameterVector::pi_hb},   {"P_D", &ParameterVector::p_d},
      {"c", &ParameterVector::c},           {"r_W", &ParameterVector::r_w},
      {"r_P", &ParameterVector::r_p},       {"r_S", &ParameterVector::r_s},
      {"p", &ParameterVector::p_hay},       {"h_W", &ParameterVector::h_w},
      {"h_S", &ParameterVector::h_s},       {"mu_GW", &ParameterVector::mu_gw},
      {"mu_GS", &ParameterVector::mu_gs},   {"mu_P", &ParameterVector::mu_p},
      {"mu_G", &ParameterVector::mu_g},     {"mu_Str", &ParameterVector::mu_str},
      {"rho_GW", &ParameterVector::rho_gw}, {"rho_GS", &ParameterVector::rho_gs},
      {"rho_P", &ParameterVector::rho_p},   {"rho_G", &ParameterVector::rho_g},
      {"rho_Str", &ParameterVector::rho_str},
      {"sig2_GW", &ParameterVector::sig2_gw}, {"sig2_GS", &ParameterVector::sig2_gs},
      {"sig2_P", &ParameterVector::sig2_p},   {"sig2_G", &ParameterVector::sig2_g},
      {"sig2_Str", &ParameterVector::sig2_str},
      {"sig2_W", &ParameterVector::sig2_w},   {"sig2_S", &ParameterVector::sig2_s},
      {"sig2_eta", &ParameterVector::sig2_eta},
      {"sig2_eta_C", &ParameterVector::sig2_eta_c},
      {"sig2_eta_B", &ParameterVector::sig2_eta_b},
      {"sig2_eta_D", &ParameterVector::sig2_eta_d},
      {"sig2_eta_R", &ParameterVector::sig2_eta_r},
      {"sig2_eta_H", &ParameterVector::sig2_eta_h},
      {"M", &ParameterVector::m_iom},
      {"sig2_e_TOC", &ParameterVector::sig2_e_toc},
      {"sig2_e_POC", &ParameterVector::sig2_e_poc},
      {"sig2_e_HUM", &ParameterVector::sig2_e_hum},
      {"sig2_e_IOM", &ParameterVector::sig2_e_iom},
      {"sig2_e_GW", &ParameterVector::sig2_e_gw}, {"sig2_e_W", &ParameterVector::sig2_e_w},
      {"sig2_e_GS", &ParameterVector::sig2_e_gs}, {"sig2_e_S", &ParameterVector::sig2_e_s},
      {"sig2_e_P", &ParameterVector::sig2_e_p},   {"sig2_e_G", &ParameterVector::sig2_e_g},
      {"sig2_e_Str", &ParameterVector::sig2_e_str},
  };
  return m;
}

struct ActiveNames {
  std::vector<std::string> free_order;  // sampling order
};

ActiveNames active_parameter_names(const SocModelSpec& spec, const std::vector<Plant>& plants,
                                   const ManagementSchedule& sched, int n_fields) {
  std::set<Treatment> treatments(sched.treatments.begin(), sched.treatments.end());
  const bool hay = treatments.count(Treatment::WheatHay) ||
                   treatments.count(Treatment::PastureHay) ||
                   treatments.count(Treatment::SorghumHay);
  auto has_plant = [&](Plant p) {
    return std::find(plants.begin(), plants.end(), p) != plants.end();
  };

  ActiveNames a;
  auto add = [&](const std::string& n) { a.free_order.push_back(n); };

  if (is_five_pool(spec.variant)) {
    for (const char* n : {"K_D", "K_R", "K_H", "K_B", "P_D"}) add(n);
    for (const char* n : {"pi_DH", "pi_RH", "pi_HH", "pi_BH", "pi_DB", "pi_RB", "pi_HB",
                          "pi_BB"})
      add(n);
    for (const char* n : {"sig2_eta_D", "sig2_eta_R", "sig2_eta_H", "sig2_eta_B"}) add(n);
  } else {
    for (const char* n : {"K_C", "K_B"}) add(n);
    for (const char* n : {"pi_CB", "pi_BB", "pi_BC"}) add(n);
    for (const char* n : {"sig2_eta_C", "sig2_eta_B"}) add(n);
  }
  add("c");
  const bool wheat_inputs = treatments.count(Treatment::WheatGrain) ||
                            treatments.count(Treatment::WheatHay);
  if (wheat_inputs) add("r_W");
  if (has_plant(Plant::P)) add("r_P");
  if (has_plant(Plant::S)) add("r_S");
  if (hay) add("p");
  for (Plant p : plants) {
    switch (p) {
      case Plant::GW: add("mu_GW"); add("rho_GW"); add("sig2_GW"); break;
      case Plant::W: add("h_W"); add("sig2_W"); break;
      case Plant::GS: add("mu_GS"); add("rho_GS"); add("sig2_GS"); break;
      case Plant::S: add("h_S"); add("sig2_S"); break;
      case Plant::P: add("mu_P"); add("rho_P"); add("sig2_P"); break;
      case Plant::G: add("mu_G"); add("rho_G"); add("sig2_G"); break;
      case Plant::Str: add("mu_Str"); add("rho_Str"); add("sig2_Str"); break;
    }
  }
  add("M");
  for (int f = 0; f < n_fields; ++f) add("X0_" + std::to_string(f + 1));
  return a;
}

ParamSpace build_space(const SocModelSpec& spec, const std::vector<Plant>& plants,
                       const ManagementSchedule& sched, int n_fields,
                       const std::map<std::string, Prior>& priors) {
  ParameterVector base;
  base.x0.assign(n_fields, 0.0);

  // fixed entries (observation variances and any overridden-to-fixed scalar)
  // land in the base vector; free entries become sampler definitions
  auto lookup = [&](const std::string& name) -> const Prior& {
    auto it = priors.find(name);
    if (it == priors.end()) throw ConfigError("no prior for parameter " + name);
    return it->second;
  };

  for (const auto& [name, member] : scalar_members()) {
    auto it = priors.find(name);
    if (it != priors.end() && it->second.fixed()) base.*member = it->second.a;
  }

  std::vector<ParamSpace::Def> defs;
  const ActiveNames active = active_parameter_names(spec, plants, sched, n_fields);
  for (const std::string& name : active.free_order) {
    const Prior& pr = lookup(name);
    if (name.rfind("X0_", 0) == 0) {
      const int f = std::stoi(name.substr(3)) - 1;
      if (pr.fixed()) {
        base.x0[f] = pr.a;
        continue;
      }
      ParamSpace::Def d;
      d.name = name;
      d.prior = pr;
      d.tf = Transform::for_prior(pr);
      d.set = [f](ParameterVector& pv, double v) { pv.x0[f] = v; };
      d.get = [f](const ParameterVector& pv) { return pv.x0[f]; };
      defs.push_back(std::move(d));
      continue;
    }
    const Member member = scalar_members().at(name);
    if (pr.fixed()) {
      base.*member = pr.a;
      continue;
    }
    ParamSpace::Def d;
    d.name = name;
    d.prior = pr;
    d.tf = Transform::for_prior(pr);
    d.set = [member](ParameterVector& pv, double v) { pv.*member = v; };
    d.get = [member](const ParameterVector& pv) { return pv.*member; };
    defs.push_back(std::move(d));
  }

  ParamSpace space(std::move(base), std::move(defs));
  const ModelVariant variant = spec.variant;
  space.set_support_indicator(
      [variant](const ParameterVector& pv) { return respiration_feasible(pv, variant); });
  return space;
}
}  // namespace

SocTarget::SocTarget(SocModelSpec spec, Dataset data, ManagementSchedule sched,
                     PriorSet prior_set, std::map<std::string, Prior> prior_overrides,
                     SocTargetOptions opt)
    : spec_(spec),
      model_(spec, active_plants(spec.table, sched)),
      data_(std::move(data)),
      sched_(std::move(sched)),
      prior_set_(prior_set),
      opt_(opt) {
  if (data_.n_fields != sched_.n_fields)
    throw ConfigError("dataset and schedule disagree on the number of fields");
  for (int t = 1; t < data_.n_years; ++t)
    if (!sched_.covers(data_.year0 + t))
      throw ConfigError("schedule does not cover year " + std::to_string(data_.year0 + t));

  if (!is_five_pool(spec_.variant) &&
      (data_.channel_used(Channel::POC) || data_.channel_used(Channel::HUM)))
    throw ConfigError("POC/HUM observations require a five-pool variant");
  for (int pi = 0; pi < kNumPlant; ++pi) {
    const Plant p = Plant(pi);
    if (data_.channel_used(channel_of(p)) &&
        std::find(model_.plants().begin(), model_.plants().end(), p) == model_.plants().end())
      throw ConfigError("dataset observes plant channel " + to_string(channel_of(p)) +
                        " but the schedule never activates that process");
  }

  priors_ = default_priors(prior_set_, data_.n_fields);
  for (const auto& [name, pr] : prior_overrides) {
    if (!priors_.count(name)) throw ConfigError("prior override for unknown parameter " + name);
    priors_[name] = pr;
  }
  space_ = build_space(spec_, model_.plants(), sched_, data_.n_fields, priors_);

  // theta-independent pieces of the Kalman part
  const int nplant = model_.n_plants();
  plant_logy_.resize(data_.n_fields);
  plant_jac_.assign(data_.n_fields, std::vector<double>(data_.n_years, 0.0));
  for (int f = 0; f < data_.n_fields; ++f) {
    plant_logy_[f] = Eigen::MatrixXd::Constant(data_.n_years, std::max(nplant, 1), kNaN);
    for (int t = 0; t < data_.n_years; ++t)
      for (int i = 0; i < nplant; ++i) {
        const Channel ch = channel_of(model_.plants()[i]);
        if (!data_.has(f, t, ch)) continue;
        const double y = data_.value(f, t, ch);
        plant_logy_[f](t, i) = std::log(y);
        plant_jac_[f][t] -= std::log(y);
      }
  }
}

StreamLayout SocTarget::stream_layout(int n_particles) const {
  return {data_.n_fields, data_.n_years, n_particles, model_.noise_dim()};
}

LinearGaussianModel SocTarget::plant_linear_model(const ParameterVector& th) const {
  const auto& plants = model_.plants();
  const int n = int(plants.size());
  LinearGaussianModel m;
  m.A = Eigen::MatrixXd::Zero(n, n);
  m.B = Eigen::MatrixXd::Identity(n, n);
  m.C = Eigen::MatrixXd::Identity(n, n);
  m.Q = Eigen::MatrixXd::Zero(n, n);
  m.R = Eigen::MatrixXd::Zero(n, n);
  m.x0 = Eigen::VectorXd::Zero(n);
  m.P0 = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  auto index_of = [&](Plant p) {
    return int(std::find(plants.begin(), plants.end(), p) - plants.begin());
  };
  for (int i = 0; i < n; ++i) {
    const Plant p = plants[i];
    m.R(i, i) = obs_var_of(th, p);
    if (p == Plant::W || p == Plant::S) {
      const Plant up = (p == Plant::W) ? Plant::GW : Plant::GS;
      const int j = index_of(up);
      const double mu = (p == Plant::W) ? th.mu_gw : th.mu_gs;
      const double rho = (p == Plant::W) ? th.rho_gw : th.rho_gs;
      const double s2_up = (p == Plant::W) ? th.sig2_gw : th.sig2_gs;
      const double s2_link = (p == Plant::W) ? th.sig2_w : th.sig2_s;
      const double logh = std::log((p == Plant::W) ? th.h_w : th.h_s);
      m.A(i, j) = rho;
      b(i) = logh + (1.0 - rho) * mu;
      m.Q(i, i) = s2_up + s2_link;
      m.Q(i, j) = m.Q(j, i) = s2_up;
      const double v_up = s2_up / (1.0 - rho * rho);
      m.x0(i) = logh + mu;
      m.P0(i, i) = v_up + s2_link;
      m.P0(i, j) = m.P0(j, i) = v_up;
    } else {
      double mu = 0, rho = 0, s2 = 0;
      switch (p) {
        case Plant::GW: mu = th.mu_gw; rho = th.rho_gw; s2 = th.sig2_gw; break;
        case Plant::GS: mu = th.mu_gs; rho = th.rho_gs; s2 = th.sig2_gs; break;
        case Plant::P: mu = th.mu_p; rho = th.rho_p; s2 = th.sig2_p; break;
        case Plant::G: mu = th.mu_g; rho = th.rho_g; s2 = th.sig2_g; break;
        case Plant::Str: mu = th.mu_str; rho = th.rho_str; s2 = th.sig2_str; break;
        default: throw ContractViolation("unexpected plant");
      }
      m.A(i, i) = rho;
      b(i) = (1.0 - rho) * mu;
      m.Q(i, i) = s2;
      m.x0(i) = mu;
      m.P0(i, i) = s2 / (1.0 - rho * rho);
    }
  }
  m.u.assign(data_.n_years, b);
  return m;
}

double SocTarget::kalman_part(const ParameterVector& th, FilterResult* acc) const {
  if (model_.n_plants() == 0) return 0.0;
  const LinearGaussianModel m = plant_linear_model(th);
  double total = 0.0;
  for (int f = 0; f < data_.n_fields; ++f) {
    const KalmanResult r = kalman_filter(m, plant_logy_[f]);
    total += r.loglik;
    double jac_total = 0.0;
    for (int t = 0; t < data_.n_years; ++t) {
      jac_total += plant_jac_[f][t];
      if (acc) acc->step_loglik[t] += r.step_loglik[t] + plant_jac_[f][t];
    }
    total += jac_total;
  }
  return total;
}

FilterResult SocTarget::log_likelihood(const ParameterVector& th, const RandomStream& stream,
                                       int n_particles) const {
  FilterResult out;
  out.step_loglik.assign(data_.n_years, 0.0);
  if (!opt_.all_channels_in_pf) out.loglik += kalman_part(th, &out);

  CorrelatedOptions copt;
  for (int f = 0; f < data_.n_fields; ++f) {
    SocFieldKernel kernel(model_, th, data_, sched_, f, !opt_.all_channels_in_pf);
    copt.field_slot = f;
    const FilterResult r = correlated_filter(kernel, n_particles, stream, copt);
    out.loglik += r.loglik;
    for (int t = 0; t < data_.n_years; ++t) out.step_loglik[t] += r.step_loglik[t];
  }
  return out;
}

std::unique_ptr<TargetModel> SocTarget::truncated(int k_obs_years) const {
  SocTargetOptions opt = opt_;
  std::map<std::string, Prior> no_overrides;  // priors_ already merged
  auto t = std::make_unique<SocTarget>(spec_, data_.truncated_to_observed(k_obs_years), sched_,
                                       prior_set_, no_overrides, opt);
  t->priors_ = priors_;
  t->space_ = build_space(t->spec_, t->model_.plants(), t->sched_, t->data_.n_fields, priors_);
  return t;
}

double SocTarget::log_one_step_predictive(const ParameterVector& th, int k_obs_years,
                                          int n_particles, std::uint64_t seed) const {
  const std::vector<int> obs = data_.observed_years();
  if (k_obs_years < 1 || k_obs_years >= int(obs.size()))
    throw ContractViolation("predictive index out of range");
  const int upto = obs[k_obs_years - 1];
  const int target = obs[k_obs_years];

  StreamLayout lay{data_.n_fields, target + 1, n_particles, model_.noise_dim()};
  DetRng rng(seed);
  const RandomStream stream = RandomStream::draw(lay, rng);

  double total = 0.0;
  if (!opt_.all_channels_in_pf && model_.n_plants() > 0) {
    const LinearGaussianModel m = plant_linear_model(th);
    for (int f = 0; f < data_.n_fields; ++f) {
      total += kalman_log_predictive(m, plant_logy_[f], upto, target);
      total += plant_jac_[f][target];
    }
  }
  for (int f = 0; f < data_.n_fields; ++f) {
    SocFieldKernel kernel(model_, th, data_, sched_, f, !opt_.all_channels_in_pf, target + 1);
    total += correlated_filter_predictive(kernel, n_particles, stream, f, upto, target);
  }
  return total;
}

TrajectoryMeta SocTarget::trajectory_meta() const {
  TrajectoryMeta meta;
  meta.n_fields = data_.n_fields;
  meta.n_years = data_.n_years;
  meta.year0 = data_.year0;
  meta.components = is_five_pool(spec_.variant)
                        ? std::vector<std::string>{"dpm", "rpm", "hum", "bio", "iom"}
                        : std::vector<std::string>{"amalgam", "bio", "iom"};
  return meta;
}

void SocTarget::sample_trajectory(const ParameterVector& th, const RandomStream& stream,
                                  int n_particles, std::vector<double>& out) const {
  const TrajectoryMeta meta = trajectory_meta();
  const int npool = int(meta.components.size());
  out.assign(meta.size(), 0.0);
  for (int f = 0; f < data_.n_fields; ++f) {
    SocFieldKernel kernel(model_, th, data_, sched_, f, !opt_.all_channels_in_pf);
    Trajectory traj;
    CorrelatedOptions copt;
    copt.field_slot = f;
    copt.trajectory = &traj;
    correlated_filter(kernel, n_particles, stream, copt);
    for (int t = 0; t < data_.n_years; ++t)
      for (int c = 0; c < npool; ++c) out[meta.index(f, t, c)] = traj.at(t)[c];
  }
}

}  // namespace socmc
