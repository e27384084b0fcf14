#include "socmc/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "socmc/rng.hpp"

namespace socmc {

namespace {
Channel channel_of(Plant p) { return Channel(int(Channel::GW) + int(p)); }

double channel_obs_var(const ParameterVector& th, Channel c) {
  switch (c) {
    case Channel::TOC: return th.sig2_e_toc;
    case Channel::POC: return th.sig2_e_poc;
    case Channel::HUM: return th.sig2_e_hum;
    case Channel::IOM: return th.sig2_e_iom;
    case Channel::GW: return th.sig2_e_gw;
    case Channel::W: return th.sig2_e_w;
    case Channel::GS: return th.sig2_e_gs;
    case Channel::S: return th.sig2_e_s;
    case Channel::P: return th.sig2_e_p;
    case Channel::G: return th.sig2_e_g;
    case Channel::Str: return th.sig2_e_str;
  }
  throw ContractViolation("unknown channel");
}

double channel_latent(const SocModelSpec& spec, const StateVector& s, Channel c) {
  switch (c) {
    case Channel::TOC: return s.toc(spec.variant);
    case Channel::POC: return s.dpm + s.bio + s.rpm;
    case Channel::HUM: return s.hum;
    case Channel::IOM: return s.iom;
    default: return std::exp(s.plant[int(c) - int(Channel::GW)]);
  }
}
}  // namespace

SyntheticData generate_synthetic(const SocModelSpec& spec, const ParameterVector& theta,
                                 const ManagementSchedule& sched, int n_years,
                                 std::uint64_t seed, const SimulateOptions& opt) {
  if (n_years < 1) throw ContractViolation("horizon must be at least one year");
  if (!respiration_feasible(theta, spec.variant))
    throw ContractViolation("theta implies negative respiration");
  const int n_fields = sched.n_fields;
  if (int(theta.x0.size()) != n_fields)
    throw ContractViolation("theta.x0 size does not match the schedule");

  SocModel model(spec, active_plants(spec.table, sched));
  const int n_plants = model.n_plants();
  const int year0 = sched.year0 - 1;  // initial-state year precedes the first treatment

  std::vector<Channel> channels = opt.channels;
  if (channels.empty()) {
    channels = {Channel::TOC, Channel::IOM};
    if (is_five_pool(spec.variant)) {
      channels.push_back(Channel::POC);
      channels.push_back(Channel::HUM);
    }
    for (Plant p : model.plants()) channels.push_back(channel_of(p));
  }
  for (Channel c : channels)
    if ((c == Channel::POC || c == Channel::HUM) && !is_five_pool(spec.variant))
      throw ContractViolation("POC/HUM channels need a five-pool variant");

  SyntheticData out;
  out.theta = theta;
  out.data = Dataset::empty(n_fields, year0, n_years);
  out.meta.n_fields = n_fields;
  out.meta.n_years = n_years;
  out.meta.year0 = year0;
  out.meta.components = is_five_pool(spec.variant)
                            ? std::vector<std::string>{"dpm", "rpm", "hum", "bio", "iom"}
                            : std::vector<std::string>{"amalgam", "bio", "iom"};
  const int npool = int(out.meta.components.size());
  out.true_states.assign(out.meta.size(), 0.0);
  out.true_plant_log.assign(std::size_t(n_fields) * n_years * std::max(n_plants, 1), 0.0);

  DetRng rng(seed);
  std::vector<double> z(std::max(model.noise_dim(), 1));

  for (int f = 0; f < n_fields; ++f) {
    for (int i = 0; i < n_plants; ++i) z[i] = rng.normal();
    StateVector s = model.initial_state(theta, f, n_plants ? z.data() : nullptr);
    for (int t = 0; t < n_years; ++t) {
      if (t > 0) {
        for (int i = 0; i < model.noise_dim(); ++i) z[i] = rng.normal();
        s = model.step(s, theta, sched.at(f, year0 + t), z.data());
      }
      const double* pools5[] = {&s.dpm, &s.rpm, &s.hum, &s.bio, &s.iom};
      const double* pools3[] = {&s.amalgam, &s.bio, &s.iom};
      for (int c = 0; c < npool; ++c)
        out.true_states[out.meta.index(f, t, c)] =
            is_five_pool(spec.variant) ? *pools5[c] : *pools3[c];
      for (int i = 0; i < n_plants; ++i)
        out.true_plant_log[(std::size_t(f) * n_years + t) * n_plants + i] =
            s.plant[int(model.plants()[i])];

      bool observed;
      if (!opt.observed_years.empty())
        observed = std::find(opt.observed_years.begin(), opt.observed_years.end(), t) !=
                   opt.observed_years.end();
      else
        observed = rng.u01() < opt.obs_sparsity;
      for (Channel c : channels) {
        const double zz = rng.normal();  // drawn regardless so the mask cannot shift the stream
        if (!observed) continue;
        const double latent = channel_latent(spec, s, c);
        if (!(latent > 0)) continue;  // nothing measurable this year
        out.data.set(f, t, c, std::exp(std::log(latent) + std::sqrt(channel_obs_var(theta, c)) * zz));
      }
    }
  }
  return out;
}

ManagementSchedule rotation_schedule(InputTable table, int n_fields, int year0, int n_years) {
  ManagementSchedule sched =
      ManagementSchedule::uniform(n_fields, year0, n_years, Treatment::WheatGrain);
  // staggered phases; one shared fallow year mid-horizon
  const Treatment tarlee[3][4] = {
      {Treatment::WheatGrain, Treatment::Pasture, Treatment::WheatGrain, Treatment::PastureHay},
      {Treatment::Pasture, Treatment::WheatGrain, Treatment::WheatHay, Treatment::Pasture},
      {Treatment::WheatGrain, Treatment::WheatGrain, Treatment::Pasture, Treatment::Pasture},
  };
  const Treatment brigalow[3][4] = {
      {Treatment::SorghumGrain, Treatment::SorghumGrain, Treatment::SorghumHay,
       Treatment::WheatGrain},
      {Treatment::SorghumGrain, Treatment::WheatGrain, Treatment::SorghumGrain,
       Treatment::SorghumGrain},
      {Treatment::WheatHay, Treatment::SorghumGrain, Treatment::SorghumGrain,
       Treatment::SorghumHay},
  };
  for (int f = 0; f < n_fields; ++f)
    for (int t = 0; t < n_years; ++t) {
      Treatment tr = Treatment::WheatGrain;  // Rothamsted: continuous wheat
      if (table == InputTable::Tarlee) tr = tarlee[f % 3][(t + f) % 4];
      if (table == InputTable::Brigalow) tr = brigalow[f % 3][(t + f) % 4];
      sched.set(f, year0 + t, tr);
    }
  if (n_years > 2) {
    const int fallow = year0 + n_years / 2;
    for (int f = 0; f < n_fields; ++f) sched.set(f, fallow, Treatment::Fallow);
  }
  return sched;
}

}  // namespace socmc
