#include <doctest.h>

#include <cmath>
#include <vector>

#include "socmc/math.hpp"
#include "socmc/soc_model.hpp"
#include "socmc/soc_target.hpp"

using namespace socmc;

namespace {

ParameterVector three_pool_theta() {
  ParameterVector th;
  th.k_c = 0.2;
  th.k_b = 0.6;
  th.pi_cb = 0.3;
  th.pi_bb = 0.2;
  th.pi_bc = 0.25;
  th.c = 0.45;
  th.r_w = 0.5;
  th.r_p = 1.0;
  th.r_s = 0.5;
  th.p_hay = 0.1;
  th.h_w = 2.0;
  th.h_s = 1.5;
  th.mu_gw = 0.4;
  th.rho_gw = 0.6;
  th.sig2_gw = 0.25;
  th.sig2_w = 0.04;
  th.m_iom = 4.0;
  th.x0 = {40.0};
  return th;
}

ParameterVector five_pool_theta() {
  ParameterVector th = three_pool_theta();
  th.k_d = 10.0;
  th.k_r = 0.15;
  th.k_h = 0.02;
  th.p_d = 0.1;
  th.pi_dh = 0.2;
  th.pi_rh = 0.3;
  th.pi_hh = 0.1;
  th.pi_bh = 0.15;
  th.pi_db = 0.25;
  th.pi_rb = 0.1;
  th.pi_hb = 0.05;
  th.pi_bb = 0.2;
  return th;
}

}  // namespace

TEST_CASE("input formulas: plant requirements per site") {
  CHECK(required_plants(InputTable::Tarlee, Treatment::WheatGrain) ==
        std::vector<Plant>{Plant::GW, Plant::W});
  CHECK(required_plants(InputTable::Tarlee, Treatment::Pasture) == std::vector<Plant>{Plant::P});
  CHECK(required_plants(InputTable::Brigalow, Treatment::SorghumHay) ==
        std::vector<Plant>{Plant::GS, Plant::S});
  CHECK(required_plants(InputTable::Rothamsted, Treatment::WheatGrain) ==
        std::vector<Plant>{Plant::G, Plant::Str});
  CHECK(required_plants(InputTable::Tarlee, Treatment::Fallow).empty());
  CHECK(required_plants(InputTable::Brigalow, Treatment::Cleared).empty());

  CHECK_THROWS_AS(required_plants(InputTable::Brigalow, Treatment::Pasture), ConfigError);
  CHECK_THROWS_AS(required_plants(InputTable::Tarlee, Treatment::SorghumGrain), ConfigError);
  CHECK_THROWS_AS(required_plants(InputTable::Rothamsted, Treatment::WheatHay), ConfigError);
  CHECK_THROWS_AS(required_plants(InputTable::Rothamsted, Treatment::Pasture), ConfigError);

  auto sched = ManagementSchedule::uniform(2, 1987, 4, Treatment::WheatGrain);
  sched.set(1, 1988, Treatment::Pasture);
  sched.set(0, 1990, Treatment::Fallow);
  CHECK(active_plants(InputTable::Tarlee, sched) ==
        std::vector<Plant>{Plant::GW, Plant::W, Plant::P});
}

TEST_CASE("carbon input values by treatment") {
  SocModelSpec spec;
  ParameterVector th = three_pool_theta();
  std::array<double, kNumPlant> m{};
  m[int(Plant::W)] = 4.0;
  m[int(Plant::GW)] = 2.0;
  m[int(Plant::P)] = 3.0;
  m[int(Plant::S)] = 5.0;
  m[int(Plant::GS)] = 2.0;
  m[int(Plant::G)] = 3.0;
  m[int(Plant::Str)] = 2.0;

  // residue + root fractions of total wheat biomass
  CHECK(carbon_input(spec, Treatment::WheatGrain, m, th) == doctest::Approx(1.8));
  CHECK(carbon_input(spec, Treatment::WheatHay, m, th) == doctest::Approx(0.18 + 0.9));
  CHECK(carbon_input(spec, Treatment::Pasture, m, th) == doctest::Approx(2.7));
  CHECK(carbon_input(spec, Treatment::PastureHay, m, th) ==
        doctest::Approx(0.45 * 0.1 * 3 + 0.45 * 3));
  CHECK(carbon_input(spec, Treatment::SorghumGrain, m, th) ==
        doctest::Approx(0.45 * 3 + 0.45 * 0.5 * 5));
  CHECK(carbon_input(spec, Treatment::SorghumHay, m, th) ==
        doctest::Approx(0.45 * 0.1 * 5 + 0.45 * 0.5 * 5));
  CHECK(carbon_input(spec, Treatment::Fallow, m, th) == 0.0);

  SocModelSpec cleared = spec;
  cleared.cleared_input = 0.7;
  CHECK(carbon_input(cleared, Treatment::Cleared, m, th) == 0.7);

  SocModelSpec roth = spec;
  roth.table = InputTable::Rothamsted;
  CHECK(carbon_input(roth, Treatment::WheatGrain, m, th) ==
        doctest::Approx(0.45 * 2 + 0.45 * 0.5 * (3 + 2)));

  // harvested grain above biomass drives the input negative; not an error here
  ParameterVector neg = th;
  neg.r_w = 0.3;
  std::array<double, kNumPlant> inverted{};
  inverted[int(Plant::W)] = 4.0;
  inverted[int(Plant::GW)] = 6.0;
  CHECK(carbon_input(spec, Treatment::WheatGrain, inverted, neg) == doctest::Approx(-0.36));
}

TEST_CASE("three-pool step: hand arithmetic, audit and mass balance") {
  SocModelSpec spec;
  spec.variant = ModelVariant::ThreePoolBioK;
  ParameterVector th = three_pool_theta();
  StateVector prev;
  prev.amalgam = 39.0;
  prev.bio = 1.0;
  prev.iom = 4.0;
  const double F = decay_mediation_factor(prev, spec.variant, spec.kappa);
  CHECK(F == doctest::Approx(0.5));

  StateVector next;
  StepAudit audit;
  REQUIRE(step_carbon_pools(spec, th, F, 1.8, prev, nullptr, next, &audit));

  const double sc = std::exp(-0.2 * 0.5), sb = std::exp(-0.6 * 0.5);
  const double dec_c = 39.0 * (1 - sc), dec_b = 1.0 * (1 - sb);
  const double u = 0.3 * dec_c + 0.2 * dec_b;
  const double headroom = 0.05 * 40.0 - 1.0;  // = 1
  const double accepted = std::min(u, headroom);
  const double overflow = u - accepted;
  CHECK(audit.u == doctest::Approx(u).epsilon(1e-14));
  CHECK(audit.accepted == doctest::Approx(accepted).epsilon(1e-14));
  CHECK(audit.overflow == doctest::Approx(overflow).epsilon(1e-14));
  CHECK(audit.input == 1.8);

  CHECK(next.amalgam ==
        doctest::Approx(39.0 * sc + 1.8 + 0.25 * overflow + 0.25 * dec_b).epsilon(1e-14));
  CHECK(next.bio == doctest::Approx(sb + accepted).epsilon(1e-14));
  CHECK(next.iom == 4.0);

  // respired CO2 closes the mass budget exactly (pre-noise)
  CHECK(next.amalgam + next.bio ==
        doctest::Approx(prev.amalgam + prev.bio + 1.8 - audit.respired).epsilon(1e-12));

  // multiplicative noise scales each pool by exp(sd * z)
  ParameterVector tn = th;
  tn.sig2_eta_c = 0.09;
  tn.sig2_eta_b = 0.04;
  const double z[2] = {0.7, -1.1};
  StateVector noisy;
  REQUIRE(step_carbon_pools(spec, tn, F, 1.8, prev, z, noisy, nullptr));
  CHECK(noisy.amalgam == doctest::Approx(next.amalgam * std::exp(0.3 * 0.7)).epsilon(1e-14));
  CHECK(noisy.bio == doctest::Approx(next.bio * std::exp(0.2 * -1.1)).epsilon(1e-14));
}

TEST_CASE("three-pool step: zero mass absorbs, negative input can kill the pool") {
  SocModelSpec spec;
  spec.variant = ModelVariant::ThreePoolBioK;
  ParameterVector th = three_pool_theta();

  StateVector zero;
  zero.iom = 4.0;
  StateVector next;
  REQUIRE(step_carbon_pools(spec, th, 1.0, 0.0, zero, nullptr, next, nullptr));
  CHECK(next.amalgam == 0.0);
  CHECK(next.bio == 0.0);

  // fresh input restarts the amalgam pool but bio headroom stays zero
  REQUIRE(step_carbon_pools(spec, th, 1.0, 1.8, zero, nullptr, next, nullptr));
  CHECK(next.amalgam == doctest::Approx(1.8));
  CHECK(next.bio == 0.0);

  StateVector tiny;
  tiny.amalgam = 0.1;
  tiny.bio = 0.01;
  tiny.iom = 4.0;
  CHECK_FALSE(step_carbon_pools(spec, th, 1.0, -5.0, tiny, nullptr, next, nullptr));
}

TEST_CASE("five-pool step: hand arithmetic with the transfer-basis guard") {
  SocModelSpec spec;
  spec.variant = ModelVariant::FivePoolBioK;
  ParameterVector th = five_pool_theta();
  StateVector prev;
  prev.dpm = 1.0;
  prev.rpm = 20.0;
  prev.hum = 17.0;
  prev.bio = 2.0;
  prev.iom = 9.0;

  for (double F : {1.0, 2.0, 0.4}) {
    StateVector next;
    StepAudit audit;
    REQUIRE(step_carbon_pools(spec, th, F, 2.5, prev, nullptr, next, &audit));

    const double sd = std::exp(-th.k_d);  // survival written without F
    const double basis_d = std::min(1.0 - std::exp(-th.k_d * F), 1.0 - sd);
    const double sr = std::exp(-th.k_r * F), sh = std::exp(-th.k_h * F),
                 sb = std::exp(-th.k_b * F);
    const double dec_d = prev.dpm * basis_d, dec_r = prev.rpm * (1 - sr),
                 dec_h = prev.hum * (1 - sh), dec_b = prev.bio * (1 - sb);
    const double u =
        dec_d * th.pi_db + dec_r * th.pi_rb + dec_h * th.pi_hb + dec_b * th.pi_bb;
    const double headroom = std::max(0.05 * 40.0 - 2.0, 0.0);
    const double accepted = std::min(u, headroom), overflow = u - accepted;

    CHECK(next.dpm == doctest::Approx(prev.dpm * sd + 0.1 * 2.5).epsilon(1e-14));
    CHECK(next.rpm == doctest::Approx(prev.rpm * sr + 0.9 * 2.5).epsilon(1e-14));
    CHECK(next.hum == doctest::Approx(prev.hum * sh + dec_d * 0.2 + dec_r * 0.3 +
                                      dec_h * 0.1 + dec_b * 0.15 + 0.15 * overflow)
                          .epsilon(1e-14));
    CHECK(next.bio == doctest::Approx(prev.bio * sb + accepted).epsilon(1e-14));
    CHECK(next.iom == 9.0);

    CHECK(next.dpm + next.rpm + next.hum + next.bio ==
          doctest::Approx(40.0 + 2.5 - audit.respired).epsilon(1e-11));

    // when F > 1 the guard caps DPM's transfer basis at its actual outflow
    if (F > 1.0) CHECK(basis_d == doctest::Approx(1.0 - sd));
  }

  // mediated survival removes the basis/survival mismatch entirely
  SocModelSpec med = spec;
  med.mediate_dpm_decay = true;
  StateVector next;
  REQUIRE(step_carbon_pools(med, th, 0.3, 2.5, prev, nullptr, next, nullptr));
  CHECK(next.dpm ==
        doctest::Approx(prev.dpm * std::exp(-th.k_d * 0.3) + 0.1 * 2.5).epsilon(1e-14));
}

TEST_CASE("respiration feasibility of transfer proportions") {
  ParameterVector th = three_pool_theta();
  CHECK(respiration_feasible(th, ModelVariant::ThreePoolBioK));
  th.pi_bb = 0.8;
  th.pi_bc = 0.3;  // bio sends out more than it decomposes
  CHECK_FALSE(respiration_feasible(th, ModelVariant::ThreePool));
  th.pi_bb = -0.1;
  CHECK_FALSE(respiration_feasible(th, ModelVariant::ThreePool));

  ParameterVector f = five_pool_theta();
  CHECK(respiration_feasible(f, ModelVariant::FivePoolBioK));
  f.pi_hh = 0.7;
  f.pi_hb = 0.4;
  CHECK_FALSE(respiration_feasible(f, ModelVariant::FivePool));
}

TEST_CASE("plant processes: linked totals follow the updated grain state") {
  ParameterVector th = three_pool_theta();
  const std::vector<Plant> plants{Plant::GW, Plant::W};

  double lp[kNumPlant] = {};
  const double z0[2] = {0.8, -1.0};
  plant_init_stationary(th, plants, z0, lp);
  // stationary sd = 0.5 / sqrt(1 - 0.36) = 0.625
  CHECK(lp[int(Plant::GW)] == doctest::Approx(0.4 + 0.625 * 0.8));
  CHECK(lp[int(Plant::W)] ==
        doctest::Approx(std::log(2.0) + lp[int(Plant::GW)] + 0.2 * -1.0));

  double lp2[kNumPlant] = {};
  lp2[int(Plant::GW)] = 0.9;
  const double z1[2] = {0.2, 0.5};
  plant_step(th, plants, z1, lp2);
  CHECK(lp2[int(Plant::GW)] == doctest::Approx(0.4 * 0.4 + 0.6 * 0.9 + 0.5 * 0.2));
  CHECK(lp2[int(Plant::W)] ==
        doctest::Approx(std::log(2.0) + lp2[int(Plant::GW)] + 0.2 * 0.5));

  // null z = deterministic skeleton
  double lp3[kNumPlant] = {};
  lp3[int(Plant::GW)] = 0.9;
  plant_step(th, plants, nullptr, lp3);
  CHECK(lp3[int(Plant::GW)] == doctest::Approx(0.16 + 0.54));

  // long-run moments of the AR chain match the stationary law
  DetRng rng(3);
  const int n = 40000;
  double s = 0, s2 = 0;
  double state[kNumPlant] = {};
  double zz[2];
  plant_init_stationary(th, plants, nullptr, state);
  for (int i = 0; i < n; ++i) {
    zz[0] = rng.normal();
    zz[1] = rng.normal();
    plant_step(th, plants, zz, state);
    s += state[int(Plant::GW)];
    s2 += state[int(Plant::GW)] * state[int(Plant::GW)];
  }
  CHECK(s / n == doctest::Approx(0.4).epsilon(0.1));
  CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(0.25 / 0.64).epsilon(0.1));
}

TEST_CASE("observation log-density per channel") {
  SocModelSpec spec;
  spec.variant = ModelVariant::ThreePoolBioK;
  ParameterVector th = three_pool_theta();
  StateVector s;
  s.amalgam = 39.0;
  s.bio = 1.0;
  s.iom = 4.0;
  s.plant[int(Plant::GW)] = 2.1;

  std::array<double, kNumChannel> y;
  y.fill(std::numeric_limits<double>::quiet_NaN());
  y[int(Channel::TOC)] = 45.0;
  y[int(Channel::IOM)] = 3.8;

  const double expect = lognorm_logpdf(45.0, std::log(44.0), 0.025) +
                        lognorm_logpdf(3.8, std::log(4.0), 0.01);
  CHECK(observation_logdensity(spec, s, y.data(), th, false) == doctest::Approx(expect));

  y[int(Channel::GW)] = 2.0;
  CHECK(observation_logdensity(spec, s, y.data(), th, false) == doctest::Approx(expect));
  CHECK(observation_logdensity(spec, s, y.data(), th, true) ==
        doctest::Approx(expect + lognorm_logpdf(2.0, std::log(2.1), 0.023)));

  // an observed channel over zero latent mass cannot be explained
  StateVector bare = s;
  bare.iom = 0.0;
  CHECK(std::isinf(observation_logdensity(spec, bare, y.data(), th, false)));

  SocModelSpec five;
  five.variant = ModelVariant::FivePoolBioK;
  StateVector fs;
  fs.dpm = 1.0;
  fs.rpm = 20.0;
  fs.hum = 17.0;
  fs.bio = 2.0;
  fs.iom = 9.0;
  std::array<double, kNumChannel> fy;
  fy.fill(std::numeric_limits<double>::quiet_NaN());
  fy[int(Channel::POC)] = 24.0;
  fy[int(Channel::HUM)] = 18.0;
  // POC covers the non-humified decomposable pools
  const double fexpect = lognorm_logpdf(24.0, std::log(1.0 + 20.0 + 2.0), 0.9) +
                         lognorm_logpdf(18.0, std::log(17.0), 0.1);
  CHECK(observation_logdensity(five, fs, fy.data(), th, false) == doctest::Approx(fexpect));
}

TEST_CASE("model assembly guards") {
  SocModelSpec spec;
  CHECK_THROWS_AS(SocModel(spec, {Plant::W}), ConfigError);           // W needs GW
  CHECK_THROWS_AS(SocModel(spec, {Plant::W, Plant::GW}), ConfigError);  // enum order
  SocModelSpec bad = spec;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(SocModel(bad, {}), ConfigError);
  bad = spec;
  bad.bio_init_fraction = 1.5;
  CHECK_THROWS_AS(SocModel(bad, {}), ConfigError);
  bad = spec;
  bad.variant = ModelVariant::FivePoolBioK;
  bad.five_pool_split = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(SocModel(bad, {}), ConfigError);

  SocModel ok(spec, {Plant::GW, Plant::W});
  CHECK(ok.n_plants() == 2);
  CHECK(ok.noise_dim() == 2 + 2);

  ParameterVector th = three_pool_theta();
  th.x0 = {40.0, 60.0};
  StateVector s = ok.initial_state(th, 1, nullptr);
  CHECK(s.amalgam == 60.0);
  CHECK(s.bio == doctest::Approx(0.5 * 0.05 * 60.0));
  CHECK(s.iom == 4.0);
  CHECK(s.plant[int(Plant::GW)] == doctest::Approx(std::exp(0.4)));
  CHECK_THROWS_AS(ok.initial_state(th, 2, nullptr), ContractViolation);

  SocModelSpec fspec;
  fspec.variant = ModelVariant::FivePoolBioK;
  SocModel fm(fspec, {});
  StateVector f = fm.initial_state(th, 0, nullptr);
  CHECK(f.dpm == doctest::Approx(0.01 * 40));
  CHECK(f.rpm == doctest::Approx(0.14 * 40));
  CHECK(f.hum == doctest::Approx(0.85 * 40));
}

TEST_CASE("with the mediation factor pinned at one the variants coincide") {
  ParameterVector th = three_pool_theta();
  th.x0 = {40.0};
  SocModelSpec biok;
  biok.variant = ModelVariant::ThreePoolBioK;
  SocModelSpec reg;
  reg.variant = ModelVariant::ThreePool;
  SocModel mb(biok, {Plant::GW, Plant::W});
  SocModel mr(reg, {Plant::GW, Plant::W});

  // bio exactly at capacity -> F = 1
  StateVector prev;
  prev.amalgam = 38.0;
  prev.bio = 2.0;  // 0.05 * 40
  prev.iom = 4.0;
  prev.plant[int(Plant::GW)] = 1.5;
  prev.plant[int(Plant::W)] = 3.0;

  const double z[4] = {0.0, 0.0, 0.3, -0.2};  // zero carbon noise, live plants
  StateVector nb = mb.step(prev, th, Treatment::WheatGrain, z);
  StateVector nr = mr.step(prev, th, Treatment::WheatGrain, z);
  CHECK(nb.amalgam == doctest::Approx(nr.amalgam).epsilon(1e-12));
  CHECK(nb.bio == doctest::Approx(nr.bio).epsilon(1e-12));
  CHECK(nb.plant[int(Plant::W)] == doctest::Approx(nr.plant[int(Plant::W)]).epsilon(1e-12));

  // SocModel::step wires F = bio/(total*kappa) into the pool update
  StateVector off = prev;
  off.bio = 1.0;
  off.amalgam = 39.0;
  StateVector ns = mb.step(off, th, Treatment::Fallow, nullptr);
  StateVector direct;
  REQUIRE(step_carbon_pools(biok, th, 0.5, 0.0, off, nullptr, direct, nullptr));
  CHECK(ns.amalgam == doctest::Approx(direct.amalgam).epsilon(1e-14));
  CHECK(ns.bio == doctest::Approx(direct.bio).epsilon(1e-14));

  // nonpositive plant mass is degeneracy, not silence
  StateVector deadplant = prev;
  deadplant.plant[int(Plant::GW)] = 0.0;
  CHECK_THROWS_AS(mb.step(deadplant, th, Treatment::WheatGrain, z), NumericalError);
}

TEST_CASE("field kernel: packing, degeneracy and the sticky cap flag") {
  ParameterVector th = three_pool_theta();
  th.sig2_eta_b = 1.0;  // room for violent bio noise
  Dataset data = Dataset::empty(1, 2000, 4);
  data.set(0, 1, Channel::TOC, 43.0);
  data.set(0, 3, Channel::TOC, 41.0);
  data.set(0, 2, Channel::GW, 1.9);  // plant channel only
  auto sched = ManagementSchedule::uniform(1, 2001, 3, Treatment::Fallow);

  SocModelSpec reg;
  reg.variant = ModelVariant::ThreePool;
  SocModel model(reg, {});
  SocFieldKernel k(model, th, data, sched, 0, /*soc_channels_only=*/true);
  CHECK(k.state_dim() == 3 + 1 + kNumPlant);
  CHECK(k.noise_dim() == 2);
  CHECK(k.n_years() == 4);
  CHECK(k.year_has_obs(1));
  CHECK(!k.year_has_obs(2));  // plant-only year is the Kalman block's business
  CHECK(k.year_has_obs(3));

  std::vector<double> state(k.state_dim());
  const double z0[2] = {0.0, 0.0};
  k.init(state.data(), z0);
  CHECK(state[0] == 40.0);
  CHECK(state[1] == doctest::Approx(0.5 * 0.05 * 40.0));
  CHECK(state[2] == 4.0);
  CHECK(state[3] == 0.0);  // violation flag clear

  // a huge positive bio shock pushes past the cap: flag set, weight gone
  const double zkick[2] = {0.0, 6.0};
  k.step(state.data(), 1, zkick);
  CHECK(state[3] == 1.0);
  CHECK(std::isinf(k.log_weight(state.data(), 1)));
  // and it stays set even after quiet years
  k.step(state.data(), 2, z0);
  CHECK(state[3] == 1.0);

  // degenerate particles are absorbing
  std::vector<double> dead(k.state_dim(), 0.5);
  dead[0] = std::numeric_limits<double>::quiet_NaN();
  k.step(dead.data(), 1, z0);
  CHECK(std::isnan(dead[0]));
  CHECK(std::isinf(k.log_weight(dead.data(), 1)));

  // weight equals the observation density of the unpacked state
  std::vector<double> fresh(k.state_dim());
  k.init(fresh.data(), z0);
  StateVector s;
  s.amalgam = fresh[0];
  s.bio = fresh[1];
  s.iom = fresh[2];
  CHECK(k.log_weight(fresh.data(), 1) ==
        doctest::Approx(observation_logdensity(reg, s, data.row(0, 1), th, false)));

  CHECK_THROWS_AS(SocFieldKernel(model, th, data, sched, 1, true), ContractViolation);
  // schedule demanding a plant process the model lacks
  auto wheat = ManagementSchedule::uniform(1, 2001, 3, Treatment::WheatGrain);
  CHECK_THROWS_AS(SocFieldKernel(model, th, data, wheat, 0, true), ConfigError);
}

TEST_CASE("plant-only data: composed likelihood equals the exact filter") {
  SocModelSpec spec;
  spec.variant = ModelVariant::ThreePoolBioK;
  Dataset data = Dataset::empty(1, 1985, 6);
  data.set(0, 2, Channel::GW, 1.7);
  data.set(0, 4, Channel::W, 3.1);
  data.set(0, 4, Channel::GW, 1.4);
  auto sched = ManagementSchedule::uniform(1, 1986, 5, Treatment::WheatGrain);

  SocTarget target(spec, data, sched, PriorSet::Tarlee);
  DetRng rng(17);
  const auto z = target.param_space().sample_z(rng);
  const ParameterVector th = target.param_space().natural(z);

  const int N = 16;
  auto lay = target.stream_layout(N);
  DetRng srng(5);
  const auto stream = RandomStream::draw(lay, srng);
  const auto r = target.log_likelihood(th, stream, N);

  // oracle: Kalman filter over the log observations plus the change of scale
  const auto m = target.plant_linear_model(th);
  Eigen::MatrixXd Y(6, m.obs_dim());
  Y.setConstant(std::numeric_limits<double>::quiet_NaN());
  // active plants on this schedule: GW then W
  Y(2, 0) = std::log(1.7);
  Y(4, 0) = std::log(1.4);
  Y(4, 1) = std::log(3.1);
  const double jac = -(std::log(1.7) + std::log(1.4) + std::log(3.1));
  const double expect = kalman_filter(m, Y).loglik + jac;
  CHECK(r.loglik == doctest::Approx(expect).epsilon(1e-10));

  // per-year pieces live where the observations are
  CHECK(r.step_loglik[0] == 0.0);
  CHECK(r.step_loglik[2] != 0.0);
  CHECK(r.step_loglik[4] != 0.0);
  double sum = 0;
  for (double v : r.step_loglik) sum += v;
  CHECK(sum == doctest::Approx(r.loglik));
}

TEST_CASE("plant block moments: linked biomass row") {
  SocModelSpec spec;
  Dataset data = Dataset::empty(1, 1985, 3);
  data.set(0, 1, Channel::W, 2.0);
  auto sched = ManagementSchedule::uniform(1, 1986, 2, Treatment::WheatGrain);
  SocTarget target(spec, data, sched, PriorSet::Tarlee);

  ParameterVector th = three_pool_theta();
  const auto m = target.plant_linear_model(th);
  REQUIRE(m.state_dim() == 2);  // GW chain + linked W
  const int gw = 0, w = 1;
  CHECK(m.A(gw, gw) == doctest::Approx(th.rho_gw));
  CHECK(m.A(w, gw) == doctest::Approx(th.rho_gw));
  CHECK(m.Q(gw, gw) == doctest::Approx(th.sig2_gw));
  CHECK(m.Q(w, w) == doctest::Approx(th.sig2_gw + th.sig2_w));
  CHECK(m.Q(w, gw) == doctest::Approx(th.sig2_gw));
  // stationary start
  const double var0 = th.sig2_gw / (1 - th.rho_gw * th.rho_gw);
  CHECK(m.P0(gw, gw) == doctest::Approx(var0));
  CHECK(m.P0(w, gw) == doctest::Approx(var0));
  CHECK(m.x0[gw] == doctest::Approx(th.mu_gw));
  CHECK(m.x0[w] == doctest::Approx(std::log(th.h_w) + th.mu_gw));
}
