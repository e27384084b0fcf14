#include "socmc/cpm.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "socmc/math.hpp"

namespace socmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_vec(std::ostream& os, const char* tag, const std::vector<double>& x) {
  os << tag << ' ' << x.size();
  for (double v : x) os << ' ' << fmt17(v);
  os << '\n';
}

void expect_tag(std::istream& is, const char* tag) {
  std::string s;
  is >> s;
  if (s != tag) throw ConfigError(std::string("checkpoint: expected '") + tag + "' got '" + s + "'");
}

std::vector<double> read_vec(std::istream& is, const char* tag) {
  expect_tag(is, tag);
  std::size_t n;
  is >> n;
  std::vector<double> x(n);
  for (auto& v : x) is >> v;
  if (!is) throw ConfigError("checkpoint: truncated vector " + std::string(tag));
  return x;
}

// everything the loop carries between iterations
struct ChainState {
  DetRng rng;
  RandomStream stream;
  std::vector<double> z;
  double loglik = 0, logprior = 0;
  std::vector<double> step_loglik;
  double log_scale = 0;
  std::vector<double> precond;  // fixed per-component proposal scales
  int iter = 0;                 // completed iterations
  ChainOutput out;
};

void write_checkpoint(const std::string& path, const ChainState& s) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw ConfigError("cannot write checkpoint " + tmp);
    os << "socmc_ckpt 1\n";
    os << "params " << s.out.param_names.size();
    for (const auto& n : s.out.param_names) os << ' ' << n;
    os << '\n';
    os << "chain_seed " << s.out.chain_seed << '\n';
    os << "iter " << s.iter << '\n';
    os << "log_scale " << fmt17(s.log_scale) << '\n';
    write_vec(os, "precond", s.precond);
    write_vec(os, "z", s.z);
    os << "loglik " << fmt17(s.loglik) << '\n';
    os << "logprior " << fmt17(s.logprior) << '\n';
    write_vec(os, "stepll", s.step_loglik);
    write_vec(os, "u", s.stream.u);
    write_vec(os, "v", s.stream.v);
    os << "counts " << s.out.n_accept << ' ' << s.out.n_reject << ' ' << s.out.n_degenerate
       << '\n';
    write_vec(os, "trace", s.out.loglik_trace);
    os << "ndraws " << s.out.draws.size() << '\n';
    for (const Draw& d : s.out.draws) {
      write_vec(os, "dz", d.z);
      os << "dll " << fmt17(d.loglik) << '\n';
      write_vec(os, "dstep", d.step_loglik);
      write_vec(os, "dtraj", d.trajectory);
    }
    os << "rng " << s.rng.serialize() << '\n';
    os << "end\n";
    if (!os) throw ConfigError("failed writing checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void read_checkpoint(const std::string& path, const TargetModel& target,
                     const SamplerConfig& cfg, ChainState& s) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path);
  expect_tag(is, "socmc_ckpt");
  int version;
  is >> version;
  if (version != 1) throw ConfigError("unsupported checkpoint version");

  expect_tag(is, "params");
  std::size_t np;
  is >> np;
  const std::vector<std::string> names = target.param_space().names();
  if (np != names.size()) throw ConfigError("checkpoint parameter count mismatch");
  for (std::size_t j = 0; j < np; ++j) {
    std::string n;
    is >> n;
    if (n != names[j]) throw ConfigError("checkpoint parameter name mismatch: " + n);
  }
  s.out.param_names = names;

  expect_tag(is, "chain_seed");
  is >> s.out.chain_seed;
  expect_tag(is, "iter");
  is >> s.iter;
  expect_tag(is, "log_scale");
  is >> s.log_scale;
  s.precond = read_vec(is, "precond");
  s.z = read_vec(is, "z");
  expect_tag(is, "loglik");
  is >> s.loglik;
  expect_tag(is, "logprior");
  is >> s.logprior;
  s.step_loglik = read_vec(is, "stepll");

  const StreamLayout lay = target.stream_layout(cfg.n_particles);
  s.stream.layout = lay;
  s.stream.u = read_vec(is, "u");
  s.stream.v = read_vec(is, "v");
  if (s.stream.u.size() != lay.u_size() || s.stream.v.size() != lay.v_size())
    throw ConfigError("checkpoint stream size does not match the configured run");
  if (s.z.size() != np || s.precond.size() != np)
    throw ConfigError("checkpoint state size mismatch");

  expect_tag(is, "counts");
  is >> s.out.n_accept >> s.out.n_reject >> s.out.n_degenerate;
  s.out.loglik_trace = read_vec(is, "trace");
  expect_tag(is, "ndraws");
  std::size_t nd;
  is >> nd;
  s.out.draws.resize(nd);
  for (auto& d : s.out.draws) {
    d.z = read_vec(is, "dz");
    expect_tag(is, "dll");
    is >> d.loglik;
    d.step_loglik = read_vec(is, "dstep");
    d.trajectory = read_vec(is, "dtraj");
  }
  expect_tag(is, "rng");
  std::string line;
  std::getline(is, line);  // engine state fills the rest of the line
  if (!line.empty() && line.front() == ' ') line.erase(0, 1);
  s.rng.deserialize(line);
  expect_tag(is, "end");
  if (!is) throw ConfigError("checkpoint truncated: " + path);
}

// fixed diagonal preconditioner: per-component prior spread on the z scale,
// estimated once from prior draws with a seed derived from the chain seed
std::vector<double> prior_z_scales(const ParamSpace& space, std::uint64_t chain_seed) {
  const int d = space.size();
  std::vector<double> sd(d, 1.0);
  if (d == 0) return sd;
  DetRng rng(derive_seed(chain_seed, 0x9e3779b97f4a7c15ull));
  const int n = 256;
  std::vector<std::vector<double>> zs(n);
  for (auto& z : zs) z = space.sample_z(rng);
  for (int j = 0; j < d; ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = zs[i][j];
    const double v = sample_variance(col);
    sd[j] = (std::isfinite(v) && v > 0) ? std::sqrt(v) : 1.0;
  }
  return sd;
}
}  // namespace

void SamplerConfig::validate() const {
  if (!(tau >= 0.0 && tau < 1.0))
    throw ConfigError("stream autocorrelation must lie in [0,1); tau=1 never refreshes the "
                      "estimator noise and the chain is not ergodic");
  if (iterations <= 0) throw ConfigError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw ConfigError("burn-in must be in [0, iterations)");
  if (thin <= 0) throw ConfigError("thin must be positive");
  if (n_particles <= 0) throw ConfigError("n_particles must be positive");
  if (n_chains <= 0) throw ConfigError("n_chains must be positive");
  if (!(init_scale > 0)) throw ConfigError("init_scale must be positive");
  if (!(accept_target > 0 && accept_target < 1))
    throw ConfigError("accept_target must be in (0,1)");
  if (max_init_attempts <= 0) throw ConfigError("max_init_attempts must be positive");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (stop_after < 0) throw ConfigError("stop_after must be >= 0");
}

std::vector<double> ChainOutput::param_z(int j) const {
  std::vector<double> col(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) col[i] = draws[i].z[j];
  return col;
}

ChainOutput run_chain(const TargetModel& target, const SamplerConfig& cfg,
                      std::uint64_t chain_seed) {
  cfg.validate();
  const ParamSpace& space = target.param_space();
  const int d = space.size();
  const StreamLayout lay = target.stream_layout(cfg.n_particles);

  ChainState s;
  const bool resuming =
      !cfg.checkpoint_path.empty() && std::filesystem::exists(cfg.checkpoint_path);
  if (resuming) {
    read_checkpoint(cfg.checkpoint_path, target, cfg, s);
  } else {
    s.rng = DetRng(chain_seed);
    s.out.param_names = space.names();
    s.out.chain_seed = chain_seed;
    s.log_scale = std::log(cfg.init_scale);
    s.precond = prior_z_scales(space, chain_seed);

    // starting point: prior draws until the likelihood evaluates finite
    bool ok = false;
    for (int attempt = 0; attempt < cfg.max_init_attempts && !ok; ++attempt) {
      s.z = space.sample_z(s.rng);
      s.logprior = space.log_prior_z(s.z);
      if (!std::isfinite(s.logprior)) continue;
      s.stream = RandomStream::draw(lay, s.rng);
      try {
        FilterResult r = target.log_likelihood(space.natural(s.z), s.stream, cfg.n_particles);
        if (std::isfinite(r.loglik)) {
          s.loglik = r.loglik;
          s.step_loglik = std::move(r.step_loglik);
          ok = true;
        }
      } catch (const NumericalError&) {
      }
    }
    if (!ok)
      throw NumericalError("no feasible starting point after " +
                           std::to_string(cfg.max_init_attempts) + " prior draws");
  }

  const TrajectoryMeta tmeta = cfg.store_trajectories ? target.trajectory_meta() : TrajectoryMeta{};
  const bool track = cfg.store_trajectories && tmeta.size() > 0;

  std::vector<double> z_prop(d);
  RandomStream stream_prop;
  ParameterVector th_prop;

  const int total = cfg.iterations;
  s.out.loglik_trace.reserve(total);

  while (s.iter < total) {
    const int m = s.iter + 1;  // 1-based iteration index

    for (int j = 0; j < d; ++j)
      z_prop[j] = s.z[j] + std::exp(s.log_scale) * s.precond[j] * s.rng.normal();

    double alpha = 0.0;  // acceptance probability used for adaptation
    const double lp_prop = space.log_prior_z(z_prop);
    if (std::isfinite(lp_prop)) {
      stream_prop = s.stream;
      stream_prop.crank_nicolson(cfg.tau, s.rng);
      bool degenerate = false;
      FilterResult r;
      try {
        th_prop = space.natural(z_prop);
        r = target.log_likelihood(th_prop, stream_prop, cfg.n_particles);
        if (!std::isfinite(r.loglik) && r.loglik != kNegInf) degenerate = true;
      } catch (const NumericalError&) {
        degenerate = true;
      }
      if (degenerate) {
        ++s.out.n_degenerate;
      } else {
        const double log_ratio = (r.loglik + lp_prop) - (s.loglik + s.logprior);
        alpha = std::min(1.0, std::exp(log_ratio));
        if (std::log(s.rng.u01()) < log_ratio) {
          s.z = z_prop;
          s.logprior = lp_prop;
          s.loglik = r.loglik;
          s.step_loglik = std::move(r.step_loglik);
          std::swap(s.stream.u, stream_prop.u);
          std::swap(s.stream.v, stream_prop.v);
          ++s.out.n_accept;
        } else {
          ++s.out.n_reject;
        }
      }
    } else {
      ++s.out.n_reject;  // outside the prior support: no filter run needed
    }

    if (cfg.adapt && m <= cfg.burn_in) {
      s.log_scale += (alpha - cfg.accept_target) / std::pow(double(m), 0.6);
      s.log_scale = std::min(std::max(s.log_scale, std::log(1e-8)), std::log(1e3));
    }

    s.out.loglik_trace.push_back(s.loglik);

    if (m > cfg.burn_in && (m - cfg.burn_in) % cfg.thin == 0) {
      Draw dr;
      dr.z = s.z;
      dr.loglik = s.loglik;
      dr.step_loglik = s.step_loglik;
      if (track) {
        target.sample_trajectory(space.natural(s.z), s.stream, cfg.n_particles, dr.trajectory);
      }
      s.out.draws.push_back(std::move(dr));
    }

    s.iter = m;
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        m % cfg.checkpoint_every == 0)
      write_checkpoint(cfg.checkpoint_path, s);
    if (cfg.stop_after > 0 && m >= cfg.stop_after && m < total) {
      if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, s);
      break;
    }
  }

  if (!cfg.checkpoint_path.empty()) write_checkpoint(cfg.checkpoint_path, s);
  s.out.final_scale = std::exp(s.log_scale);
  s.out.iterations_done = s.iter;
  return std::move(s.out);
}

std::vector<ChainOutput> run_chains(const TargetModel& target, const SamplerConfig& cfg) {
  cfg.validate();
  std::vector<ChainOutput> out;
  out.reserve(cfg.n_chains);
  for (int k = 0; k < cfg.n_chains; ++k) {
    SamplerConfig c = cfg;
    if (!cfg.checkpoint_path.empty())
      c.checkpoint_path = cfg.checkpoint_path + std::to_string(k) + ".ckpt";
    out.push_back(run_chain(target, c, derive_seed(cfg.seed, std::uint64_t(k))));
  }
  return out;
}

double batch_means_se(const std::vector<double>& x) {
  const int n = int(x.size());
  if (n < 4) throw ContractViolation("batch means need at least 4 points");
  const int nb = std::max(2, int(std::floor(std::sqrt(double(n)))));
  const int len = n / nb;
  std::vector<double> bm(nb);
  for (int b = 0; b < nb; ++b) {
    double sum = 0;
    for (int i = b * len; i < (b + 1) * len; ++i) sum += x[i];
    bm[b] = sum / len;
  }
  return std::sqrt(sample_variance(bm) / nb);
}

}  // namespace socmc
