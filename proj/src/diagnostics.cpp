#include "socmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socmc/math.hpp"

namespace socmc {

namespace {
double covar(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = int(a.size());
  double ma = mean(a), mb = mean(b), s = 0;
  for (int i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / (n - 1);
}

// all trajectory pool-sum draws for (field, year), chains pooled
std::vector<double> pooled_component_sum(const std::vector<ChainOutput>& chains,
                                         const TrajectoryMeta& meta,
                                         const std::vector<int>& components, int f, int t) {
  std::vector<double> xs;
  for (const ChainOutput& ch : chains)
    for (const Draw& d : ch.draws) {
      if (d.trajectory.size() != meta.size())
        throw ContractViolation("retained draw lacks a trajectory of the expected shape");
      double s = 0;
      for (int c : components) s += d.trajectory[meta.index(f, t, c)];
      xs.push_back(s);
    }
  if (xs.empty()) throw ContractViolation("no retained trajectories");
  return xs;
}
}  // namespace

GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const int m = int(chains.size());
  if (m < 2) throw ContractViolation("scale reduction factor needs at least 2 chains");
  const std::size_t n = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != n) throw ContractViolation("chains must have equal length");
  if (n < 2) throw ContractViolation("chains too short");

  std::vector<double> xbar(m), s2(m);
  for (int j = 0; j < m; ++j) {
    xbar[j] = mean(chains[j]);
    s2[j] = sample_variance(chains[j]);
  }
  const double W = mean(s2);
  const double B = double(n) * sample_variance(xbar);
  if (W == 0.0 && B == 0.0) return {1.0, 1.0};
  if (W == 0.0)
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};

  const double dn = double(n);
  const double mu = [&] {
    double s = 0;
    for (int j = 0; j < m; ++j) s += xbar[j];
    return s / m;
  }();

  // sampling variability of the variance estimate (for the df correction)
  const double var_w = sample_variance(s2) / m;
  const double var_b = 2.0 * B * B / (m - 1);
  std::vector<double> xbar2(m);
  for (int j = 0; j < m; ++j) xbar2[j] = xbar[j] * xbar[j];
  const double cov_wb = (dn / m) * (covar(s2, xbar2) - 2.0 * mu * covar(s2, xbar));

  const double V = (dn - 1.0) / dn * W + B / dn + B / (m * dn);
  const double var_V = ((dn - 1.0) * (dn - 1.0) * var_w +
                        std::pow(1.0 + 1.0 / m, 2) * var_b +
                        2.0 * (dn - 1.0) * (1.0 + 1.0 / m) * cov_wb) /
                       (dn * dn);
  double df_V = var_V > 0 ? 2.0 * V * V / var_V : 1e6;
  df_V = std::min(df_V, 1e6);
  const double df_adj = (df_V + 3.0) / (df_V + 1.0);

  const double b_df = m - 1.0;
  double w_df = var_w > 0 ? 2.0 * W * W / var_w : 1e6;
  w_df = std::min(std::max(w_df, 1.0), 1e6);

  const double r2_fixed = (dn - 1.0) / dn;
  const double r2_random = (1.0 + 1.0 / m) / dn * (B / W);
  const double r2 = r2_fixed + r2_random;
  const double r2_upper = r2_fixed + f_quantile(0.975, b_df, w_df) * r2_random;

  GelmanRubin g;
  g.rhat = std::sqrt(df_adj * r2);
  g.upper = std::sqrt(df_adj * r2_upper);
  return g;
}

std::vector<RhatRow> rhat_report(const std::vector<ChainOutput>& chains,
                                 const ParamSpace& space) {
  if (chains.size() < 2) throw ContractViolation("R-hat report needs at least 2 chains");
  const int d = space.size();
  std::vector<RhatRow> rows(d);
  const std::size_t nret = chains[0].draws.size();
  for (const auto& c : chains)
    if (c.draws.size() != nret) throw ContractViolation("chains retained unequal draw counts");

  for (int j = 0; j < d; ++j) {
    rows[j].name = space.defs()[j].name;
    std::vector<std::vector<double>> zcols, natcols;
    for (const ChainOutput& c : chains) {
      std::vector<double> z = c.param_z(j);
      std::vector<double> nat(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) nat[i] = space.defs()[j].tf.to_natural(z[i]);
      zcols.push_back(std::move(z));
      natcols.push_back(std::move(nat));
    }
    rows[j].z = gelman_rubin(zcols);
    rows[j].natural = gelman_rubin(natcols);
  }
  return rows;
}

double max_rhat(const std::vector<RhatRow>& rows) {
  double r = 1.0;
  for (const auto& row : rows) r = std::max(r, row.z.rhat);
  return r;
}

QuantileTrajectories quantile_trajectories(const std::vector<ChainOutput>& chains,
                                           const TrajectoryMeta& meta,
                                           const std::vector<int>& components,
                                           std::vector<double> levels) {
  QuantileTrajectories out;
  out.meta = meta;
  out.levels = std::move(levels);
  out.q.assign(std::size_t(meta.n_fields) * meta.n_years * out.levels.size(), 0.0);
  for (int f = 0; f < meta.n_fields; ++f)
    for (int t = 0; t < meta.n_years; ++t) {
      std::vector<double> xs = pooled_component_sum(chains, meta, components, f, t);
      std::sort(xs.begin(), xs.end());
      for (std::size_t l = 0; l < out.levels.size(); ++l)
        out.q[(std::size_t(f) * meta.n_years + t) * out.levels.size() + l] =
            quantile_type7(xs, out.levels[l] / 100.0);
    }
  return out;
}

PosteriorSummary soc_change(const std::vector<ChainOutput>& chains, const TrajectoryMeta& meta,
                            const std::vector<int>& components, int field, int t_ref, int t) {
  if (field < 0 || field >= meta.n_fields) throw ContractViolation("field outside horizon");
  if (t_ref < 0 || t_ref >= meta.n_years || t < 0 || t >= meta.n_years)
    throw ContractViolation("year outside horizon");
  const std::vector<double> at = pooled_component_sum(chains, meta, components, field, t);
  const std::vector<double> ref = pooled_component_sum(chains, meta, components, field, t_ref);
  std::vector<double> diff(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) diff[i] = at[i] - ref[i];
  PosteriorSummary s;
  s.mean = mean(diff);
  s.sd = diff.size() > 1 ? std::sqrt(sample_variance(diff)) : 0.0;
  std::sort(diff.begin(), diff.end());
  s.lo95 = quantile_type7(diff, 0.025);
  s.hi95 = quantile_type7(diff, 0.975);
  return s;
}

}  // namespace socmc
