#pragma once
#include <string>
#include <vector>

#include "socmc/cpm.hpp"
#include "socmc/params.hpp"

namespace socmc {

struct GelmanRubin {
  double rhat = 1;
  double upper = 1;  // 97.5% upper confidence bound
};

// Potential scale reduction factor with its upper confidence bound from the
// between/within variance decomposition (the classic multi-chain construction,
// including the degrees-of-freedom correction and the F-quantile on the
// random part of R^2). Chains must have equal length; >= 2 chains required.
// Zero within- and between-variance reports 1 by convention.
GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& chains);

struct RhatRow {
  std::string name;
  GelmanRubin z;        // on the transformed (sampling) scale
  GelmanRubin natural;  // on the natural scale
};

// per-parameter R-hat across chains, both scales
std::vector<RhatRow> rhat_report(const std::vector<ChainOutput>& chains,
                                 const ParamSpace& space);
double max_rhat(const std::vector<RhatRow>& rows);  // transformed scale

struct QuantileTrajectories {
  TrajectoryMeta meta;
  std::vector<double> levels;  // percent, ascending
  std::vector<double> q;       // flat [field][year][level]
  double at(int f, int t, int l) const {
    return q[(std::size_t(f) * meta.n_years + t) * levels.size() + l];
  }
};

// Per (field, year) percentiles of a pool sum (selected trajectory
// components) over all retained draws of all chains. Type-7 interpolation.
QuantileTrajectories quantile_trajectories(const std::vector<ChainOutput>& chains,
                                           const TrajectoryMeta& meta,
                                           const std::vector<int>& components,
                                           std::vector<double> levels = {2.5, 25, 50, 75,
                                                                         97.5});

struct PosteriorSummary {
  double mean = 0, sd = 0, lo95 = 0, hi95 = 0;
};

// posterior change of the selected pool sum between two years of one field
PosteriorSummary soc_change(const std::vector<ChainOutput>& chains, const TrajectoryMeta& meta,
                            const std::vector<int>& components, int field, int t_ref, int t);

}  // namespace socmc
