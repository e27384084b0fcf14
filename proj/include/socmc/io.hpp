#pragma once
#include <map>
#include <string>

#include "socmc/cpm.hpp"
#include "socmc/dataset.hpp"
#include "socmc/priors.hpp"
#include "socmc/soc_model.hpp"

namespace socmc {

// shortest decimal form that round-trips a double exactly
std::string fmt17(double v);

// Long-format observation CSV: field,year,channel,value (header required).
// The schedule fixes the frame: fields, initial-state year (the year before
// the first treatment) and horizon. Values must be positive; unknown
// channels, duplicate cells and out-of-frame rows are data errors with line
// numbers.
Dataset read_dataset_csv(const std::string& path, const ManagementSchedule& sched);
void write_dataset_csv(const std::string& path, const Dataset& ds);

// Schedule CSV: field,year,treatment (header required); must be dense —
// every field-year in the spanned range appears exactly once.
ManagementSchedule read_schedule_csv(const std::string& path);
void write_schedule_csv(const std::string& path, const ManagementSchedule& sched);

// One full run, declaratively. CLI flags override individual keys.
struct RunConfig {
  std::string model = "three-pool-biok";
  std::string table = "tarlee";
  std::string prior_set;  // empty: named after the input table
  std::string data_path, schedule_path;
  std::string out_dir = "out";
  std::string select = "none";  // none | waic | lfo-cv
  int min_obs = 1;              // lfo-cv: observed years conditioned on before scoring
  int lfo_j2 = 0;               // lfo-cv: particles per predictive draw (0: sampler's N)
  bool store_trajectories = true;
  bool all_channels_in_pf = false;

  double kappa = kKappaBioDefault;
  bool mediate_dpm_decay = false;
  double bio_init_fraction = 0.5;
  double cleared_input = 0.0;

  SamplerConfig sampler;
  std::map<std::string, Prior> prior_overrides;

  SocModelSpec model_spec() const;
  PriorSet priors() const;
};

RunConfig load_run_config(const std::string& path);  // plain config or run manifest
void write_manifest(const std::string& path, const RunConfig& rc);

}  // namespace socmc
