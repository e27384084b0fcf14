#pragma once
#include <map>
#include <string>
#include <vector>

#include "socmc/dataset.hpp"
#include "socmc/soc_model.hpp"
#include "socmc/target.hpp"

namespace socmc {

struct SocTargetOptions {
  // true: no Kalman part, every channel weighted inside the particle filter
  // (cross-check mode); false: plant channels through the exact Kalman filter,
  // SOC channels through the particle filter.
  bool all_channels_in_pf = false;
};

// The SOC fitting problem: binds a model variant to a dataset, schedule and
// prior set, exposes the composed likelihood (exact Kalman filter over the
// log-linear plant block + correlated particle filter over the carbon pools,
// fields independent given theta) and leave-future-out support.
class SocTarget final : public TargetModel {
 public:
  SocTarget(SocModelSpec spec, Dataset data, ManagementSchedule sched, PriorSet prior_set,
            std::map<std::string, Prior> prior_overrides = {}, SocTargetOptions opt = {});

  const SocModel& model() const { return model_; }
  const Dataset& data() const { return data_; }
  const ManagementSchedule& schedule() const { return sched_; }

  const ParamSpace& param_space() const override { return space_; }
  StreamLayout stream_layout(int n_particles) const override;
  FilterResult log_likelihood(const ParameterVector& th, const RandomStream& stream,
                              int n_particles) const override;
  std::vector<int> observed_years() const override { return data_.observed_years(); }
  std::unique_ptr<TargetModel> truncated(int k_obs_years) const override;
  double log_one_step_predictive(const ParameterVector& th, int k_obs_years, int n_particles,
                                 std::uint64_t seed) const override;

  TrajectoryMeta trajectory_meta() const override;
  void sample_trajectory(const ParameterVector& th, const RandomStream& stream, int n_particles,
                         std::vector<double>& out) const override;

  // the plant block as a linear-Gaussian model (shared across fields; only the
  // observations differ per field). Exposed for tests.
  LinearGaussianModel plant_linear_model(const ParameterVector& th) const;

 private:
  double kalman_part(const ParameterVector& th, FilterResult* acc) const;

  SocModelSpec spec_;
  SocModel model_;
  Dataset data_;
  ManagementSchedule sched_;
  PriorSet prior_set_;
  std::map<std::string, Prior> priors_;  // merged defaults + overrides
  SocTargetOptions opt_;
  ParamSpace space_;
  // per field: log observations of the plant channels (n_years x n_plants,
  // NaN missing) and the per-year mass-scale corrections (-sum log y)
  std::vector<Eigen::MatrixXd> plant_logy_;
  std::vector<std::vector<double>> plant_jac_;
};

}  // namespace socmc
