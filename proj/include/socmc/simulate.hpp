#pragma once
#include <cstdint>
#include <vector>

#include "socmc/dataset.hpp"
#include "socmc/soc_model.hpp"
#include "socmc/target.hpp"

namespace socmc {

struct SimulateOptions {
  double obs_sparsity = 1.0;       // per (field, year) keep-probability
  std::vector<int> observed_years; // nonempty: exact year indices observed instead
  std::vector<Channel> channels;   // empty: variant defaults + active plant channels
};

struct SyntheticData {
  Dataset data;
  ParameterVector theta;
  TrajectoryMeta meta;              // carbon pool components
  std::vector<double> true_states;  // pools, meta layout
  std::vector<double> true_plant_log;  // [field][year][active plant], flat
};

// Forward-simulates the process model and pushes the states through the
// observation model; observations masked to the requested sparsity. The
// latent truth is returned for oracle tests.
SyntheticData generate_synthetic(const SocModelSpec& spec, const ParameterVector& theta,
                                 const ManagementSchedule& sched, int n_years,
                                 std::uint64_t seed, const SimulateOptions& opt = {});

// A site-appropriate rotation: wheat/pasture phases (Tarlee), sorghum phases
// (Brigalow), continuous wheat (Rothamsted), each with one shared fallow year
// mid-horizon. Treatment years [year0, year0 + n_years).
ManagementSchedule rotation_schedule(InputTable table, int n_fields, int year0, int n_years);

}  // namespace socmc
