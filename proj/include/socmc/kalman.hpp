#pragma once
#include <Eigen/Dense>
#include <vector>

#include "socmc/errors.hpp"

namespace socmc {

// Linear-Gaussian state-space model
//   x_t = A x_{t-1} + B u_t + w,  w ~ N(0, Q)
//   y_t = C x_t + e,              e ~ N(0, R)
// x0 is the state at t=0 with covariance P0 (zero matrix = known exactly).
// The first observation row is at t=0 and conditions on (x0, P0) without a
// prediction step; later rows follow predict-update.
struct LinearGaussianModel {
  Eigen::MatrixXd A, B, C, Q, R;
  Eigen::VectorXd x0;
  Eigen::MatrixXd P0;                // defaults to zero if empty
  std::vector<Eigen::VectorXd> u;    // per-step inputs; empty = none

  int state_dim() const { return int(A.rows()); }
  int obs_dim() const { return int(C.rows()); }
};

struct KalmanResult {
  double loglik = 0.0;
  std::vector<double> step_loglik;          // per row of Y
  std::vector<Eigen::VectorXd> mean;        // filtered mean per step
  std::vector<Eigen::MatrixXd> cov;         // filtered covariance per step
};

// Exact filter. Y is T x obs_dim with NaN for missing entries; a fully
// missing row is a pure prediction step contributing zero likelihood.
// Covariance updates use the Joseph form. Throws NumericalError (reporting
// the step) if an innovation covariance is not positive definite.
KalmanResult kalman_filter(const LinearGaussianModel& m, const Eigen::MatrixXd& Y);

// Log predictive density of the observed entries in row `target` given rows
// 0..upto of Y: filter through `upto`, then predict (no updates) to `target`.
double kalman_log_predictive(const LinearGaussianModel& m, const Eigen::MatrixXd& Y,
                             int upto, int target);

}  // namespace socmc
