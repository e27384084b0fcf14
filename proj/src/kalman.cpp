#include "socmc/kalman.hpp"

#include <cmath>

#include "socmc/math.hpp"

namespace socmc {

namespace {

// rows of C / entries of R restricted to the observed components of y
struct ObsSlice {
  Eigen::MatrixXd C;
  Eigen::MatrixXd R;
  Eigen::VectorXd y;
  int k = 0;
};

ObsSlice slice_observed(const LinearGaussianModel& m, const Eigen::RowVectorXd& row) {
  std::vector<int> idx;
  for (int j = 0; j < row.size(); ++j)
    if (!std::isnan(row[j])) idx.push_back(j);
  ObsSlice s;
  s.k = int(idx.size());
  s.C.resize(s.k, m.state_dim());
  s.R.resize(s.k, s.k);
  s.y.resize(s.k);
  for (int a = 0; a < s.k; ++a) {
    s.C.row(a) = m.C.row(idx[a]);
    s.y[a] = row[idx[a]];
    for (int b = 0; b < s.k; ++b) s.R(a, b) = m.R(idx[a], idx[b]);
  }
  return s;
}

double update_step(const LinearGaussianModel& m, const ObsSlice& s, Eigen::VectorXd& x,
                   Eigen::MatrixXd& P, int t) {
  const Eigen::MatrixXd S = s.R + s.C * P * s.C.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw NumericalError("kalman filter: innovation covariance not positive definite at step " +
                         std::to_string(t));
  const Eigen::VectorXd nu = s.y - s.C * x;
  const Eigen::MatrixXd K = P * s.C.transpose() * llt.solve(Eigen::MatrixXd::Identity(s.k, s.k));
  x += K * nu;
  // Joseph form keeps P symmetric PSD under roundoff
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m.state_dim(), m.state_dim());
  const Eigen::MatrixXd J = I - K * s.C;
  P = J * P * J.transpose() + K * s.R * K.transpose();
  P = 0.5 * (P + P.transpose()).eval();

  double logdet = 0.0;
  for (int i = 0; i < s.k; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  const Eigen::VectorXd w = llt.matrixL().solve(nu);
  return -0.5 * (s.k * kLog2Pi + logdet + w.squaredNorm());
}

void predict_step(const LinearGaussianModel& m, int t, Eigen::VectorXd& x,
                  Eigen::MatrixXd& P) {
  x = m.A * x;
  if (m.B.size() > 0 && !m.u.empty()) x += m.B * m.u[std::size_t(t)];
  P = m.A * P * m.A.transpose() + m.Q;
  P = 0.5 * (P + P.transpose()).eval();
}

}  // namespace

KalmanResult kalman_filter(const LinearGaussianModel& m, const Eigen::MatrixXd& Y) {
  const int T = int(Y.rows());
  KalmanResult out;
  out.step_loglik.assign(T, 0.0);
  out.mean.reserve(T);
  out.cov.reserve(T);

  Eigen::VectorXd x = m.x0;
  Eigen::MatrixXd P = m.P0.size() > 0
                          ? m.P0
                          : Eigen::MatrixXd::Zero(m.state_dim(), m.state_dim()).eval();
  for (int t = 0; t < T; ++t) {
    if (t > 0) predict_step(m, t, x, P);
    const ObsSlice s = slice_observed(m, Y.row(t));
    if (s.k > 0) out.step_loglik[t] = update_step(m, s, x, P, t);
    out.loglik += out.step_loglik[t];
    out.mean.push_back(x);
    out.cov.push_back(P);
  }
  return out;
}

double kalman_log_predictive(const LinearGaussianModel& m, const Eigen::MatrixXd& Y,
                             int upto, int target) {
  if (!(upto < target && target < Y.rows()))
    throw ContractViolation("kalman_log_predictive: need upto < target < rows");
  Eigen::VectorXd x = m.x0;
  Eigen::MatrixXd P = m.P0.size() > 0
                          ? m.P0
                          : Eigen::MatrixXd::Zero(m.state_dim(), m.state_dim()).eval();
  for (int t = 0; t <= upto; ++t) {
    if (t > 0) predict_step(m, t, x, P);
    const ObsSlice s = slice_observed(m, Y.row(t));
    if (s.k > 0) update_step(m, s, x, P, t);
  }
  for (int t = upto + 1; t <= target; ++t) predict_step(m, t, x, P);
  const ObsSlice s = slice_observed(m, Y.row(target));
  if (s.k == 0) return 0.0;
  const Eigen::MatrixXd S = s.R + s.C * P * s.C.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw NumericalError("kalman predictive: covariance not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < s.k; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  const Eigen::VectorXd w = llt.matrixL().solve((s.y - s.C * x).eval());
  return -0.5 * (s.k * kLog2Pi + logdet + w.squaredNorm());
}

}  // namespace socmc
