#pragma once

#include <Eigen/Core>

#include "gpsabb/types.hpp"

namespace gpsabb {

struct ContrastEstimate {
  int j = 0;
  int k = 0;
  Estimand estimand = Estimand::risk_difference;
  double tau_hat = 0.0;
  double v_hat = 0.0;
  bool continuity_corrected = false;
};

// yj, yk: completed potential outcomes of the n_t reference units under j and k.
ContrastEstimate att_risk_difference(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                     int j, int k);
ContrastEstimate att_log_odds_ratio(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                    int j, int k);
ContrastEstimate att_log_risk_ratio(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                    int j, int k);
ContrastEstimate att_ordinal_mean_difference(const Eigen::VectorXd& yj,
                                             const Eigen::VectorXd& yk, int j, int k);

ContrastEstimate att_estimate(Estimand estimand, const Eigen::VectorXd& yj,
                              const Eigen::VectorXd& yk, int j, int k);

// Convenience over one completed table (n_t x Z), columns indexed by treatment-1.
ContrastEstimate att_estimate(Estimand estimand, const Eigen::MatrixXd& completed,
                              int j, int k);

}  // namespace gpsabb
