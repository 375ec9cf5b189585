#include "gpsabb/estimands.hpp"

#include <cmath>

namespace gpsabb {

namespace {

// Sample variance (n-1 denominator) of yj - yk, divided by n_t.
ContrastEstimate mean_difference_estimate(const Eigen::VectorXd& yj,
                                          const Eigen::VectorXd& yk,
                                          int j, int k, Estimand kind) {
  const auto n = yj.size();
  if (n != yk.size()) throw Error("att: length mismatch");
  ContrastEstimate est;
  est.j = j;
  est.k = k;
  est.estimand = kind;
  if (j == k) return est;
  if (n < 2) throw Error("att: need at least 2 reference units for a variance");

  const Eigen::VectorXd d = yj - yk;
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / static_cast<double>(n - 1);
  est.tau_hat = mean;
  est.v_hat = var / static_cast<double>(n);
  return est;
}

}  // namespace

ContrastEstimate att_risk_difference(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                     int j, int k) {
  return mean_difference_estimate(yj, yk, j, k, Estimand::risk_difference);
}

ContrastEstimate att_ordinal_mean_difference(const Eigen::VectorXd& yj,
                                             const Eigen::VectorXd& yk, int j, int k) {
  return mean_difference_estimate(yj, yk, j, k, Estimand::mean_difference);
}

ContrastEstimate att_log_odds_ratio(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                    int j, int k) {
  const auto n = static_cast<double>(yj.size());
  if (yj.size() != yk.size()) throw Error("att_log_odds_ratio: length mismatch");
  ContrastEstimate est;
  est.j = j;
  est.k = k;
  est.estimand = Estimand::log_odds_ratio;
  if (j == k) return est;

  double a = yj.sum();   // successes under j
  double c = yk.sum();   // successes under k
  double b = n - a;
  double d = n - c;
  if (a <= 0.0 || b <= 0.0 || c <= 0.0 || d <= 0.0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
    est.continuity_corrected = true;
  }
  // Sum-of-logs form keeps tau exactly antisymmetric under (j,k) swap.
  est.tau_hat = (std::log(a) - std::log(b)) - (std::log(c) - std::log(d));
  est.v_hat = (1.0 / a + 1.0 / c) + (1.0 / b + 1.0 / d);
  return est;
}

ContrastEstimate att_log_risk_ratio(const Eigen::VectorXd& yj, const Eigen::VectorXd& yk,
                                    int j, int k) {
  const auto n = static_cast<double>(yj.size());
  if (yj.size() != yk.size()) throw Error("att_log_risk_ratio: length mismatch");
  ContrastEstimate est;
  est.j = j;
  est.k = k;
  est.estimand = Estimand::log_risk_ratio;
  if (j == k) return est;

  double a = yj.sum();
  double c = yk.sum();
  double n_eff = n;
  if (a <= 0.0 || c <= 0.0 || a >= n || c >= n) {
    a += 0.5;
    c += 0.5;
    n_eff = n + 1.0;
    est.continuity_corrected = true;
  }
  const double pj = a / n_eff;
  const double pk = c / n_eff;
  est.tau_hat = std::log(pj) - std::log(pk);  // exactly antisymmetric
  est.v_hat = (1.0 - pj) / (n_eff * pj) + (1.0 - pk) / (n_eff * pk);
  return est;
}

ContrastEstimate att_estimate(Estimand estimand, const Eigen::VectorXd& yj,
                              const Eigen::VectorXd& yk, int j, int k) {
  switch (estimand) {
    case Estimand::risk_difference:
      return att_risk_difference(yj, yk, j, k);
    case Estimand::log_odds_ratio:
      return att_log_odds_ratio(yj, yk, j, k);
    case Estimand::log_risk_ratio:
      return att_log_risk_ratio(yj, yk, j, k);
    case Estimand::mean_difference:
      return att_ordinal_mean_difference(yj, yk, j, k);
  }
  throw Error("att_estimate: unknown estimand");
}

ContrastEstimate att_estimate(Estimand estimand, const Eigen::MatrixXd& completed,
                              int j, int k) {
  return att_estimate(estimand, completed.col(j - 1), completed.col(k - 1), j, k);
}

}  // namespace gpsabb
