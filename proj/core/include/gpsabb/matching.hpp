#pragma once

#include <vector>

#include <Eigen/Core>

#include "gpsabb/estimands.hpp"
#include "gpsabb/gps.hpp"

namespace gpsabb {

enum class DistanceKind { linear_gps, euclidean_gps, mahalanobis_logit_gps };

struct MatchSet {
  int t = 0;
  int L = 1;
  bool with_replacement = true;
  DistanceKind kind = DistanceKind::mahalanobis_logit_gps;
  std::vector<int> ref_indices;  // ascending indices of units with W == t
  // matches[ref_local][w-1]: the L donor indices in group w (empty for w == t)
  std::vector<std::vector<std::vector<int>>> matches;
};

// Sample covariance of the logit-GPS rows, ridge-repaired (+1e-8 I) when
// near-singular. Used for mahalanobis_logit_gps.
Eigen::MatrixXd logit_gps_covariance(const GpsMatrix& gps);

// w is required for linear_gps (1-based); Sigma_inv for mahalanobis.
double pair_distance(DistanceKind kind, const GpsMatrix& gps, int i, int j,
                     int w = -1, const Eigen::MatrixXd* Sigma_inv = nullptr);

// 1:L nearest-neighbor matching on the chosen distance; ties broken by donor
// index; without replacement, reference units are processed in ascending order.
MatchSet nn_match(const Dataset& data, const GpsMatrix& gps, int t, int L,
                  DistanceKind kind, bool with_replacement);

// Y_hat_i(w) = mean outcome of unit i's matches in group w (own outcome for w=t).
ContrastEstimate match_estimate(const MatchSet& matchset, const Dataset& data,
                                int j, int k, Estimand estimand);

}  // namespace gpsabb
