#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gpsabb/gps.hpp"

namespace gpsabb {

/// k-means partition of logit-GPS rows with every treatment group represented
/// in every cluster (violating clusters merged into their nearest neighbor).
struct ClusterAssignment {
  std::vector<int> assign;    // length n, cluster ids in 0..Q_eff-1
  Eigen::MatrixXd centroids;  // Q_eff x Z, logit-GPS space
  int Q_requested = 0;
  int Q_eff = 0;
  double objective = 0.0;  // within-cluster sum of squares
};

// k-means++ seeding, 10 restarts, Lloyd iterations, then constraint repair.
ClusterAssignment cluster_logit_gps(const GpsMatrix& gps, const std::vector<int>& W,
                                    int Z, int Q, std::uint64_t seed);

// counts(q, w-1) = n_w^q
Eigen::MatrixXi within_cluster_counts(const std::vector<int>& assign,
                                      const std::vector<int>& W, int Z, int Q_eff);

}  // namespace gpsabb
