#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gpsabb/cluster.hpp"
#include "gpsabb/matching.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

enum class BalanceContext { raw, within_cluster_weighted, matched };

struct BalanceReport {
  BalanceContext context = BalanceContext::raw;
  std::vector<std::pair<int, int>> pairs;  // (j, k), j < k
  Eigen::MatrixXd sb;                      // P x npairs, signed SB_pjk
  Eigen::VectorXd max2sb;                  // per covariate
  double maxmax2sb = 0.0;
};

// SD of each covariate over all units pooled (sample SD, n-1 denominator).
// This denominator is computed once on the pre-adjustment sample and reused
// for post-adjustment reports so before/after numbers share a scale.
Eigen::VectorXd pooled_sd(const Eigen::MatrixXd& X);

// (mean_{p,j} - mean_{p,k}) / sd; zero sd yields 0.
double standardized_bias(const Eigen::MatrixXd& X, const std::vector<int>& W,
                         int p, int j, int k, double sd);

BalanceReport max2sb(const Eigen::MatrixXd& X, const std::vector<int>& W, int Z,
                     const Eigen::VectorXd& sd);

// Within-cluster SBs combined with weights n^q/n.
BalanceReport weighted_cluster_balance(const Eigen::MatrixXd& X, const std::vector<int>& W,
                                       int Z, const ClusterAssignment& clusters,
                                       const Eigen::VectorXd& sd);

// Balance of the matched cohort: reference units plus matches with multiplicity.
BalanceReport matched_balance(const Eigen::MatrixXd& X, const std::vector<int>& W,
                              int Z, const MatchSet& matchset, const Eigen::VectorXd& sd);

}  // namespace gpsabb
