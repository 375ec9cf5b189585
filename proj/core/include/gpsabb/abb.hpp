#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gpsabb/cluster.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

/// M completed potential-outcome tables for the reference-group units.
struct ImputedPotentialOutcomes {
  int M = 0;
  int Z = 0;
  int t = 0;
  std::vector<int> ref_indices;        // ascending indices of units with W == t
  std::vector<Eigen::MatrixXd> values; // M matrices, each n_t x Z; column t is observed
};

// Two-stage ABB draw within each cluster: stage 1 resamples the donor group,
// stage 2 draws the reference-unit imputations from the stage-1 pool.
ImputedPotentialOutcomes abb_impute(const Dataset& data, const ClusterAssignment& clusters,
                                    int t, int M, std::uint64_t seed);

struct PooledEstimate {
  double point = 0.0;
  double se = 0.0;
  std::vector<std::pair<double, double>> per_imputation;  // (tau_hat, v_hat)
};

// point = mean(tau); se^2 = (1/(M-1)) sum (tau - mean)^2 + (1/M) sum v.
// rubin_correction multiplies the between term by (1 + 1/M).
PooledEstimate pool(std::span<const std::pair<double, double>> per_imputation,
                    bool rubin_correction = false);

}  // namespace gpsabb
