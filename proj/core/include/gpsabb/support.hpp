#pragma once

#include <vector>

#include <Eigen/Core>

#include "gpsabb/gps.hpp"

namespace gpsabb {

/// Rectangular common-support region with strict-interval eligibility.
struct SupportRegion {
  Eigen::VectorXd r_min;  // length Z: max over groups of within-group minima
  Eigen::VectorXd r_max;  // length Z: min over groups of within-group maxima
  std::vector<bool> eligible;
  int n_excluded = 0;
};

SupportRegion common_support(const GpsMatrix& gps, const std::vector<int>& W, int Z);

GpsMatrix filter_gps(const GpsMatrix& gps, const std::vector<bool>& mask);

}  // namespace gpsabb
