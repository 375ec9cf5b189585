#pragma once

#include <cstdint>
#include <vector>

#include "gpsabb/pipeline.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

/// tau_hat / SE(tau_hat) per (delta, phi) cell and contrast; the baseline is
/// the no-confounder analysis with the same config.
struct SensitivityGrid {
  std::vector<double> delta_values;
  std::vector<double> phi_values;
  std::vector<std::pair<int, int>> contrasts;
  // cells[d][p][c]: standardized effect for contrast c at (delta_values[d], phi_values[p])
  std::vector<std::vector<std::vector<double>>> cells;
  std::vector<double> baseline;  // per contrast
};

// Append xi ~ Normal(delta*Y_obs + phi*1{W != t}, 1) as covariate P+1.
Dataset inject_confounder(const Dataset& data, int t, double delta, double phi,
                          std::uint64_t seed);

SensitivityGrid sensitivity_grid(const Dataset& data, const RunConfig& config,
                                 const std::vector<double>& delta_grid,
                                 const std::vector<double>& phi_grid,
                                 std::uint64_t seed);

std::vector<double> default_sensitivity_grid();  // 9 points over [-0.9, 0.9]

}  // namespace gpsabb
