#include "gpsabb/sensitivity.hpp"

#include <limits>
#include <random>

#include "gpsabb/rng.hpp"

namespace gpsabb {

Dataset inject_confounder(const Dataset& data, int t, double delta, double phi,
                          std::uint64_t seed) {
  if (t < 1 || t > data.Z) throw Error("inject_confounder: reference out of range");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset out = data;
  out.X.conservativeResize(Eigen::NoChange, data.P() + 1);
  for (int i = 0; i < data.n(); ++i) {
    const double mean = delta * data.Y[i] + (data.W[static_cast<std::size_t>(i)] != t ? phi : 0.0);
    out.X(i, data.P()) = mean + normal(rng);
  }
  return out;
}

std::vector<double> default_sensitivity_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 9; ++i) grid.push_back(-0.9 + 0.225 * i);
  return grid;
}

SensitivityGrid sensitivity_grid(const Dataset& data, const RunConfig& config,
                                 const std::vector<double>& delta_grid,
                                 const std::vector<double>& phi_grid,
                                 std::uint64_t seed) {
  if (delta_grid.empty() || phi_grid.empty())
    throw Error("sensitivity_grid: empty grid");
  for (double v : delta_grid)
    if (v <= -1.0 || v >= 1.0) throw Error("sensitivity_grid: delta outside (-1, 1)");
  for (double v : phi_grid)
    if (v <= -1.0 || v >= 1.0) throw Error("sensitivity_grid: phi outside (-1, 1)");

  RunConfig cfg = config;
  cfg.method = Method::abb;
  cfg.seed = seed;

  SensitivityGrid grid;
  grid.delta_values = delta_grid;
  grid.phi_values = phi_grid;

  // Baseline: the no-confounder analysis with the same seed and config.
  EstimateReport baseline = run_estimate(data, cfg);
  for (const auto& rec : baseline.records) {
    grid.contrasts.emplace_back(rec.j, rec.k);
    grid.baseline.push_back(rec.se > 0.0 ? rec.point / rec.se : 0.0);
  }

  grid.cells.resize(delta_grid.size());
  int t = cfg.reference;
  if (t == 0) {
    int best = 0;
    for (int w = 1; w <= data.Z; ++w)
      if (data.group_size(w) > best) {
        best = data.group_size(w);
        t = w;
      }
  }

  for (std::size_t di = 0; di < delta_grid.size(); ++di) {
    grid.cells[di].resize(phi_grid.size());
    for (std::size_t pi = 0; pi < phi_grid.size(); ++pi) {
      // xi is drawn once per cell and held fixed across imputations.
      Dataset augmented = inject_confounder(
          data, t, delta_grid[di], phi_grid[pi],
          derive_seed(seed, {0x7869ULL, static_cast<std::uint64_t>(di),
                             static_cast<std::uint64_t>(pi)}));
      auto& cell = grid.cells[di][pi];
      cell.assign(grid.contrasts.size(), std::numeric_limits<double>::quiet_NaN());
      try {
        EstimateReport rep = run_estimate(augmented, cfg);
        for (std::size_t c = 0; c < rep.records.size() && c < cell.size(); ++c) {
          const auto& rec = rep.records[c];
          cell[c] = rec.se > 0.0 ? rec.point / rec.se : 0.0;
        }
      } catch (const Error&) {
        // leave NaNs; callers see the failed cell, the grid still completes
      }
    }
  }
  return grid;
}

}  // namespace gpsabb
