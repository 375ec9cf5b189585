#pragma once

// Small builders shared by the unit tests.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "gpsabb/gps.hpp"
#include "gpsabb/types.hpp"

namespace testutil {

// GpsMatrix from an explicit probability matrix (rows need not be fitted).
inline gpsabb::GpsMatrix gps_from_probs(const Eigen::MatrixXd& R) {
  gpsabb::GpsMatrix g;
  g.R = R.cwiseMax(gpsabb::kProbClamp).cwiseMin(1.0 - gpsabb::kProbClamp);
  g.logitR = (g.R.array() / (1.0 - g.R.array())).log().matrix();
  return g;
}

// Z=2 convenience: column 0 holds r, column 1 holds 1-r.
inline gpsabb::GpsMatrix gps_from_r1(const std::vector<double>& r) {
  Eigen::MatrixXd R(static_cast<Eigen::Index>(r.size()), 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    R(static_cast<Eigen::Index>(i), 0) = r[i];
    R(static_cast<Eigen::Index>(i), 1) = 1.0 - r[i];
  }
  return gps_from_probs(R);
}

// Random Z-column probability rows via softmax of standard normals.
inline gpsabb::GpsMatrix random_gps(int n, int Z, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd R(n, Z);
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int w = 0; w < Z; ++w) {
      R(i, w) = std::exp(normal(rng));
      denom += R(i, w);
    }
    R.row(i) /= denom;
  }
  return gps_from_probs(R);
}

// Labels 1..Z cycling so every group is nonempty for n >= Z.
inline std::vector<int> cyclic_labels(int n, int Z) {
  std::vector<int> W(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) W[static_cast<std::size_t>(i)] = 1 + i % Z;
  return W;
}

// A dataset with mild covariate-treatment association: group w has covariate
// mean shift*(w-1) on every coordinate; binary outcome Bernoulli(rate_w).
inline gpsabb::Dataset shifted_dataset(const std::vector<int>& group_sizes, int P,
                                       double shift, const std::vector<double>& rates,
                                       std::uint64_t seed) {
  const int Z = static_cast<int>(group_sizes.size());
  int n = 0;
  for (int s : group_sizes) n += s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  gpsabb::Dataset d;
  d.Z = Z;
  d.X.resize(n, P);
  d.Y.resize(n);
  int row = 0;
  for (int w = 1; w <= Z; ++w) {
    for (int i = 0; i < group_sizes[static_cast<std::size_t>(w - 1)]; ++i) {
      for (int p = 0; p < P; ++p) d.X(row, p) = shift * (w - 1) + normal(rng);
      d.W.push_back(w);
      d.Y[row] = unif(rng) < rates[static_cast<std::size_t>(w - 1)] ? 1.0 : 0.0;
      ++row;
    }
  }
  return d;
}

}  // namespace testutil
