#include "gpsabb/abb.hpp"

#include <cmath>

#include "gpsabb/rng.hpp"

namespace gpsabb {

ImputedPotentialOutcomes abb_impute(const Dataset& data, const ClusterAssignment& clusters,
                                    int t, int M, std::uint64_t seed) {
  if (t < 1 || t > data.Z) throw Error("abb_impute: reference treatment out of range");
  if (M < 1) throw Error("abb_impute: M must be >= 1");
  if (data.outcome_kind != OutcomeKind::binary && data.outcome_kind != OutcomeKind::ordinal)
    throw Error("abb_impute: outcome must be categorical");

  const int n = data.n();
  const int Z = data.Z;
  const int Q = clusters.Q_eff;
  const Eigen::MatrixXi counts = within_cluster_counts(clusters.assign, data.W, Z, Q);
  if ((counts.array() < 1).any())
    throw Error("abb_impute: cluster constraint violated (empty group in a cluster)");

  ImputedPotentialOutcomes imp;
  imp.M = M;
  imp.Z = Z;
  imp.t = t;
  for (int i = 0; i < n; ++i)
    if (data.W[i] == t) imp.ref_indices.push_back(i);
  const int n_t = static_cast<int>(imp.ref_indices.size());

  // Per-cluster donor outcomes and reference-unit slots, both in unit order.
  std::vector<std::vector<std::vector<double>>> donors(Q);  // [q][w-1] -> outcomes
  std::vector<std::vector<int>> ref_local(Q);               // [q] -> local ref row
  for (int q = 0; q < Q; ++q) donors[q].resize(Z);
  for (int i = 0; i < n; ++i)
    donors[clusters.assign[i]][data.W[i] - 1].push_back(data.Y[i]);
  for (int r = 0; r < n_t; ++r)
    ref_local[clusters.assign[imp.ref_indices[r]]].push_back(r);

  imp.values.reserve(M);
  for (int m = 0; m < M; ++m) {
    Eigen::MatrixXd completed(n_t, Z);
    for (int r = 0; r < n_t; ++r) completed(r, t - 1) = data.Y[imp.ref_indices[r]];

    for (int q = 0; q < Q; ++q) {
      for (int w = 1; w <= Z; ++w) {
        if (w == t) continue;
        const auto& pool = donors[q][w - 1];
        auto rng = make_rng(seed, {static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(q),
                                   static_cast<std::uint64_t>(w)});
        // Stage 1: resample the donor group with replacement.
        std::vector<double> stage1(pool.size());
        for (auto& v : stage1) v = pool[uniform_index(rng, pool.size())];
        // Stage 2: draw one value per reference unit, ascending unit order.
        for (int r : ref_local[q])
          completed(r, w - 1) = stage1[uniform_index(rng, stage1.size())];
      }
    }
    imp.values.push_back(std::move(completed));
  }
  return imp;
}

PooledEstimate pool(std::span<const std::pair<double, double>> per_imputation,
                    bool rubin_correction) {
  const auto M = static_cast<int>(per_imputation.size());
  if (M < 2) throw Error("pool: need at least 2 imputations");

  PooledEstimate out;
  out.per_imputation.assign(per_imputation.begin(), per_imputation.end());

  double mean = 0.0;
  for (const auto& [tau, v] : per_imputation) {
    if (v < 0.0) throw Error("pool: negative within-imputation variance");
    mean += tau;
  }
  mean /= M;

  double between = 0.0;
  double within = 0.0;
  for (const auto& [tau, v] : per_imputation) {
    between += (tau - mean) * (tau - mean);
    within += v;
  }
  between /= (M - 1);
  within /= M;

  out.point = mean;
  const double bfac = rubin_correction ? (1.0 + 1.0 / M) : 1.0;
  out.se = std::sqrt(bfac * between + within);
  return out;
}

}  // namespace gpsabb
