#include "gpsabb/matching.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace gpsabb {

Eigen::MatrixXd logit_gps_covariance(const GpsMatrix& gps) {
  const auto n = gps.logitR.rows();
  const auto Z = gps.logitR.cols();
  if (n < 2) throw Error("logit_gps_covariance: need at least 2 units");
  Eigen::RowVectorXd mean = gps.logitR.colwise().mean();
  Eigen::MatrixXd centered = gps.logitR.rowwise() - mean;
  Eigen::MatrixXd Sigma = centered.transpose() * centered / static_cast<double>(n - 1);

  // logitR coordinates are near-dependent; repair near-singular Sigma.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < 1e-10 * std::max(hi, 1.0)) Sigma += 1e-8 * Eigen::MatrixXd::Identity(Z, Z);
  return Sigma;
}

double pair_distance(DistanceKind kind, const GpsMatrix& gps, int i, int j,
                     int w, const Eigen::MatrixXd* Sigma_inv) {
  switch (kind) {
    case DistanceKind::linear_gps:
      if (w < 1) throw Error("pair_distance: linear_gps needs a treatment coordinate");
      return std::abs(gps.logitR(i, w - 1) - gps.logitR(j, w - 1));
    case DistanceKind::euclidean_gps:
      return (gps.R.row(i) - gps.R.row(j)).norm();
    case DistanceKind::mahalanobis_logit_gps: {
      if (Sigma_inv == nullptr)
        throw Error("pair_distance: mahalanobis needs a covariance inverse");
      Eigen::VectorXd d = (gps.logitR.row(i) - gps.logitR.row(j)).transpose();
      return std::sqrt(d.dot(*Sigma_inv * d));
    }
  }
  throw Error("pair_distance: unknown distance kind");
}

MatchSet nn_match(const Dataset& data, const GpsMatrix& gps, int t, int L,
                  DistanceKind kind, bool with_replacement) {
  if (t < 1 || t > data.Z) throw Error("nn_match: reference treatment out of range");
  if (L < 1) throw Error("nn_match: L must be >= 1");
  const int n = data.n();
  const int Z = data.Z;

  MatchSet ms;
  ms.t = t;
  ms.L = L;
  ms.with_replacement = with_replacement;
  ms.kind = kind;
  for (int i = 0; i < n; ++i)
    if (data.W[i] == t) ms.ref_indices.push_back(i);
  const int n_t = static_cast<int>(ms.ref_indices.size());

  if (!with_replacement) {
    for (int w = 1; w <= Z; ++w) {
      if (w == t) continue;
      if (data.group_size(w) < static_cast<long>(L) * n_t)
        throw Error("nn_match: donor group too small for matching without replacement");
    }
  }

  Eigen::MatrixXd Sigma_inv;
  if (kind == DistanceKind::mahalanobis_logit_gps)
    Sigma_inv = logit_gps_covariance(gps).inverse();
  const Eigen::MatrixXd* Sptr =
      kind == DistanceKind::mahalanobis_logit_gps ? &Sigma_inv : nullptr;

  std::vector<std::vector<int>> group_members(Z);
  for (int i = 0; i < n; ++i) group_members[data.W[i] - 1].push_back(i);

  std::vector<std::vector<bool>> used(Z);  // without replacement bookkeeping
  for (int w = 0; w < Z; ++w) used[w].assign(group_members[w].size(), false);

  ms.matches.assign(n_t, std::vector<std::vector<int>>(Z));
  for (int r = 0; r < n_t; ++r) {
    const int i = ms.ref_indices[r];
    for (int w = 1; w <= Z; ++w) {
      if (w == t) continue;
      const auto& members = group_members[w - 1];
      // (distance, donor index); ties broken by smaller donor index.
      std::vector<std::pair<double, int>> cand;
      cand.reserve(members.size());
      for (std::size_t g = 0; g < members.size(); ++g) {
        if (!with_replacement && used[w - 1][g]) continue;
        cand.emplace_back(pair_distance(kind, gps, i, members[g], w, Sptr), members[g]);
      }
      if (static_cast<int>(cand.size()) < L)
        throw Error("nn_match: donor pool exhausted");
      std::partial_sort(cand.begin(), cand.begin() + L, cand.end());
      auto& picks = ms.matches[r][w - 1];
      for (int l = 0; l < L; ++l) {
        picks.push_back(cand[l].second);
        if (!with_replacement) {
          auto it = std::lower_bound(members.begin(), members.end(), cand[l].second);
          used[w - 1][static_cast<std::size_t>(it - members.begin())] = true;
        }
      }
    }
  }
  return ms;
}

ContrastEstimate match_estimate(const MatchSet& matchset, const Dataset& data,
                                int j, int k, Estimand estimand) {
  const int n_t = static_cast<int>(matchset.ref_indices.size());
  Eigen::VectorXd yj(n_t), yk(n_t);
  auto imputed = [&](int r, int w) -> double {
    if (w == matchset.t) return data.Y[matchset.ref_indices[r]];
    const auto& picks = matchset.matches[r][w - 1];
    double sum = 0.0;
    for (int idx : picks) sum += data.Y[idx];
    return sum / static_cast<double>(picks.size());
  };
  for (int r = 0; r < n_t; ++r) {
    yj[r] = imputed(r, j);
    yk[r] = imputed(r, k);
  }
  ContrastEstimate est = att_estimate(estimand, yj, yk, j, k);
  return est;
}

}  // namespace gpsabb
