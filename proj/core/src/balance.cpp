#include "gpsabb/balance.hpp"

#include <cmath>

namespace gpsabb {

namespace {

std::vector<std::pair<int, int>> all_pairs(int Z) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= Z; ++j)
    for (int k = j + 1; k <= Z; ++k) pairs.emplace_back(j, k);
  return pairs;
}

void finalize(BalanceReport& report) {
  const auto P = report.sb.rows();
  report.max2sb.resize(P);
  for (Eigen::Index p = 0; p < P; ++p)
    report.max2sb[p] = report.sb.row(p).cwiseAbs().maxCoeff();
  report.maxmax2sb = P > 0 ? report.max2sb.maxCoeff() : 0.0;
}

double group_mean(const Eigen::MatrixXd& X, const std::vector<int>& W, int p, int g,
                  bool* ok = nullptr) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    if (W[i] == g) {
      sum += X(static_cast<Eigen::Index>(i), p);
      ++count;
    }
  }
  if (ok) *ok = count > 0;
  return count > 0 ? sum / count : 0.0;
}

}  // namespace

Eigen::VectorXd pooled_sd(const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  Eigen::VectorXd sd(X.cols());
  for (Eigen::Index p = 0; p < X.cols(); ++p) {
    const double mean = X.col(p).mean();
    const double ss = (X.col(p).array() - mean).square().sum();
    sd[p] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  return sd;
}

double standardized_bias(const Eigen::MatrixXd& X, const std::vector<int>& W,
                         int p, int j, int k, double sd) {
  if (sd <= 0.0) return 0.0;
  return (group_mean(X, W, p, j) - group_mean(X, W, p, k)) / sd;
}

BalanceReport max2sb(const Eigen::MatrixXd& X, const std::vector<int>& W, int Z,
                     const Eigen::VectorXd& sd) {
  BalanceReport report;
  report.context = BalanceContext::raw;
  report.pairs = all_pairs(Z);
  report.sb.resize(X.cols(), static_cast<Eigen::Index>(report.pairs.size()));
  for (Eigen::Index p = 0; p < X.cols(); ++p)
    for (std::size_t c = 0; c < report.pairs.size(); ++c)
      report.sb(p, static_cast<Eigen::Index>(c)) =
          standardized_bias(X, W, static_cast<int>(p), report.pairs[c].first,
                            report.pairs[c].second, sd[p]);
  finalize(report);
  return report;
}

BalanceReport weighted_cluster_balance(const Eigen::MatrixXd& X, const std::vector<int>& W,
                                       int Z, const ClusterAssignment& clusters,
                                       const Eigen::VectorXd& sd) {
  const auto n = X.rows();
  BalanceReport report;
  report.context = BalanceContext::within_cluster_weighted;
  report.pairs = all_pairs(Z);
  report.sb = Eigen::MatrixXd::Zero(X.cols(), static_cast<Eigen::Index>(report.pairs.size()));

  for (int q = 0; q < clusters.Q_eff; ++q) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i)
      if (clusters.assign[static_cast<std::size_t>(i)] == q) rows.push_back(i);
    const double weight = static_cast<double>(rows.size()) / static_cast<double>(n);

    Eigen::MatrixXd Xq(rows.size(), X.cols());
    std::vector<int> Wq(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Xq.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);
      Wq[r] = W[static_cast<std::size_t>(rows[r])];
    }
    for (Eigen::Index p = 0; p < X.cols(); ++p)
      for (std::size_t c = 0; c < report.pairs.size(); ++c)
        report.sb(p, static_cast<Eigen::Index>(c)) +=
            weight * standardized_bias(Xq, Wq, static_cast<int>(p), report.pairs[c].first,
                                       report.pairs[c].second, sd[p]);
  }
  finalize(report);
  return report;
}

BalanceReport matched_balance(const Eigen::MatrixXd& X, const std::vector<int>& W,
                              int Z, const MatchSet& matchset, const Eigen::VectorXd& sd) {
  // Matched cohort: reference units, plus each group's matches with multiplicity.
  std::vector<Eigen::Index> rows;
  std::vector<int> labels;
  for (int i : matchset.ref_indices) {
    rows.push_back(i);
    labels.push_back(matchset.t);
  }
  for (const auto& per_ref : matchset.matches) {
    for (int w = 1; w <= Z; ++w) {
      if (w == matchset.t) continue;
      for (int idx : per_ref[static_cast<std::size_t>(w - 1)]) {
        rows.push_back(idx);
        labels.push_back(w);
      }
    }
  }
  Eigen::MatrixXd Xm(rows.size(), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    Xm.row(static_cast<Eigen::Index>(r)) = X.row(rows[r]);

  BalanceReport report = max2sb(Xm, labels, Z, sd);
  report.context = BalanceContext::matched;
  (void)W;
  return report;
}

}  // namespace gpsabb
