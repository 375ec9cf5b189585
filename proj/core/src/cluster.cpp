#include "gpsabb/cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "gpsabb/rng.hpp"

namespace gpsabb {

namespace {

struct KmeansRun {
  std::vector<int> assign;
  Eigen::MatrixXd centroids;
  double objective = std::numeric_limits<double>::infinity();
};

double sq_dist(const Eigen::MatrixXd& pts, int i, const Eigen::MatrixXd& centers, int c) {
  return (pts.row(i) - centers.row(c)).squaredNorm();
}

KmeansRun lloyd(const Eigen::MatrixXd& pts, int Q, std::uint64_t seed) {
  const auto n = static_cast<int>(pts.rows());
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  Eigen::MatrixXd centers(Q, pts.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  centers.row(0) = pts.row(static_cast<int>(uniform_index(rng, n)));
  for (int c = 1; c < Q; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts, i, centers, c - 1));
      total += d2[i];
    }
    int pick = 0;
    if (total > 0.0) {
      double u = uniform_real(rng) * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(uniform_index(rng, n));
    }
    centers.row(c) = pts.row(pick);
  }

  KmeansRun run;
  run.assign.assign(n, 0);
  double prev_obj = std::numeric_limits<double>::infinity();
  constexpr int max_iter = 300;
  constexpr double rel_tol = 1e-8;

  for (int iter = 0; iter < max_iter; ++iter) {
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(pts, i, centers, 0);
      for (int c = 1; c < Q; ++c) {
        double d = sq_dist(pts, i, centers, c);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      run.assign[i] = best;
      obj += bd;
    }

    std::vector<int> counts(Q, 0);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(Q, pts.cols());
    for (int i = 0; i < n; ++i) {
      counts[run.assign[i]]++;
      sums.row(run.assign[i]) += pts.row(i);
    }
    for (int c = 0; c < Q; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
      } else {
        // Reseat an empty cluster on the point farthest from its center.
        int far_i = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = sq_dist(pts, i, centers, run.assign[i]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        centers.row(c) = pts.row(far_i);
      }
    }

    run.objective = obj;
    if (prev_obj - obj <= rel_tol * std::max(1.0, prev_obj)) break;
    prev_obj = obj;
  }

  // Final assignment/objective against the last centroids.
  double obj = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = sq_dist(pts, i, centers, 0);
    for (int c = 1; c < Q; ++c) {
      double d = sq_dist(pts, i, centers, c);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    run.assign[i] = best;
    obj += bd;
  }
  run.objective = obj;
  run.centroids = centers;
  return run;
}

}  // namespace

Eigen::MatrixXi within_cluster_counts(const std::vector<int>& assign,
                                      const std::vector<int>& W, int Z, int Q_eff) {
  if (assign.size() != W.size()) throw Error("within_cluster_counts: length mismatch");
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(Q_eff, Z);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] < 0 || assign[i] >= Q_eff) throw Error("within_cluster_counts: bad cluster id");
    counts(assign[i], W[i] - 1)++;
  }
  return counts;
}

ClusterAssignment cluster_logit_gps(const GpsMatrix& gps, const std::vector<int>& W,
                                    int Z, int Q, std::uint64_t seed) {
  const auto n = static_cast<int>(gps.logitR.rows());
  if (Q < 1) throw Error("cluster_logit_gps: Q must be >= 1");
  if (Q > n) throw Error("cluster_logit_gps: Q exceeds number of units");

  KmeansRun best;
  constexpr int restarts = 10;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = lloyd(gps.logitR, Q, derive_seed(seed, {0x6b6dULL, static_cast<std::uint64_t>(r)}));
    if (run.objective < best.objective) best = std::move(run);
  }

  // Constraint repair: merge any cluster missing a treatment group into the
  // cluster with the nearest centroid, recompute centroids, repeat.
  std::vector<int> assign = best.assign;
  std::vector<int> live;  // current cluster labels, in original id order
  live.resize(Q);
  std::iota(live.begin(), live.end(), 0);
  Eigen::MatrixXd centroids = best.centroids;

  auto recompute_centroid = [&](int c) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(gps.logitR.cols());
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (assign[i] == c) {
        sum += gps.logitR.row(i);
        ++count;
      }
    }
    if (count > 0) centroids.row(c) = sum / count;
  };

  bool changed = true;
  while (changed && live.size() > 1) {
    changed = false;
    for (std::size_t li = 0; li < live.size(); ++li) {
      const int c = live[li];
      std::vector<int> gcount(Z, 0);
      bool nonempty = false;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == c) {
          gcount[W[i] - 1]++;
          nonempty = true;
        }
      }
      bool violates = !nonempty;
      for (int w = 0; w < Z && !violates; ++w)
        if (gcount[w] == 0) violates = true;
      if (!violates) continue;

      int target = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int other : live) {
        if (other == c) continue;
        double d = (centroids.row(c) - centroids.row(other)).squaredNorm();
        if (d < bd) {
          bd = d;
          target = other;
        }
      }
      for (int i = 0; i < n; ++i)
        if (assign[i] == c) assign[i] = target;
      recompute_centroid(target);
      live.erase(live.begin() + static_cast<long>(li));
      changed = true;
      break;
    }
  }

  // Relabel to 0..Q_eff-1 preserving original cluster order.
  std::vector<int> relabel(Q, -1);
  for (std::size_t li = 0; li < live.size(); ++li) relabel[live[li]] = static_cast<int>(li);

  ClusterAssignment out;
  out.Q_requested = Q;
  out.Q_eff = static_cast<int>(live.size());
  out.assign.resize(n);
  for (int i = 0; i < n; ++i) out.assign[i] = relabel[assign[i]];
  out.centroids.resize(out.Q_eff, gps.logitR.cols());
  for (std::size_t li = 0; li < live.size(); ++li)
    out.centroids.row(static_cast<Eigen::Index>(li)) = centroids.row(live[li]);
  out.objective = 0.0;
  for (int i = 0; i < n; ++i)
    out.objective += (gps.logitR.row(i) - out.centroids.row(out.assign[i])).squaredNorm();
  return out;
}

}  // namespace gpsabb
