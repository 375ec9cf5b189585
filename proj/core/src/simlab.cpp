#include "gpsabb/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "gpsabb/abb.hpp"
#include "gpsabb/gps.hpp"
#include "gpsabb/ipw.hpp"
#include "gpsabb/matching.hpp"
#include "gpsabb/rng.hpp"
#include "gpsabb/support.hpp"

namespace gpsabb {

namespace {

double logistic_inv(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double probit_inv(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double link_inv(LinkKind link, double z) {
  return link == LinkKind::logistic ? logistic_inv(z) : probit_inv(z);
}

}  // namespace

SimDesign SimDesign::desk_scale() {
  SimDesign d;
  d.group_sizes = {300, 600, 1200};
  return d;
}

SimDesign SimDesign::paper_scale() { return SimDesign{}; }

Eigen::VectorXd SimDesign::beta() const {
  if (beta_X.size() > 0) return beta_X;
  Eigen::VectorXd beta = Eigen::VectorXd::Ones(P);
  if (P >= 1) beta[0] = 2.0;
  if (P >= 2) beta[1] = 4.0;
  if (P >= 3) beta[2] = 6.0;
  return beta;
}

Eigen::VectorXd SimDesign::location(int w) const {
  // b_w is a 3-vector with b in slot w; tiled across the P coordinates.
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(P);
  for (int p = 0; p < P; ++p)
    if (p % 3 == w - 1) mu[p] = b;
  return mu;
}

std::string MethodSpec::name() const {
  if (method == Method::abb) {
    std::ostringstream s;
    s << "abb:" << Q;
    return s.str();
  }
  return to_string(method);
}

MethodSpec MethodSpec::parse(const std::string& s) {
  MethodSpec spec;
  if (s == "matching") {
    spec.method = Method::matching;
    return spec;
  }
  if (s == "ipw") {
    spec.method = Method::ipw;
    return spec;
  }
  if (s.rfind("abb", 0) == 0) {
    spec.method = Method::abb;
    spec.Q = 1;
    auto colon = s.find(':');
    if (colon != std::string::npos) spec.Q = std::stoi(s.substr(colon + 1));
    if (spec.Q < 1) throw Error("MethodSpec: Q must be >= 1");
    return spec;
  }
  throw Error("MethodSpec: cannot parse '" + s + "'");
}

Eigen::MatrixXd gen_covariates(const SimDesign& design, int w, int n_w, std::uint64_t seed) {
  if (w < 1 || w > 3) throw Error("gen_covariates: w must be in 1..3");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> gamma_half_df(design.df / 2.0, 2.0);  // chi^2_df

  const double delta = design.eta / std::sqrt(1.0 + design.eta * design.eta);
  const double slant_mix = std::sqrt(1.0 - delta * delta);
  const Eigen::VectorXd mu = design.location(w);

  Eigen::MatrixXd X(n_w, design.P);
  for (int i = 0; i < n_w; ++i) {
    // One chi-square denominator per row couples the coordinates (multivariate t).
    const double scale = std::sqrt(gamma_half_df(rng) / design.df);
    for (int p = 0; p < design.P; ++p) {
      const double u0 = normal(rng);
      const double u1 = normal(rng);
      const double skew_normal = delta * std::abs(u0) + slant_mix * u1;
      X(i, p) = mu[p] + skew_normal / scale;
    }
  }
  return X;
}

Eigen::MatrixXd gen_binary_outcomes(const Eigen::MatrixXd& X, const SimDesign& design,
                                    std::uint64_t seed) {
  auto rng = make_rng(seed);
  const Eigen::VectorXd z = X * design.beta();
  Eigen::MatrixXd po(X.rows(), 3);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double p1 = link_inv(design.link, z[i]);
    const double p23 = link_inv(design.link, design.gamma * z[i]);
    po(i, 0) = uniform_real(rng) < p1 ? 1.0 : 0.0;
    po(i, 1) = uniform_real(rng) < p23 ? 1.0 : 0.0;
    po(i, 2) = uniform_real(rng) < p23 ? 1.0 : 0.0;
  }
  return po;
}

Eigen::MatrixXd gen_ordinal_outcomes(const Eigen::MatrixXd& X, const SimDesign& design,
                                     std::uint64_t seed) {
  auto rng = make_rng(seed);
  const Eigen::VectorXd z = X * design.beta();
  const int L = design.ordinal_levels;
  if (static_cast<int>(design.alphas.size()) != L - 1)
    throw Error("gen_ordinal_outcomes: need L-1 cutpoints");
  // Cumulative probabilities must increase in the category index; sort cutpoints.
  std::vector<double> alphas = design.alphas;
  std::sort(alphas.begin(), alphas.end());

  Eigen::MatrixXd po(X.rows(), 3);
  std::vector<double> cum(static_cast<std::size_t>(L - 1));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (int j = 0; j < L - 1; ++j) {
      cum[static_cast<std::size_t>(j)] = logistic_inv(alphas[static_cast<std::size_t>(j)] + z[i]);
      if (j > 0 && cum[static_cast<std::size_t>(j)] < cum[static_cast<std::size_t>(j - 1)])
        throw Error("gen_ordinal_outcomes: non-monotone cumulative probabilities");
    }
    for (int w = 0; w < 3; ++w) {  // one shared surface, independent draws per w
      const double u = uniform_real(rng);
      int level = L;
      for (int j = 0; j < L - 1; ++j) {
        if (u < cum[static_cast<std::size_t>(j)]) {
          level = j + 1;
          break;
        }
      }
      po(i, w) = level;
    }
  }
  return po;
}

double true_att(const Eigen::MatrixXd& potential_outcomes, const std::vector<int>& W,
                const std::vector<bool>& eligible, int t, int j, int k, Estimand estimand) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < W.size(); ++i)
    if (W[i] == t && eligible[i]) rows.push_back(static_cast<Eigen::Index>(i));
  if (rows.size() < 2) throw Error("true_att: fewer than 2 eligible reference units");
  Eigen::VectorXd yj(rows.size()), yk(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    yj[static_cast<Eigen::Index>(r)] = potential_outcomes(rows[r], j - 1);
    yk[static_cast<Eigen::Index>(r)] = potential_outcomes(rows[r], k - 1);
  }
  return att_estimate(estimand, yj, yk, j, k).tau_hat;
}

namespace {

struct RepOutcome {
  bool skipped = false;
  // [method][pair] -> (tau, se, truth)
  std::vector<std::vector<std::array<double, 3>>> cells;
};

constexpr std::array<std::pair<int, int>, 3> kPairs = {{{1, 2}, {1, 3}, {2, 3}}};

RepOutcome run_replication(const SimDesign& design, const std::vector<MethodSpec>& methods,
                           std::uint64_t rep_seed) {
  const Estimand estimand = design.outcome_kind == OutcomeKind::binary
                                ? Estimand::risk_difference
                                : Estimand::mean_difference;
  const int t = 1;

  const int n = design.group_sizes[0] + design.group_sizes[1] + design.group_sizes[2];
  Dataset d;
  d.Z = 3;
  d.outcome_kind = design.outcome_kind;
  d.levels = design.outcome_kind == OutcomeKind::binary ? 2 : design.ordinal_levels;
  d.X.resize(n, design.P);
  d.Y.resize(n);
  d.W.reserve(static_cast<std::size_t>(n));

  int row = 0;
  for (int w = 1; w <= 3; ++w) {
    const int n_w = design.group_sizes[static_cast<std::size_t>(w - 1)];
    d.X.middleRows(row, n_w) =
        gen_covariates(design, w, n_w, derive_seed(rep_seed, {10, static_cast<std::uint64_t>(w)}));
    for (int i = 0; i < n_w; ++i) d.W.push_back(w);
    row += n_w;
  }
  const Eigen::MatrixXd po =
      design.outcome_kind == OutcomeKind::binary
          ? gen_binary_outcomes(d.X, design, derive_seed(rep_seed, {20}))
          : gen_ordinal_outcomes(d.X, design, derive_seed(rep_seed, {20}));
  for (int i = 0; i < n; ++i) d.Y[i] = po(i, d.W[static_cast<std::size_t>(i)] - 1);

  GpsModel model;
  try {
    model = fit_gps(d, 0.0);
  } catch (const Error&) {
    model = fit_gps(d, 1e-4);  // near-separated design cells
  }
  const GpsMatrix gps = predict_gps(model, d);
  const SupportRegion region = common_support(gps, d.W, d.Z);
  const Dataset df = filter_dataset(d, region.eligible);
  const GpsMatrix gf = filter_gps(gps, region.eligible);

  std::array<double, 3> truth{};
  for (std::size_t c = 0; c < kPairs.size(); ++c)
    truth[c] = true_att(po, d.W, region.eligible, t, kPairs[c].first, kPairs[c].second, estimand);

  RepOutcome out;
  out.cells.resize(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const MethodSpec& spec = methods[mi];
    out.cells[mi].resize(kPairs.size());
    switch (spec.method) {
      case Method::abb: {
        ClusterAssignment clusters = cluster_logit_gps(
            gf, df.W, df.Z, spec.Q,
            derive_seed(rep_seed, {30, static_cast<std::uint64_t>(spec.Q)}));
        ImputedPotentialOutcomes imp = abb_impute(
            df, clusters, t, 25, derive_seed(rep_seed, {40, static_cast<std::uint64_t>(spec.Q)}));
        for (std::size_t c = 0; c < kPairs.size(); ++c) {
          std::vector<std::pair<double, double>> per_imp;
          for (const auto& completed : imp.values) {
            ContrastEstimate est =
                att_estimate(estimand, completed, kPairs[c].first, kPairs[c].second);
            per_imp.emplace_back(est.tau_hat, est.v_hat);
          }
          PooledEstimate pooled = pool(per_imp);
          out.cells[mi][c] = {pooled.point, pooled.se, truth[c]};
        }
        break;
      }
      case Method::matching: {
        MatchSet ms = nn_match(df, gf, t, 1, DistanceKind::mahalanobis_logit_gps, true);
        for (std::size_t c = 0; c < kPairs.size(); ++c) {
          ContrastEstimate est = match_estimate(ms, df, kPairs[c].first, kPairs[c].second, estimand);
          out.cells[mi][c] = {est.tau_hat, std::sqrt(est.v_hat), truth[c]};
        }
        break;
      }
      case Method::ipw: {
        for (std::size_t c = 0; c < kPairs.size(); ++c) {
          ContrastEstimate est = ipw_att(df, gf, t, kPairs[c].first, kPairs[c].second);
          out.cells[mi][c] = {est.tau_hat, std::sqrt(est.v_hat), truth[c]};
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace

SimResult run_cell(const SimDesign& design, const std::vector<MethodSpec>& methods,
                   int R, std::uint64_t seed, int threads) {
  if (R < 1) throw Error("run_cell: R must be >= 1");
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(R));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= R) return;
      const std::uint64_t rep_seed = derive_seed(seed, {static_cast<std::uint64_t>(rep)});
      try {
        outcomes[static_cast<std::size_t>(rep)] = run_replication(design, methods, rep_seed);
      } catch (const Error&) {
        outcomes[static_cast<std::size_t>(rep)].skipped = true;
      }
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int skipped = 0;
  for (const auto& o : outcomes)
    if (o.skipped) ++skipped;
  if (skipped * 50 > R) {  // more than 2% of replications failed
    std::ostringstream msg;
    msg << "run_cell: " << skipped << " of " << R << " replications failed";
    throw Error(msg.str());
  }

  SimResult result;
  result.R = R;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    for (std::size_t c = 0; c < kPairs.size(); ++c) {
      std::vector<double> abs_bias, ses;
      int covered = 0, used = 0;
      for (const auto& o : outcomes) {
        if (o.skipped) continue;
        const auto& [tau, se, truth] = o.cells[mi][c];
        abs_bias.push_back(std::abs(tau - truth));
        ses.push_back(se);
        if (truth >= tau - 1.96 * se && truth <= tau + 1.96 * se) ++covered;
        ++used;
      }
      CellSummary row;
      row.method = methods[mi].name();
      row.j = kPairs[c].first;
      row.k = kPairs[c].second;
      row.skipped = skipped;
      row.coverage = used > 0 ? static_cast<double>(covered) / used : 0.0;
      double mean = 0.0;
      for (double v : abs_bias) mean += v;
      mean /= std::max<std::size_t>(1, abs_bias.size());
      row.mean_abs_bias = mean;
      double ss = 0.0;
      for (double v : abs_bias) ss += (v - mean) * (v - mean);
      row.sd_abs_bias = abs_bias.size() > 1 ? std::sqrt(ss / (abs_bias.size() - 1)) : 0.0;
      std::sort(ses.begin(), ses.end());
      row.median_se = ses.empty() ? 0.0
                      : (ses.size() % 2 == 1
                             ? ses[ses.size() / 2]
                             : 0.5 * (ses[ses.size() / 2 - 1] + ses[ses.size() / 2]));
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace gpsabb
