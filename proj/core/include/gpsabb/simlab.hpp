#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpsabb/estimands.hpp"
#include "gpsabb/types.hpp"

namespace gpsabb {

enum class LinkKind { logistic, probit };

/// One cell of the factorial design: skew-t covariates for Z=3 groups,
/// binary or ordinal monotone response surfaces.
struct SimDesign {
  double b = 0.0;          // location separation in {0, 0.25, 0.5, 0.75, 1.0}
  double eta = 0.0;        // skewness in {-3.5, 0, 3.5}
  int gamma = 1;           // surface flip in {-1, 1}
  LinkKind link = LinkKind::logistic;
  OutcomeKind outcome_kind = OutcomeKind::binary;
  std::array<int, 3> group_sizes = {1200, 2400, 4800};
  int P = 18;
  double df = 7.0;
  Eigen::VectorXd beta_X;                           // defaults to (2,4,6,1,...,1)
  std::vector<double> alphas = {1, 0.05, -0.05, -1};  // ordinal cutpoints as printed
  int ordinal_levels = 5;

  // Desk preset: n=(300,600,1200); paper preset: n=(1200,2400,4800).
  static SimDesign desk_scale();
  static SimDesign paper_scale();

  Eigen::VectorXd beta() const;  // beta_X or the default when empty
  Eigen::VectorXd location(int w) const;  // mu_w: b_w tiled across P coordinates
};

struct MethodSpec {
  Method method = Method::abb;
  int Q = 1;  // ABB cluster count

  std::string name() const;
  static MethodSpec parse(const std::string& s);  // "abb:5", "matching", "ipw"
};

struct CellSummary {
  std::string method;
  int j = 0, k = 0;
  double coverage = 0.0;
  double mean_abs_bias = 0.0;
  double sd_abs_bias = 0.0;
  double median_se = 0.0;
  int skipped = 0;
};

struct SimResult {
  int R = 0;
  std::vector<CellSummary> rows;
};

// Rows i.i.d. multivariate skew-t_{df}: per-coordinate skew-normal numerator,
// one chi-square denominator per row, location mu_w.
Eigen::MatrixXd gen_covariates(const SimDesign& design, int w, int n_w, std::uint64_t seed);

// n x 3 matrix of potential outcomes Y(w) in {0,1}; group 1 surface G^{-1}(X b'),
// groups 2 and 3 G^{-1}(gamma X b').
Eigen::MatrixXd gen_binary_outcomes(const Eigen::MatrixXd& X, const SimDesign& design,
                                    std::uint64_t seed);

// n x 3 matrix of Y(w) in {1..5} from the proportional-odds model, one shared
// surface for all groups; cutpoints sorted ascending before use.
Eigen::MatrixXd gen_ordinal_outcomes(const Eigen::MatrixXd& X, const SimDesign& design,
                                     std::uint64_t seed);

// Plug generated potential outcomes of eligible reference units into the
// estimand's sample formula: the per-replication truth.
double true_att(const Eigen::MatrixXd& potential_outcomes, const std::vector<int>& W,
                const std::vector<bool>& eligible, int t, int j, int k, Estimand estimand);

SimResult run_cell(const SimDesign& design, const std::vector<MethodSpec>& methods,
                   int R, std::uint64_t seed, int threads = 1);

}  // namespace gpsabb
