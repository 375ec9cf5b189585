#include <doctest.h>

#include <cmath>

#include "gpsabb/simlab.hpp"

using namespace gpsabb;

namespace {

double sample_mean(const Eigen::VectorXd& v) { return v.mean(); }

double sample_var(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

double sample_skewness(const Eigen::VectorXd& v) {
  const double m = v.mean();
  const double s2 = (v.array() - m).square().mean();
  const double s3 = (v.array() - m).cube().mean();
  return s3 / std::pow(s2, 1.5);
}

}  // namespace

TEST_CASE("method specs parse and print") {
  MethodSpec abb5 = MethodSpec::parse("abb:5");
  CHECK(abb5.method == Method::abb);
  CHECK(abb5.Q == 5);
  CHECK(abb5.name() == "abb:5");
  CHECK(MethodSpec::parse("matching").method == Method::matching);
  CHECK(MethodSpec::parse("ipw").method == Method::ipw);
  CHECK(MethodSpec::parse("abb").Q == 1);
  CHECK_THROWS_AS(MethodSpec::parse("abb:0"), Error);
  CHECK_THROWS_AS(MethodSpec::parse("nope"), Error);
}

TEST_CASE("presets and the default response coefficients") {
  SimDesign desk = SimDesign::desk_scale();
  CHECK(desk.group_sizes == std::array<int, 3>{300, 600, 1200});
  SimDesign paper = SimDesign::paper_scale();
  CHECK(paper.group_sizes == std::array<int, 3>{1200, 2400, 4800});
  Eigen::VectorXd beta = desk.beta();
  REQUIRE(beta.size() == 18);
  CHECK(beta[0] == 2.0);
  CHECK(beta[1] == 4.0);
  CHECK(beta[2] == 6.0);
  CHECK(beta[17] == 1.0);
}

TEST_CASE("location tiles b into the group's coordinate slots") {
  SimDesign d;
  d.b = 0.5;
  d.P = 6;
  Eigen::VectorXd mu2 = d.location(2);  // slots p % 3 == 1
  for (int p = 0; p < 6; ++p)
    CHECK(mu2[p] == (p % 3 == 1 ? 0.5 : 0.0));
}

TEST_CASE("central skew-t coordinates have t7 variance and no skew") {
  SimDesign d;
  d.b = 0.0;
  d.eta = 0.0;
  d.P = 2;
  Eigen::MatrixXd X = gen_covariates(d, 1, 100000, 5);
  // t7 variance df/(df-2) = 1.4; 3 MC SEs of the variance ~ 0.027
  CHECK(std::abs(sample_var(X.col(0)) - 1.4) < 0.04);
  CHECK(std::abs(sample_mean(X.col(0))) < 0.02);
  CHECK(std::abs(sample_skewness(X.col(0))) < 0.1);
}

TEST_CASE("skewness follows the sign of eta") {
  SimDesign d;
  d.P = 1;
  d.eta = 3.5;
  Eigen::MatrixXd pos = gen_covariates(d, 1, 100000, 6);
  d.eta = -3.5;
  Eigen::MatrixXd neg = gen_covariates(d, 1, 100000, 6);
  CHECK(sample_skewness(pos.col(0)) > 0.2);
  CHECK(sample_skewness(neg.col(0)) < -0.2);
}

TEST_CASE("group location separates the tiled coordinate slots by b") {
  SimDesign d;
  d.b = 0.5;
  d.eta = 0.0;
  d.P = 6;
  Eigen::MatrixXd X = gen_covariates(d, 2, 20000, 8);
  // coordinates 1, 4 belong to group 2's slot; 0, 3 do not
  const double in_slot = 0.5 * (sample_mean(X.col(1)) + sample_mean(X.col(4)));
  const double off_slot = 0.5 * (sample_mean(X.col(0)) + sample_mean(X.col(3)));
  CHECK(std::abs(in_slot - off_slot - 0.5) < 0.05);
}

TEST_CASE("binary surfaces are identical across groups when gamma = 1") {
  SimDesign d;
  d.gamma = 1;
  d.P = 3;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(20000, 3);  // X beta' = 0 -> p = 0.5
  for (LinkKind link : {LinkKind::logistic, LinkKind::probit}) {
    d.link = link;
    Eigen::MatrixXd po = gen_binary_outcomes(X, d, 9);
    for (int w = 0; w < 3; ++w)
      CHECK(std::abs(po.col(w).mean() - 0.5) < 0.015);
  }
}

TEST_CASE("gamma = -1 flips the non-reference surfaces") {
  SimDesign d;
  d.gamma = -1;
  d.P = 3;
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(200, 3, 5.0);  // huge X beta'
  Eigen::MatrixXd po = gen_binary_outcomes(X, d, 10);
  CHECK((po.col(0).array() == 1.0).all());  // p1 -> 1
  CHECK((po.col(1).array() == 0.0).all());  // p2 = G^{-1}(-z) -> 0
  CHECK((po.col(2).array() == 0.0).all());
}

TEST_CASE("ordinal surface at X beta' = 0 matches the sorted-cutpoint CDF") {
  SimDesign d;
  d.outcome_kind = OutcomeKind::ordinal;
  d.P = 2;
  const int n = 100000;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd po = gen_ordinal_outcomes(X, d, 11);
  // sorted cutpoints (-1, -0.05, 0.05, 1) -> cumulative (0.2689, 0.4875, 0.5125, 0.7311)
  const double cum[4] = {1 / (1 + std::exp(1.0)), 1 / (1 + std::exp(0.05)),
                         1 / (1 + std::exp(-0.05)), 1 / (1 + std::exp(-1.0))};
  double probs[5];
  probs[0] = cum[0];
  for (int j = 1; j < 4; ++j) probs[j] = cum[j] - cum[j - 1];
  probs[4] = 1.0 - cum[3];
  for (int level = 1; level <= 5; ++level) {
    const double freq =
        (po.col(0).array() == static_cast<double>(level)).cast<double>().mean();
    const double se = std::sqrt(probs[level - 1] * (1 - probs[level - 1]) / n);
    CHECK(std::abs(freq - probs[level - 1]) < 3.5 * se);
  }
}

TEST_CASE("extreme linear predictor collapses the ordinal distribution") {
  SimDesign d;
  d.outcome_kind = OutcomeKind::ordinal;
  d.P = 2;
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(100, 2, 10.0);
  Eigen::MatrixXd po = gen_ordinal_outcomes(X, d, 12);
  CHECK((po.array() == 1.0).all());
}

TEST_CASE("true_att hand instance and self-contrast") {
  Eigen::MatrixXd po(6, 3);
  po << 1, 0, 1,  //
      0, 0, 1,    //
      1, 1, 0,    //
      0, 1, 1,    //
      1, 0, 0,    //
      1, 1, 1;
  std::vector<int> W = {1, 1, 1, 2, 2, 3};
  std::vector<bool> eligible = {true, true, false, true, true, true};
  // eligible reference units: rows 0, 1 -> Y(2) = (0, 0), Y(3) = (1, 1)
  CHECK(true_att(po, W, eligible, 1, 2, 3, Estimand::risk_difference) ==
        doctest::Approx(-1.0));
  CHECK(true_att(po, W, eligible, 1, 1, 2, Estimand::risk_difference) ==
        doctest::Approx(0.5));
  CHECK(true_att(po, W, eligible, 1, 2, 2, Estimand::risk_difference) == 0.0);
}

TEST_CASE("run_cell is deterministic and thread-count invariant") {
  SimDesign d = SimDesign::desk_scale();
  d.group_sizes = {60, 120, 240};
  d.b = 0.25;
  std::vector<MethodSpec> methods = {MethodSpec::parse("abb:2"), MethodSpec::parse("ipw")};
  SimResult a = run_cell(d, methods, 6, 314, 1);
  SimResult b = run_cell(d, methods, 6, 314, 3);
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.rows.size() == 6);  // 2 methods x 3 contrasts
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].method == b.rows[i].method);
    CHECK(a.rows[i].coverage == b.rows[i].coverage);
    CHECK(a.rows[i].mean_abs_bias == b.rows[i].mean_abs_bias);
    CHECK(a.rows[i].sd_abs_bias == b.rows[i].sd_abs_bias);
    CHECK(a.rows[i].median_se == b.rows[i].median_se);
    CHECK(a.rows[i].skipped == b.rows[i].skipped);
  }
}
