#include <doctest.h>

#include <cmath>

#include "gpsabb/ipw.hpp"
#include "helpers.hpp"

using namespace gpsabb;

namespace {

Dataset dataset_with(const std::vector<int>& W, const std::vector<double>& Y, int Z) {
  Dataset d;
  d.Z = Z;
  d.W = W;
  d.Y = Eigen::Map<const Eigen::VectorXd>(Y.data(), static_cast<Eigen::Index>(Y.size()));
  d.X.resize(static_cast<Eigen::Index>(W.size()), 0);
  return d;
}

}  // namespace

TEST_CASE("constant GPS rows reduce to a difference of group means") {
  // r(w, x) = n_w / n for every unit: weights are constant within each arm.
  const std::vector<int> W = {1, 1, 2, 2, 2, 3};
  const std::vector<double> Y = {1, 0, 1, 1, 0, 1};
  Dataset d = dataset_with(W, Y, 3);
  Eigen::MatrixXd R(6, 3);
  for (int i = 0; i < 6; ++i) R.row(i) << 2.0 / 6, 3.0 / 6, 1.0 / 6;
  GpsMatrix gps = testutil::gps_from_probs(R);

  ContrastEstimate est = ipw_att(d, gps, 1, 2, 3);
  const double mean2 = 2.0 / 3.0;
  const double mean3 = 1.0;
  CHECK(est.tau_hat == doctest::Approx(mean2 - mean3).epsilon(1e-14));

  ContrastEstimate est12 = ipw_att(d, gps, 1, 1, 2);
  CHECK(est12.tau_hat == doctest::Approx(0.5 - mean2).epsilon(1e-14));
}

TEST_CASE("identical outcomes give a zero contrast with zero variance") {
  Dataset d = dataset_with({1, 1, 2, 2}, {1, 1, 1, 1}, 2);
  GpsMatrix gps = testutil::gps_from_r1({0.3, 0.6, 0.4, 0.7});
  ContrastEstimate est = ipw_att(d, gps, 1, 1, 2);
  CHECK(est.tau_hat == doctest::Approx(0.0));
  CHECK(est.v_hat == doctest::Approx(0.0));
}

TEST_CASE("self contrast is exactly zero") {
  Dataset d = dataset_with({1, 2, 1, 2}, {1, 0, 0, 1}, 2);
  GpsMatrix gps = testutil::gps_from_r1({0.3, 0.6, 0.4, 0.7});
  ContrastEstimate est = ipw_att(d, gps, 1, 2, 2);
  CHECK(est.tau_hat == 0.0);
  CHECK(est.v_hat == 0.0);
}

TEST_CASE("six-unit hand instance matches the display formula") {
  // t = 1. Group 1: Y = (1, 0), weights 1 each -> mean 1/2.
  // Group 2: Y = (1, 0, 1, 0) with r(1,x) = (0.2, 0.4, 0.5, 0.8) and
  // r(2,x) = (0.8, 0.6, 0.5, 0.2), so u = (0.25, 2/3, 1, 4).
  Dataset d = dataset_with({1, 1, 2, 2, 2, 2}, {1, 0, 1, 0, 1, 0}, 2);
  Eigen::MatrixXd R(6, 2);
  R << 0.5, 0.5, 0.5, 0.5, 0.2, 0.8, 0.4, 0.6, 0.5, 0.5, 0.8, 0.2;
  GpsMatrix gps = testutil::gps_from_probs(R);

  const double u3 = 0.25, u4 = 2.0 / 3.0, u5 = 1.0, u6 = 4.0;
  const double sw = u3 + u4 + u5 + u6;
  const double mean2 = (u3 * 1 + u4 * 0 + u5 * 1 + u6 * 0) / sw;
  const double mean1 = 0.5;

  ContrastEstimate est = ipw_att(d, gps, 1, 1, 2);
  CHECK(est.tau_hat == doctest::Approx(mean1 - mean2).epsilon(1e-14));

  // variance: sum u^2 (y - mean)^2 / (sum u)^2, summed over both arms
  const double var1 = (std::pow(1 - 0.5, 2) + std::pow(0 - 0.5, 2)) / 4.0;
  const double var2 = (u3 * u3 * std::pow(1 - mean2, 2) + u4 * u4 * std::pow(0 - mean2, 2) +
                       u5 * u5 * std::pow(1 - mean2, 2) + u6 * u6 * std::pow(0 - mean2, 2)) /
                      (sw * sw);
  CHECK(est.v_hat == doctest::Approx(var1 + var2).epsilon(1e-14));
}

TEST_CASE("empty contrast group is rejected") {
  Dataset d = dataset_with({1, 1, 2, 2}, {1, 0, 1, 0}, 3);
  Eigen::MatrixXd R(4, 3);
  for (int i = 0; i < 4; ++i) R.row(i) << 0.4, 0.4, 0.2;
  GpsMatrix gps = testutil::gps_from_probs(R);
  CHECK_THROWS_AS(ipw_att(d, gps, 1, 1, 3), Error);
}
