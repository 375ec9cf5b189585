#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gpsabb/gps.hpp"
#include "helpers.hpp"

using namespace gpsabb;

namespace {

// Seeded Z=3 instance with covariate-driven assignment (softmax of a fixed
// linear predictor), used by the gradient and normalization checks.
Dataset softmax_instance(int n, int P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset d;
  d.Z = 3;
  d.X.resize(n, P);
  d.Y.resize(n);
  Eigen::MatrixXd B(2, P + 1);  // true coefficients, reference category 3
  for (int c = 0; c < 2; ++c)
    for (int p = 0; p <= P; ++p) B(c, p) = 0.5 * normal(rng);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < P; ++p) d.X(i, p) = normal(rng);
    double e1 = B(0, 0), e2 = B(1, 0);
    for (int p = 0; p < P; ++p) {
      e1 += B(0, p + 1) * d.X(i, p);
      e2 += B(1, p + 1) * d.X(i, p);
    }
    const double denom = std::exp(e1) + std::exp(e2) + 1.0;
    const double u = unif(rng);
    int w = 3;
    if (u < std::exp(e1) / denom)
      w = 1;
    else if (u < (std::exp(e1) + std::exp(e2)) / denom)
      w = 2;
    d.W.push_back(w);
    d.Y[i] = 0.0;
  }
  return d;
}

}  // namespace

TEST_CASE("intercept-only fit returns the group proportions") {
  Dataset d;
  d.Z = 3;
  const int sizes[3] = {10, 20, 30};
  d.X.resize(60, 0);
  d.Y = Eigen::VectorXd::Zero(60);
  for (int w = 1; w <= 3; ++w)
    for (int i = 0; i < sizes[w - 1]; ++i) d.W.push_back(w);

  GpsModel model = fit_gps(d);
  CHECK(model.converged);
  GpsMatrix gps = predict_gps(model, d);
  for (int i = 0; i < d.n(); ++i) {
    CHECK(gps.R(i, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    CHECK(gps.R(i, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(gps.R(i, 2) == doctest::Approx(1.0 / 2.0).epsilon(1e-10));
  }
}

TEST_CASE("Z=2 fit matches an independent scalar Newton solve") {
  // 6-point toy: logit P(W=1 | x) = b0 + b1 x, category 2 is the reference.
  Dataset d;
  d.Z = 2;
  d.X.resize(6, 1);
  d.X << -2.0, -1.0, 0.0, 0.5, 1.0, 2.0;
  d.W = {1, 2, 1, 2, 1, 1};
  d.Y = Eigen::VectorXd::Zero(6);

  // Oracle: damped Newton on the two-parameter binary log-likelihood.
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 6; ++i) {
      const double x = d.X(i, 0);
      const double eta = beta[0] + beta[1] * x;
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double y = d.W[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
      Eigen::Vector2d xi(1.0, x);
      grad += (y - p) * xi;
      hess += p * (1.0 - p) * xi * xi.transpose();
    }
    Eigen::Vector2d step = hess.ldlt().solve(grad);
    beta += step;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12) break;
  }

  GpsModel model = fit_gps(d);
  CHECK(model.converged);
  REQUIRE(model.B.rows() == 1);
  CHECK(model.B(0, 0) == doctest::Approx(beta[0]).epsilon(1e-6));
  CHECK(model.B(0, 1) == doctest::Approx(beta[1]).epsilon(1e-6));
}

TEST_CASE("analytic gradient at the optimum agrees with central finite differences") {
  Dataset d = softmax_instance(500, 5, 91);
  GpsModel model = fit_gps(d);
  CHECK(model.converged);

  const double h = 1e-5;
  double max_fd = 0.0;
  for (int c = 0; c < model.B.rows(); ++c) {
    for (int p = 0; p < model.B.cols(); ++p) {
      Eigen::MatrixXd Bp = model.B, Bm = model.B;
      Bp(c, p) += h;
      Bm(c, p) -= h;
      const double fd =
          (multinomial_log_likelihood(d, Bp) - multinomial_log_likelihood(d, Bm)) / (2.0 * h);
      max_fd = std::max(max_fd, std::abs(fd));
    }
  }
  CHECK(max_fd < 1e-6);
}

TEST_CASE("predicted rows sum to one and stay strictly inside (0,1)") {
  Dataset d = softmax_instance(400, 4, 12);
  GpsModel model = fit_gps(d);
  GpsMatrix gps = predict_gps(model, d);
  for (int i = 0; i < d.n(); ++i) {
    CHECK(gps.R.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
    for (int w = 0; w < d.Z; ++w) {
      CHECK(gps.R(i, w) > 0.0);
      CHECK(gps.R(i, w) < 1.0);
    }
  }
}

TEST_CASE("all-zero coefficients predict the uniform distribution") {
  GpsModel model;
  model.Z = 3;
  model.P = 2;
  model.B = Eigen::MatrixXd::Zero(2, 3);
  Dataset d;
  d.Z = 3;
  d.X.resize(4, 2);
  d.X << 1.0, -1.0, 0.5, 2.0, -3.0, 0.0, 0.0, 0.0;
  d.W = {1, 2, 3, 1};
  d.Y = Eigen::VectorXd::Zero(4);
  GpsMatrix gps = predict_gps(model, d);
  for (int i = 0; i < 4; ++i)
    for (int w = 0; w < 3; ++w)
      CHECK(gps.R(i, w) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("permuting the treatment labels permutes the probability columns") {
  Dataset d = softmax_instance(300, 3, 55);
  GpsModel m1 = fit_gps(d);
  GpsMatrix g1 = predict_gps(m1, d);

  const int perm[4] = {0, 2, 3, 1};  // 1->2, 2->3, 3->1
  Dataset dp = d;
  for (auto& w : dp.W) w = perm[w];
  GpsModel m2 = fit_gps(dp);
  GpsMatrix g2 = predict_gps(m2, dp);

  for (int i = 0; i < d.n(); ++i)
    for (int w = 1; w <= 3; ++w)
      CHECK(g2.R(i, perm[w] - 1) == doctest::Approx(g1.R(i, w - 1)).epsilon(1e-6));
}

TEST_CASE("rank-deficient design is rejected") {
  Dataset d;
  d.Z = 2;
  d.X.resize(8, 2);
  for (int i = 0; i < 8; ++i) {
    d.X(i, 0) = i;
    d.X(i, 1) = 2.0 * i;  // collinear
    d.W.push_back(1 + i % 2);
  }
  d.Y = Eigen::VectorXd::Zero(8);
  CHECK_THROWS_WITH_AS(fit_gps(d), doctest::Contains("rank deficient"), Error);
}

TEST_CASE("ridge keeps separated data away from the boundary") {
  // Perfectly separated labels: the unpenalized likelihood pushes the slope
  // toward infinity (the fit either reports the divergence or stops at a huge
  // coefficient once the gradient has flattened out).
  Dataset d;
  d.Z = 2;
  d.X.resize(8, 1);
  d.X << -4, -3, -2, -1, 1, 2, 3, 4;
  d.W = {2, 2, 2, 2, 1, 1, 1, 1};
  d.Y = Eigen::VectorXd::Zero(8);

  GpsModel ridged = fit_gps(d, 1e-4);
  CHECK(ridged.converged);
  CHECK(ridged.B.lpNorm<Eigen::Infinity>() < 1e2);

  try {
    GpsModel free = fit_gps(d, 0.0);
    CHECK(free.B.lpNorm<Eigen::Infinity>() > ridged.B.lpNorm<Eigen::Infinity>());
  } catch (const Error&) {
    // quasi-separation diagnosis is also acceptable
  }
}
