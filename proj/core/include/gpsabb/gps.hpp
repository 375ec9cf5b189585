#pragma once

#include <Eigen/Core>

#include "gpsabb/types.hpp"

namespace gpsabb {

/// Multinomial logistic regression coefficients, reference category Z fixed at zero.
struct GpsModel {
  Eigen::MatrixXd B;  // (Z-1) x (P+1), column 0 is the intercept
  bool converged = false;
  double final_log_likelihood = 0.0;
  int iterations = 0;
  int Z = 0;
  int P = 0;
};

/// Assignment probabilities and their logits, clamped away from {0, 1}.
struct GpsMatrix {
  Eigen::MatrixXd R;       // n x Z
  Eigen::MatrixXd logitR;  // n x Z
};

constexpr double kProbClamp = 1e-12;

// Penalized multinomial log-likelihood for coefficient matrix B ((Z-1) x (P+1)).
double multinomial_log_likelihood(const Dataset& data, const Eigen::MatrixXd& B,
                                  double ridge = 0.0);

// Newton-Raphson with step-halving; gradient max-norm tolerance 1e-8, 200 iterations.
GpsModel fit_gps(const Dataset& data, double ridge = 0.0);

GpsMatrix predict_gps(const GpsModel& model, const Dataset& data);

}  // namespace gpsabb
