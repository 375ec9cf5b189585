#include "gpsabb/gps.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace gpsabb {

namespace {

Eigen::MatrixXd design_matrix(const Dataset& data) {
  Eigen::MatrixXd D(data.n(), data.P() + 1);
  D.col(0).setOnes();
  if (data.P() > 0) D.rightCols(data.P()) = data.X;
  return D;
}

// Row-wise softmax of [eta | 0]; eta is n x (Z-1).
Eigen::MatrixXd softmax_probs(const Eigen::MatrixXd& eta) {
  const auto n = eta.rows();
  const auto Zm1 = eta.cols();
  Eigen::MatrixXd probs(n, Zm1 + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = 0.0;
    for (Eigen::Index c = 0; c < Zm1; ++c) mx = std::max(mx, eta(i, c));
    double denom = std::exp(-mx);
    for (Eigen::Index c = 0; c < Zm1; ++c) denom += std::exp(eta(i, c) - mx);
    for (Eigen::Index c = 0; c < Zm1; ++c) probs(i, c) = std::exp(eta(i, c) - mx) / denom;
    probs(i, Zm1) = std::exp(-mx) / denom;
  }
  return probs;
}

}  // namespace

double multinomial_log_likelihood(const Dataset& data, const Eigen::MatrixXd& B,
                                  double ridge) {
  const Eigen::MatrixXd D = design_matrix(data);
  const Eigen::MatrixXd eta = D * B.transpose();  // n x (Z-1)
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double mx = 0.0;
    for (Eigen::Index c = 0; c < eta.cols(); ++c) mx = std::max(mx, eta(i, c));
    double denom = std::exp(-mx);
    for (Eigen::Index c = 0; c < eta.cols(); ++c) denom += std::exp(eta(i, c) - mx);
    const int w = data.W[i];
    const double eta_w = (w == data.Z) ? 0.0 : eta(i, w - 1);
    ll += (eta_w - mx) - std::log(denom);
  }
  if (ridge > 0.0) ll -= ridge * B.squaredNorm();
  return ll;
}

GpsModel fit_gps(const Dataset& data, double ridge) {
  data.validate();
  const int Z = data.Z;
  const int P = data.P();
  const int n = data.n();
  if (n < Z) throw Error("fit_gps: need n >= Z");

  const Eigen::MatrixXd D = design_matrix(data);
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    if (qr.rank() < P + 1) {
      std::ostringstream msg;
      msg << "fit_gps: design matrix is rank deficient (rank " << qr.rank()
          << " < " << P + 1 << " columns)";
      throw Error(msg.str());
    }
  }

  const int K = Z - 1;
  const int d = P + 1;
  const int nparam = K * d;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(K, d);
  double ll = multinomial_log_likelihood(data, B, ridge);

  // Indicator matrix for the non-reference categories.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, K);
  for (int i = 0; i < n; ++i)
    if (data.W[i] != Z) T(i, data.W[i] - 1) = 1.0;

  GpsModel model;
  model.Z = Z;
  model.P = P;

  constexpr double grad_tol = 1e-8;
  constexpr int max_iter = 200;
  double grad_norm = 0.0;

  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::MatrixXd probs = softmax_probs(D * B.transpose());
    const Eigen::MatrixXd resid = T - probs.leftCols(K);  // n x K

    Eigen::VectorXd grad(nparam);
    for (int c = 0; c < K; ++c)
      grad.segment(static_cast<Eigen::Index>(c) * d, d) = D.transpose() * resid.col(c);
    if (ridge > 0.0)
      for (int c = 0; c < K; ++c)
        grad.segment(static_cast<Eigen::Index>(c) * d, d) -= 2.0 * ridge * B.row(c).transpose();

    grad_norm = grad.lpNorm<Eigen::Infinity>();
    model.iterations = iter;
    if (grad_norm < grad_tol) {
      model.converged = true;
      break;
    }

    // Negative Hessian of the log-likelihood (positive definite up to separation).
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nparam, nparam);
    for (int c = 0; c < K; ++c) {
      for (int e = c; e < K; ++e) {
        Eigen::ArrayXd wgt = probs.col(c).array() * ((c == e ? 1.0 : 0.0) - probs.col(e).array());
        Eigen::MatrixXd block = D.transpose() * wgt.matrix().asDiagonal() * D;
        H.block(static_cast<Eigen::Index>(c) * d, static_cast<Eigen::Index>(e) * d, d, d) = block;
        if (e != c)
          H.block(static_cast<Eigen::Index>(e) * d, static_cast<Eigen::Index>(c) * d, d, d) =
              block.transpose();
      }
    }
    if (ridge > 0.0) H.diagonal().array() += 2.0 * ridge;

    Eigen::VectorXd step;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    bool newton_ok = (ldlt.info() == Eigen::Success);
    if (newton_ok) {
      step = ldlt.solve(grad);
      newton_ok = step.allFinite() && grad.dot(step) > 0.0;  // ascent direction
    }
    if (!newton_ok) step = grad;  // gradient fallback

    // Step-halving until the log-likelihood does not decrease.
    double alpha = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      Eigen::MatrixXd B_try = B;
      for (int c = 0; c < K; ++c)
        B_try.row(c) += alpha * step.segment(static_cast<Eigen::Index>(c) * d, d).transpose();
      const double ll_try = multinomial_log_likelihood(data, B_try, ridge);
      if (ll_try > ll) {  // strict: an equal value means the step rounded away
        B = B_try;
        ll = ll_try;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      // Near the optimum the likelihood gain falls below double rounding and
      // step-halving cannot measure it; accept a full Newton step if it still
      // shrinks the gradient.
      Eigen::MatrixXd B_try = B;
      for (int c = 0; c < K; ++c)
        B_try.row(c) += step.segment(static_cast<Eigen::Index>(c) * d, d).transpose();
      const Eigen::MatrixXd probs_try = softmax_probs(D * B_try.transpose());
      const Eigen::MatrixXd resid_try = T - probs_try.leftCols(K);
      double g_try = 0.0;
      for (int c = 0; c < K; ++c) {
        Eigen::VectorXd gc = D.transpose() * resid_try.col(c);
        if (ridge > 0.0) gc -= 2.0 * ridge * B_try.row(c).transpose();
        g_try = std::max(g_try, gc.lpNorm<Eigen::Infinity>());
      }
      if (g_try < grad_norm) {
        B = B_try;
        ll = std::max(ll, multinomial_log_likelihood(data, B, ridge));
        continue;
      }
      break;  // at a numerical stationary point
    }

    if (B.lpNorm<Eigen::Infinity>() > 1e4) {
      throw Error(
          "fit_gps: coefficient norm is diverging (quasi-separation); "
          "rerun with a ridge penalty (e.g. ridge=1e-4)");
    }
  }

  if (!model.converged) {
    // Re-check the gradient at the final iterate.
    const Eigen::MatrixXd probs = softmax_probs(D * B.transpose());
    const Eigen::MatrixXd resid = T - probs.leftCols(K);
    double g = 0.0;
    for (int c = 0; c < K; ++c) {
      Eigen::VectorXd gc = D.transpose() * resid.col(c);
      if (ridge > 0.0) gc -= 2.0 * ridge * B.row(c).transpose();
      g = std::max(g, gc.lpNorm<Eigen::Infinity>());
    }
    if (g < grad_tol) {
      model.converged = true;
    } else {
      std::ostringstream msg;
      msg << "fit_gps: no convergence after " << max_iter
          << " iterations (gradient max-norm " << g << ")";
      throw Error(msg.str());
    }
  }

  model.B = B;
  model.final_log_likelihood = ll;
  return model;
}

GpsMatrix predict_gps(const GpsModel& model, const Dataset& data) {
  if (data.P() != model.P)
    throw Error("predict_gps: covariate dimension mismatch");
  const Eigen::MatrixXd D = design_matrix(data);
  GpsMatrix out;
  out.R = softmax_probs(D * model.B.transpose());
  out.R = out.R.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
  out.logitR = (out.R.array() / (1.0 - out.R.array())).log().matrix();
  return out;
}

}  // namespace gpsabb
