#include "upliftfs/regression.h"

#include <algorithm>
#include <cmath>

namespace upliftfs {

OlsFit FitOls(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  OlsFit fit;
  const long p = design.cols();
  fit.df_resid = design.rows() - p;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) return fit;
  fit.full_rank = true;
  fit.coef = qr.solve(y);
  fit.rss = (y - design * fit.coef).squaredNorm();
  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd unpermuted = r_inv * r_inv.transpose();
  fit.xtx_inverse = qr.colsPermutation() * unpermuted *
                    qr.colsPermutation().transpose();
  return fit;
}

namespace {

double LogOnePlusExp(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                   : std::log1p(std::exp(eta));
}

double Sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

double LogisticLogLikelihood(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const Eigen::VectorXd& coef) {
  const Eigen::VectorXd eta = design * coef;
  double ll = 0.0;
  for (long i = 0; i < eta.size(); ++i) {
    ll += y[i] * eta[i] - LogOnePlusExp(eta[i]);
  }
  return ll;
}

LogisticFit FitLogistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        const LogisticOptions& options) {
  const long n = design.rows();
  const long p = design.cols();
  LogisticFit fit;
  fit.coef = Eigen::VectorXd::Zero(p);
  fit.log_likelihood = LogisticLogLikelihood(design, y, fit.coef);

  Eigen::VectorXd prob(n), weight(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd eta = design * fit.coef;
    for (long i = 0; i < n; ++i) {
      prob[i] = Sigmoid(eta[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd gradient = design.transpose() * (y - prob);
    if (gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      fit.converged = true;
      fit.iterations = it;
      return fit;
    }
    const Eigen::MatrixXd hessian =
        design.transpose() * weight.asDiagonal() * design;
    Eigen::VectorXd step = hessian.ldlt().solve(gradient);
    if (!step.allFinite()) step = gradient;

    // Halve until the likelihood does not decrease. Near the optimum the
    // change is below the rounding noise of an n-term sum, hence the slack.
    const double slack = 1e-12 * std::max(1.0, std::abs(fit.log_likelihood));
    double ll_new = 0.0;
    Eigen::VectorXd candidate;
    bool accepted = false;
    for (int half = 0; half < 40 && !accepted; ++half) {
      candidate = (fit.coef + step)
                      .cwiseMax(-options.coefficient_bound)
                      .cwiseMin(options.coefficient_bound);
      ll_new = LogisticLogLikelihood(design, y, candidate);
      accepted = ll_new >= fit.log_likelihood - slack;
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent direction
    fit.coef = candidate;
    fit.log_likelihood = ll_new;
    fit.iterations = it + 1;
  }
  // One last gradient check for fits that converged on the final step.
  const Eigen::VectorXd eta = design * fit.coef;
  for (long i = 0; i < n; ++i) prob[i] = Sigmoid(eta[i]);
  const Eigen::VectorXd gradient = design.transpose() * (y - prob);
  fit.converged = gradient.cwiseAbs().maxCoeff() < options.gradient_tolerance;
  fit.clamped = !fit.converged;
  return fit;
}

}  // namespace upliftfs
