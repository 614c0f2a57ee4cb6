#ifndef UPLIFTFS_REGRESSION_H_
#define UPLIFTFS_REGRESSION_H_

#include <Eigen/Dense>

namespace upliftfs {

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd xtx_inverse;  // (X'X)^-1, empty when rank deficient
  double rss = 0.0;
  long df_resid = 0;
  bool full_rank = false;
};

// Least squares through a column-pivoting QR.
OlsFit FitOls(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

struct LogisticOptions {
  int max_iterations = 100;
  // Converged once max |X'(y - p)| drops below this.
  double gradient_tolerance = 1e-8;
  // Separation guard: every coefficient is kept inside [-bound, bound].
  double coefficient_bound = 15.0;
};

struct LogisticFit {
  Eigen::VectorXd coef;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  // Set when the fit stopped without converging; the returned coefficients
  // are the last (box-constrained) iterate.
  bool clamped = false;
};

// Newton-Raphson (IRLS) with step halving, started from zero.
LogisticFit FitLogistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        const LogisticOptions& options = {});

double LogisticLogLikelihood(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             const Eigen::VectorXd& coef);

}  // namespace upliftfs

#endif  // UPLIFTFS_REGRESSION_H_
