#pragma once

#include "apgarch/estimate.hpp"
#include "apgarch/likelihood.hpp"
#include "apgarch/params.hpp"

#include <Eigen/Dense>

#include <map>

namespace apgarch {

/// Empirical I, J and the sandwich J^{-1} I J^{-1} for the QMLE.
struct SandwichCovariance {
  Eigen::MatrixXd i_hat;
  Eigen::MatrixXd j_hat;
  Eigen::MatrixXd sigma_hat;   // asymptotic covariance of sqrt(n) (v_hat - v0)
  Eigen::VectorXd std_errors;  // sqrt(diag(sigma_hat) / n)
  double j_condition = 0.0;
  long n = 0;
};

struct WaldOutcome {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::map<double, bool> reject_at;  // levels 0.10, 0.05, 0.01
};

/// Per-observation scores d l_t / d v at v by central differences (one-sided
/// where a probe is inadmissible), one row per observation (n x s0).
Eigen::MatrixXd per_observation_scores(const ParamVector& v, const QuasiLikelihood& criterion,
                                       double step_scale = 1e-5);

/// I_hat = (1/n) sum_t g_t g_t'.
Eigen::MatrixXd score_outer(const ParamVector& v, const QuasiLikelihood& criterion, double step_scale = 1e-5);
Eigen::MatrixXd score_outer(const FitResult& fit, const ReturnsMatrix& returns,
                            const InitPolicy& init = InitPolicy::zero_omega());

struct HessianEstimate {
  Eigen::MatrixXd j;          // symmetrized (H + H') / 2
  double condition = 0.0;     // ratio of extreme singular values
};

/// Second differences of f at x with steps h_i = step_scale * max(|x_i|, 1e-2);
/// cross terms use the four-point stencil. A coordinate whose backward
/// (forward) probe is not finite has its stencil centre moved forward
/// (backward) by h_i. Does not check conditioning.
HessianEstimate numerical_hessian(const ScalarFunction& f, const Eigen::VectorXd& x, double step_scale = 1e-4);

/// J_hat at v from the mean criterion. Throws IllConditionedJ when the
/// condition number exceeds 1e10.
HessianEstimate hessian(const ParamVector& v, const QuasiLikelihood& criterion, double step_scale = 1e-4);
HessianEstimate hessian(const FitResult& fit, const ReturnsMatrix& returns,
                        const InitPolicy& init = InitPolicy::zero_omega());

/// Combines I_hat and J_hat through linear solves. Throws IllConditionedJ.
SandwichCovariance sandwich_from(const Eigen::MatrixXd& i_hat, const Eigen::MatrixXd& j_hat, long n);
SandwichCovariance sandwich(const ParamVector& v, const QuasiLikelihood& criterion);
SandwichCovariance sandwich(const FitResult& fit, const ReturnsMatrix& returns,
                            const InitPolicy& init = InitPolicy::zero_omega());

/// W = n (C v - c)' (C Sigma C')^{-1} (C v - c), compared with chi2(s).
/// Throws RankDeficientConstraints or SingularConstraintCovariance.
WaldOutcome wald_test(const Eigen::VectorXd& v_hat, const SandwichCovariance& cov, const Eigen::MatrixXd& c_matrix,
                      const Eigen::VectorXd& c_vector);
WaldOutcome wald_test(const FitResult& fit, const SandwichCovariance& cov, const Eigen::MatrixXd& c_matrix,
                      const Eigen::VectorXd& c_vector);

/// Q(df/2, x/2), the upper tail of the chi-square distribution.
double chi2_upper_tail(double x, int df);

/// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

}  // namespace apgarch
