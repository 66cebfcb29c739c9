#pragma once

#include "apgarch/params.hpp"
#include "apgarch/volatility.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>

namespace apgarch {

/// Gaussian quasi-likelihood criterion: total = (1/n) sum_t l_t with
/// l_t = eps_t' H_t^{-1} eps_t + log|H_t|. The (2 pi)^{m/2} constant is
/// omitted. Invalid parameters or exploding paths give total = +inf.
struct ObjectiveValue {
  double total = std::numeric_limits<double>::infinity();
  Eigen::VectorXd per_obs;
  bool valid = false;
};

/// Criterion bound to one data set. Precomputes log|eps| so that powers
/// other than 2 cost one exp per entry.
class QuasiLikelihood {
 public:
  explicit QuasiLikelihood(const ReturnsMatrix& returns, InitPolicy init = InitPolicy::zero_omega());

  ObjectiveValue evaluate(const ParamVector& v) const;

  /// Mean criterion only (no per-observation storage); +inf when invalid.
  double mean(const ParamVector& v) const;

  long n() const { return static_cast<long>(eps_.cols()); }
  int m() const { return static_cast<int>(eps_.rows()); }
  const InitPolicy& init() const { return init_; }

 private:
  double run(const ModelSpec& spec, Eigen::VectorXd* per_obs) const;

  Eigen::MatrixXd eps_;      // m x n
  Eigen::MatrixXd log_abs_;  // m x n, log|eps| (unused where eps == 0)
  InitPolicy init_;
};

ObjectiveValue neg_quasi_loglik(const ParamVector& v, const ReturnsMatrix& returns,
                                const InitPolicy& init = InitPolicy::zero_omega());

/// Cheap admissibility check used by the criterion: omega > 0, delta > 0,
/// coefficient matrices >= 0, everything finite, R positive definite.
bool is_admissible(const ModelSpec& spec);

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient with steps h_i = step_scale * max(|x_i|, 1e-4).
/// Coordinates whose probe lands on a non-finite value fall back to a
/// one-sided difference. Throws GradientAtInvalidPoint when f(x) is not finite
/// or both probes of a coordinate are.
Eigen::VectorXd numerical_gradient(const ScalarFunction& f, const Eigen::VectorXd& x, double step_scale = 1e-5);

/// Gradient of the mean criterion with respect to the packed parameters.
Eigen::VectorXd loglik_gradient(const ParamVector& v, const ReturnsMatrix& returns,
                                const InitPolicy& init = InitPolicy::zero_omega(), double step_scale = 1e-5);

}  // namespace apgarch
