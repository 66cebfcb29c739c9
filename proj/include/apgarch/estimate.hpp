#pragma once

#include "apgarch/likelihood.hpp"
#include "apgarch/optimize.hpp"
#include "apgarch/params.hpp"
#include "apgarch/volatility.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace apgarch {

/// Per-coordinate box for the packed parameters:
/// omega in [1e-6, 1e3], coefficients in [0, 10], delta in [0.05, 4],
/// rho in [-0.999, 0.999].
optim::Box default_bounds(const ModelOrders& orders, EstimationMode::Kind kind);

struct FitOptions {
  EstimationMode mode = EstimationMode::known(Eigen::VectorXd());
  std::optional<optim::Box> bounds;  // default_bounds() when empty
  int starts = 1;
  int retry_starts = 4;  // extra jittered starts tried while the best one has not converged
  int max_iterations = 5000;
  double tolerance = 1e-10;           // absolute objective improvement
  double gradient_tolerance = 1e-6;   // optimizer target: projected gradient inf-norm, scaled by max(1, |f|)
  double convergence_tolerance = 1e-4;  // same norm accepted as converged
  double simplex_tolerance = 1e-6;    // coarse Nelder-Mead value spread
  std::uint64_t seed = 1;             // start jitter
  InitPolicy init = InitPolicy::zero_omega();
  std::optional<Eigen::VectorXd> start;  // overrides the heuristic first start
};

struct FitResult {
  ParamVector v_hat;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  int start_index = 0;
  long n = 0;
  long evaluations = 0;
  double gradient_norm = 0.0;          // projected gradient inf-norm at v_hat
  std::vector<int> boundary_active;    // coordinates sitting on a bound
  std::vector<double> start_objectives;  // polished objective per start (+inf if invalid)
};

/// Heuristic first start: omega_i = 0.5 mean |eps_i|^d (times 0.2 when p >= 1),
/// A+ = A- = 0.05 I, B_1 = 0.8 I, rho from the sample correlation, d = 1.5
/// when the power is estimated.
Eigen::VectorXd heuristic_start(const ReturnsMatrix& returns, const ModelOrders& orders,
                                const EstimationMode& mode, const optim::Box& box);

/// Gaussian QMLE: coarse Nelder-Mead from each start followed by projected
/// BFGS on numerical gradients; the best polished start wins.
/// Throws NotEnoughData (n <= parameter count) or AllStartsInvalid.
FitResult fit_qmle(const ReturnsMatrix& returns, const ModelOrders& orders, const FitOptions& options);

}  // namespace apgarch
