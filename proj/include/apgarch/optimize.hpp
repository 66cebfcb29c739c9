#pragma once

#include <Eigen/Dense>

#include <functional>

namespace apgarch::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
  double spread = 0.0;  // simplex diameter (Nelder-Mead) or projected gradient inf-norm (BFGS)
};

struct NelderMeadOptions {
  int max_iterations = 5000;
  double f_tolerance = 1e-8;   // spread of simplex values
  double x_tolerance = 1e-6;   // simplex diameter, inf-norm
  double initial_step = 0.1;   // relative to max(|x_i|, 0.05)
};

/// Adaptive-coefficient Nelder-Mead; every vertex is projected onto the box.
/// Non-finite objective values are ordered last.
Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& box,
                   const NelderMeadOptions& options = {});

struct BfgsOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-4;  // projected gradient inf-norm, times max(1, |f|)
  double f_tolerance = 1e-10;        // absolute objective improvement
  double step_scale = 1e-5;          // finite-difference step scale
};

/// Quasi-Newton on numerical gradients with coordinates clamped to the box.
/// Coordinates pinned at a bound with the gradient pointing outward are held
/// fixed for the step.
Result projected_bfgs(const Objective& f, const Eigen::VectorXd& x0, const Box& box,
                      const BfgsOptions& options = {});

/// Inf-norm of the gradient after zeroing components that point out of the box
/// at active bounds.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box);

}  // namespace apgarch::optim
