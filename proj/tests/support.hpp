#pragma once

#include "apgarch/params.hpp"
#include "apgarch/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace testing {

// Bivariate design of the n = 500..5000 Monte Carlo study with delta known.
inline apgarch::ModelSpec bivariate_spec() {
  apgarch::ModelSpec s = apgarch::ModelSpec::zeros({2, 0, 1});
  s.omega << 1.0, 1.0;
  s.a_plus[0] << 0.25, 0.05, 0.05, 0.25;
  s.a_minus[0].setConstant(0.5);
  s.r(0, 1) = s.r(1, 0) = 0.5;
  s.delta << 2.0, 2.0;
  return s;
}

// Thirteen-parameter Wald design: nu0 = (0.2, 0.3, 0.25, 0.05, 0.05, 0.25,
// 0.5, 0.5, 0.5, 0.5, tau1, tau2, 0.5).
inline apgarch::ModelSpec wald_design_spec(double tau1, double tau2) {
  apgarch::ModelSpec s = apgarch::ModelSpec::zeros({2, 0, 1});
  s.omega << 0.2, 0.3;
  s.a_plus[0] << 0.25, 0.05, 0.05, 0.25;
  s.a_minus[0].setConstant(0.5);
  s.r(0, 1) = s.r(1, 0) = 0.5;
  s.delta << tau1, tau2;
  return s;
}

inline apgarch::ModelSpec garch11_spec(double omega, double alpha_plus, double alpha_minus, double beta,
                                       double delta = 2.0) {
  apgarch::ModelSpec s = apgarch::ModelSpec::zeros({1, 1, 1});
  s.omega << omega;
  s.a_plus[0] << alpha_plus;
  s.a_minus[0] << alpha_minus;
  s.b[0] << beta;
  s.delta << delta;
  return s;
}

// Random correlation matrix from normalized Gaussian factor loadings.
inline Eigen::MatrixXd random_correlation(int m, apgarch::GaussianGenerator& g) {
  Eigen::MatrixXd f(m, m + 2);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m + 2; ++j) f(i, j) = g.normal();
  }
  Eigen::MatrixXd c = f * f.transpose();
  const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  c = d.asDiagonal() * c * d.asDiagonal();
  c = 0.5 * (c + c.transpose()).eval();
  c.diagonal().setOnes();
  return c;
}

// Valid spec with moderate coefficients; total persistence below 0.9 when
// small is set, unconstrained up to 0.5 per entry otherwise.
inline apgarch::ModelSpec random_spec(const apgarch::ModelOrders& o, apgarch::GaussianGenerator& g,
                                      bool small = true) {
  apgarch::ModelSpec s = apgarch::ModelSpec::zeros(o);
  const int m = o.m;
  const double lags = static_cast<double>(2 * o.q + o.p);
  const double cap = small ? 0.9 / (std::max(lags, 1.0) * m) : 0.5;
  for (int i = 0; i < m; ++i) {
    s.omega[i] = 0.1 + g.uniform();
    s.delta[i] = 0.5 + 2.0 * g.uniform();
  }
  for (auto& a : s.a_plus) a = cap * Eigen::MatrixXd::NullaryExpr(m, m, [&] { return g.uniform(); });
  for (auto& a : s.a_minus) a = cap * Eigen::MatrixXd::NullaryExpr(m, m, [&] { return g.uniform(); });
  for (auto& b : s.b) b = cap * Eigen::MatrixXd::NullaryExpr(m, m, [&] { return g.uniform(); });
  s.r = random_correlation(m, g);
  return s;
}

}  // namespace testing
