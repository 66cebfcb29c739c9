#pragma once

#include "apgarch/params.hpp"
#include "apgarch/volatility.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace apgarch {

/// Lower-triangular L with L L' = R. Throws NonPositiveDefiniteCorrelation.
Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& r);

/// Innovation law for eta_t; every option has zero mean and identity covariance.
enum class Innovation { Gaussian, StudentT };

struct SimulationOptions {
  long n = 1000;
  long burn_in = 1000;
  std::uint64_t seed = 1;
  Innovation innovation = Innovation::Gaussian;
  double student_dof = 8.0;  // only for StudentT, must exceed 2
};

struct SimulationOutput {
  ReturnsMatrix returns;       // n x m
  VolatilityPath volatility;   // aligned with returns; presample = state after burn-in
  Eigen::MatrixXd eta_tilde;   // n x m, R^{1/2} eta_t
  std::uint64_t seed = 0;
  long burn_in = 0;
  std::string generator;
};

/// Simulates eps_t = D_t eta_tilde_t, eta_tilde_t = L eta_t, from a ZeroOmega
/// start, discarding the first burn_in steps. Deterministic in the seed.
/// Throws ExplosivePathError for non-stationary specs.
SimulationOutput simulate(const ModelSpec& spec, const SimulationOptions& options);

}  // namespace apgarch
