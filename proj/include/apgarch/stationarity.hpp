#pragma once

#include "apgarch/params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>

namespace apgarch {

/// Upsilon+ = diag(max(0, eta_i)^delta_i), Upsilon- = diag(max(0, -eta_i)^delta_i).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> upsilon(const Eigen::VectorXd& eta_tilde,
                                                    const Eigen::VectorXd& delta);

/// Random companion matrix C_t of dimension (p + 2q) m acting on the stacked
/// state (plus_t..plus_{t-q+1}, minus_t..minus_{t-q+1}, hpow_t..hpow_{t-p+1}).
/// p = 0 is padded to p = 1 with B_1 = 0; q = 0 throws UnsupportedOrder.
Eigen::MatrixXd companion(const ModelSpec& spec, const Eigen::VectorXd& eta_tilde);

/// Padded copy of a spec: p = 0 becomes p = 1 with B_1 = 0.
ModelSpec pad_for_companion(const ModelSpec& spec);

struct LyapunovEstimate {
  double gamma_hat = 0.0;
  double std_error = 0.0;
  long n_steps = 0;
  long n_replications = 0;
  long restarts = 0;

  /// gamma_hat + multiplier * std_error < 0.
  bool stationary(double multiplier = 3.0) const { return gamma_hat + multiplier * std_error < 0.0; }
};

struct LyapunovOptions {
  long n_steps = 10000;
  long n_replications = 100;
  std::uint64_t seed = 1;
};

/// Top Lyapunov exponent of {C_t} by renormalized vector iteration, averaged
/// over independent replications. gamma_hat is -infinity when the products
/// collapse to zero on every restart.
LyapunovEstimate estimate_lyapunov(const ModelSpec& spec, const LyapunovOptions& options = {});

/// Accumulated log-norm of C_n ... C_1 v0 with per-step renormalization,
/// given the eta_tilde draws (one column per step). Exposed for testing.
double accumulated_log_norm(const ModelSpec& padded_spec, const Eigen::MatrixXd& eta_tilde,
                            const Eigen::VectorXd& v0);

/// pm x pm companion matrix of B_1..B_p.
Eigen::MatrixXd b_companion(const ModelSpec& spec);

/// Spectral radius of b_companion(spec); 0 when p = 0.
double spectral_radius_b(const ModelSpec& spec);

}  // namespace apgarch
