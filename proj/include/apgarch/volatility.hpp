#pragma once

#include "apgarch/params.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace apgarch {

/// n x m matrix; row t holds the returns of the m series at time t.
using ReturnsMatrix = Eigen::MatrixXd;

/// Positive and negative parts of a return vector raised to the power delta:
/// plus_i = max(0, eps_i)^delta_i, minus_i = max(0, -eps_i)^delta_i.
struct PowerSplit {
  Eigen::VectorXd plus;
  Eigen::VectorXd minus;
};

/// |x|^delta, with 0 mapped to 0. delta == 2 is evaluated as x * x, any
/// other power as exp(delta * log|x|).
inline double abs_power(double x, double delta) {
  if (x == 0.0) return 0.0;
  if (delta == 2.0) return x * x;
  return std::exp(delta * std::log(std::abs(x)));
}

/// Inverse power map h = hpow^(2 / delta) used to recover variances.
inline double variance_from_powered(double hpow, double delta) {
  if (delta == 2.0) return hpow;
  return std::exp((2.0 / delta) * std::log(hpow));
}

PowerSplit power_split(const Eigen::VectorXd& eps, const Eigen::VectorXd& delta);

/// Presample values for the recursion. Column k of each matrix is lag k + 1,
/// i.e. column 0 holds time 0, column 1 time -1, and so on.
struct Presample {
  Eigen::MatrixXd plus;   // m x q
  Eigen::MatrixXd minus;  // m x q
  Eigen::MatrixXd hpow;   // m x p
};

/// How the recursion is started before the first observation.
///  - ZeroOmega: powered returns 0, powered volatilities omega.
///  - SampleMean: powered returns set to their sample means over the data,
///    powered volatilities omega.
///  - Explicit: caller-supplied presample (used to replay simulated paths).
struct InitPolicy {
  enum class Kind { ZeroOmega, SampleMean, Explicit };
  Kind kind = Kind::ZeroOmega;
  Presample presample;

  static InitPolicy zero_omega() { return {Kind::ZeroOmega, {}}; }
  static InitPolicy sample_mean() { return {Kind::SampleMean, {}}; }
  static InitPolicy explicit_values(Presample p) { return {Kind::Explicit, std::move(p)}; }
};

struct VolatilityPath {
  Eigen::MatrixXd hpow;  // n x m, h_t^{delta/2}
  Eigen::MatrixXd h;     // n x m, h_t
  InitPolicy presample;

  /// D_t = diag(sqrt(h_t)).
  Eigen::MatrixXd d(long t) const;
  /// H_t = D_t R D_t.
  Eigen::MatrixXd conditional_covariance(long t, const Eigen::MatrixXd& r) const;
};

/// Powered volatility recursion
///   hpow_t = omega + sum_i A+_i plus_{t-i} + A-_i minus_{t-i} + sum_j B_j hpow_{t-j}
/// for t = 1..n. Throws ExplosivePathError when an entry leaves (0, 1e300].
VolatilityPath recursion(const ModelSpec& spec, const ReturnsMatrix& returns,
                         const InitPolicy& init = InitPolicy::zero_omega());

/// Truncated expansion hpow_t = c + sum_k Psi+_k plus_{t-k} + Psi-_k minus_{t-k}
/// of B(L)^{-1} A(L).
struct ArchInfinity {
  std::vector<Eigen::MatrixXd> psi_plus;   // k = 0..K, psi_plus[0] = 0
  std::vector<Eigen::MatrixXd> psi_minus;  // k = 0..K
  Eigen::VectorXd constant;                // B(1)^{-1} omega
};

/// Throws NonInvertibleBPolynomial when the companion matrix of {B_j} has
/// spectral radius >= 1.
ArchInfinity arch_infinity_weights(const ModelSpec& spec, int truncation);

struct IdentifiabilityReport {
  bool left_coprime_skipped = true;  // never verified numerically
  bool automatic = false;            // p == 0
  bool nonzero_sum = false;          // A+(1) + A-(1) != 0
  int rank_m = 0;
  bool full_rank = false;
  Eigen::MatrixXd m_matrix;          // m x 3m highest-degree column coefficients
};

/// Rank condition on the matrix of highest-degree column coefficients of
/// A+(L), A-(L) and the lag part of B(L). A column whose lag coefficients are
/// all zero contributes a zero column. Singular values above 1e-10 * sigma_max
/// count towards the rank.
IdentifiabilityReport check_identifiability(const ModelSpec& spec);

namespace detail {

/// Column buffers for the recursion: the first `lead` columns are presample
/// (stored oldest first), then one column per time step.
struct RecursionBuffers {
  int lead = 0;
  Eigen::MatrixXd plus;   // m x (lead + n)
  Eigen::MatrixXd minus;  // m x (lead + n)
  Eigen::MatrixXd hpow;   // m x (lead + n)
};

int lead_columns(const ModelOrders& orders);

/// Writes presample columns into the buffers.
void fill_presample(const ModelSpec& spec, const Presample& presample, RecursionBuffers& buffers);

/// Presample implied by a policy for data already powered into `buffers`.
Presample resolve_presample(const ModelSpec& spec, const InitPolicy& init, const RecursionBuffers& buffers,
                            long n);

/// Computes hpow at buffer column `col` from earlier columns. Returns false
/// when an entry is non-finite, non-positive or exceeds 1e300.
bool hpow_step(const ModelSpec& spec, RecursionBuffers& buffers, long col);

/// Extracts the presample that would continue a path from buffer column `col`
/// (the last filled column).
Presample presample_at(const ModelOrders& orders, const RecursionBuffers& buffers, long col);

constexpr double kExplosiveThreshold = 1e300;

}  // namespace detail
}  // namespace apgarch
