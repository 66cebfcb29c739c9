#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace apgarch {

/// Orders of a CCC-APGARCH(p, q) model in dimension m.
struct ModelOrders {
  int m = 1;  // series dimension
  int p = 0;  // GARCH order (lagged powered volatilities)
  int q = 0;  // ARCH order (lagged powered returns)

  friend bool operator==(const ModelOrders&, const ModelOrders&) = default;
};

/// Full parameterization: omega, A+_i, A-_i (i = 1..q), B_j (j = 1..p),
/// correlation matrix R and power vector delta.
struct ModelSpec {
  ModelOrders orders;
  Eigen::VectorXd omega;
  std::vector<Eigen::MatrixXd> a_plus;
  std::vector<Eigen::MatrixXd> a_minus;
  std::vector<Eigen::MatrixXd> b;
  Eigen::MatrixXd r;
  Eigen::VectorXd delta;

  /// All coefficient blocks zero, R = I, omega = 1, delta = 2.
  static ModelSpec zeros(const ModelOrders& orders);
};

bool operator==(const ModelSpec& lhs, const ModelSpec& rhs);

/// Whether the power vector is held fixed (and carried here) or estimated.
struct EstimationMode {
  enum class Kind { DeltaKnown, DeltaEstimated };

  Kind kind = Kind::DeltaKnown;
  Eigen::VectorXd fixed_delta;  // used only when kind == DeltaKnown

  static EstimationMode known(Eigen::VectorXd delta) { return {Kind::DeltaKnown, std::move(delta)}; }
  static EstimationMode estimated() { return {Kind::DeltaEstimated, {}}; }

  bool estimates_delta() const { return kind == Kind::DeltaEstimated; }
};

/// Flat parameter vector. Layout: omega, vec(A+_1..q), vec(A-_1..q),
/// vec(B_1..p), [delta when estimated], rho (strict lower triangle of R,
/// column-major). vec() is column-major throughout.
struct ParamVector {
  Eigen::VectorXd values;
  EstimationMode mode;
  ModelOrders orders;
};

/// Offsets of each parameter block inside a ParamVector.
struct ParamLayout {
  ModelOrders orders;
  bool delta_estimated = false;

  explicit ParamLayout(const ModelOrders& o, EstimationMode::Kind kind);

  int omega() const { return 0; }
  int a_plus(int lag) const;   // lag in 1..q
  int a_minus(int lag) const;  // lag in 1..q
  int b(int lag) const;        // lag in 1..p
  int delta() const;           // -1 when delta is fixed
  int rho() const;
  int size() const;

  /// Human-readable coordinate names, e.g. "omega_1", "a_plus_1(2,1)", "rho_21".
  std::vector<std::string> names() const;

  /// Coordinates holding omega / delta / matrix coefficients / correlations.
  enum class Block { Omega, APlus, AMinus, B, Delta, Rho };
  Block block_of(int index) const;
};

int param_count(const ModelOrders& orders, EstimationMode::Kind kind);

/// Index of rho_{ij} (i > j, 0-based) within the rho block.
int rho_index(int m, int i, int j);

/// Flat encoding. When mode is DeltaKnown with an empty fixed_delta the
/// spec's delta is adopted as the fixed power.
ParamVector pack(const ModelSpec& spec, const EstimationMode& mode);

/// Inverse of pack. Throws LengthMismatch or NonPositiveDefiniteCorrelation.
ModelSpec unpack(const ParamVector& v);

/// Same as unpack without the positive-definiteness check on R.
ModelSpec unpack_unchecked(const ParamVector& v);

/// Lists every violated model constraint; empty means valid.
std::vector<std::string> validate(const ModelSpec& spec);

/// True when R admits a Cholesky factor.
bool is_positive_definite(const Eigen::MatrixXd& r);

}  // namespace apgarch
