#include "apgarch/stationarity.hpp"

#include "apgarch/error.hpp"
#include "apgarch/rng.hpp"
#include "apgarch/simulate.hpp"
#include "apgarch/volatility.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace apgarch {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> upsilon(const Eigen::VectorXd& eta_tilde,
                                                    const Eigen::VectorXd& delta) {
  const PowerSplit split = power_split(eta_tilde, delta);
  return {split.plus.asDiagonal(), split.minus.asDiagonal()};
}

ModelSpec pad_for_companion(const ModelSpec& spec) {
  if (spec.orders.q == 0) {
    throw Error(ErrorCode::UnsupportedOrder, "companion form needs at least one ARCH lag (q >= 1)");
  }
  ModelSpec padded = spec;
  if (padded.orders.p == 0) {
    padded.orders.p = 1;
    padded.b.assign(1, Eigen::MatrixXd::Zero(spec.orders.m, spec.orders.m));
  }
  return padded;
}

namespace {

// [A+_1..A+_q | A-_1..A-_q | B_1..B_p], an m x (2q + p) m block row.
Eigen::MatrixXd coefficient_row(const ModelSpec& s) {
  const int m = s.orders.m;
  const int q = s.orders.q;
  const int p = s.orders.p;
  Eigen::MatrixXd row(m, (2 * q + p) * m);
  for (int k = 0; k < q; ++k) {
    row.block(0, k * m, m, m) = s.a_plus[k];
    row.block(0, (q + k) * m, m, m) = s.a_minus[k];
  }
  for (int k = 0; k < p; ++k) row.block(0, (2 * q + k) * m, m, m) = s.b[k];
  return row;
}

Eigen::MatrixXd companion_padded(const ModelSpec& s, const Eigen::MatrixXd& row, const Eigen::VectorXd& eta_tilde) {
  const int m = s.orders.m;
  const int q = s.orders.q;
  const int p = s.orders.p;
  const int dim = (2 * q + p) * m;
  const PowerSplit split = power_split(eta_tilde, s.delta);

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
  c.block(0, 0, m, dim) = split.plus.asDiagonal() * row;
  c.block(q * m, 0, m, dim) = split.minus.asDiagonal() * row;
  c.block(2 * q * m, 0, m, dim) = row;
  if (q > 1) {
    c.block(m, 0, (q - 1) * m, (q - 1) * m).setIdentity();
    c.block(q * m + m, q * m, (q - 1) * m, (q - 1) * m).setIdentity();
  }
  if (p > 1) c.block(2 * q * m + m, 2 * q * m, (p - 1) * m, (p - 1) * m).setIdentity();
  return c;
}

// C_t v without forming C_t.
Eigen::VectorXd apply_companion(const ModelSpec& s, const Eigen::MatrixXd& row, const Eigen::VectorXd& eta_tilde,
                                const Eigen::VectorXd& v) {
  const int m = s.orders.m;
  const int q = s.orders.q;
  const int p = s.orders.p;
  const PowerSplit split = power_split(eta_tilde, s.delta);
  const Eigen::VectorXd lead = row * v;
  Eigen::VectorXd out(v.size());
  out.segment(0, m) = split.plus.cwiseProduct(lead);
  out.segment(q * m, m) = split.minus.cwiseProduct(lead);
  out.segment(2 * q * m, m) = lead;
  if (q > 1) {
    out.segment(m, (q - 1) * m) = v.segment(0, (q - 1) * m);
    out.segment(q * m + m, (q - 1) * m) = v.segment(q * m, (q - 1) * m);
  }
  if (p > 1) out.segment(2 * q * m + m, (p - 1) * m) = v.segment(2 * q * m, (p - 1) * m);
  return out;
}

}  // namespace

Eigen::MatrixXd companion(const ModelSpec& spec, const Eigen::VectorXd& eta_tilde) {
  const ModelSpec padded = pad_for_companion(spec);
  return companion_padded(padded, coefficient_row(padded), eta_tilde);
}

double accumulated_log_norm(const ModelSpec& padded_spec, const Eigen::MatrixXd& eta_tilde,
                            const Eigen::VectorXd& v0) {
  const Eigen::MatrixXd row = coefficient_row(padded_spec);
  Eigen::VectorXd v = v0;
  double acc = 0.0;
  for (Eigen::Index t = 0; t < eta_tilde.cols(); ++t) {
    v = apply_companion(padded_spec, row, eta_tilde.col(t), v);
    const double norm = v.norm();
    if (norm == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(norm);
    v /= norm;
  }
  return acc;
}

LyapunovEstimate estimate_lyapunov(const ModelSpec& spec, const LyapunovOptions& options) {
  if (options.n_steps < 100) throw Error(ErrorCode::InvalidSpec, "n_steps must be at least 100");
  if (options.n_replications < 1) throw Error(ErrorCode::InvalidSpec, "n_replications must be at least 1");
  const ModelSpec padded = pad_for_companion(spec);
  const int m = padded.orders.m;
  const Eigen::MatrixXd factor = correlation_factor(padded.r);
  const Eigen::MatrixXd row = coefficient_row(padded);
  const int dim = static_cast<int>(row.cols());
  constexpr int kMaxRestarts = 10;

  LyapunovEstimate out;
  out.n_steps = options.n_steps;
  out.n_replications = options.n_replications;
  std::vector<double> per_rep;
  per_rep.reserve(options.n_replications);
  bool collapsed = false;

  for (long rep = 0; rep < options.n_replications && !collapsed; ++rep) {
    GaussianGenerator gen(derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    int restarts = 0;
    while (true) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = std::abs(gen.normal());
      v.normalize();
      double acc = 0.0;
      bool ok = true;
      for (long t = 0; t < options.n_steps; ++t) {
        const Eigen::VectorXd eta_tilde = factor * gen.normal_vector(m);
        v = apply_companion(padded, row, eta_tilde, v);
        const double norm = v.norm();
        if (norm == 0.0) {
          ok = false;
          break;
        }
        acc += std::log(norm);
        v /= norm;
      }
      if (ok) {
        per_rep.push_back(acc / static_cast<double>(options.n_steps));
        break;
      }
      ++out.restarts;
      if (++restarts > kMaxRestarts) {
        collapsed = true;
        break;
      }
    }
  }

  if (collapsed) {
    out.gamma_hat = -std::numeric_limits<double>::infinity();
    out.std_error = 0.0;
    return out;
  }
  const double n = static_cast<double>(per_rep.size());
  double mean = 0.0;
  for (double x : per_rep) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : per_rep) ss += (x - mean) * (x - mean);
  out.gamma_hat = mean;
  out.std_error = per_rep.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  return out;
}

Eigen::MatrixXd b_companion(const ModelSpec& spec) {
  const int m = spec.orders.m;
  const int p = spec.orders.p;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p * m, p * m);
  for (int k = 0; k < p; ++k) c.block(0, k * m, m, m) = spec.b[k];
  if (p > 1) c.block(m, 0, (p - 1) * m, (p - 1) * m).setIdentity();
  return c;
}

double spectral_radius_b(const ModelSpec& spec) {
  if (spec.orders.p == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(b_companion(spec), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace apgarch
