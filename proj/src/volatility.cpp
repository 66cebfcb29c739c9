#include "apgarch/volatility.hpp"

#include "apgarch/error.hpp"
#include "apgarch/stationarity.hpp"

#include <algorithm>

namespace apgarch {

PowerSplit power_split(const Eigen::VectorXd& eps, const Eigen::VectorXd& delta) {
  const auto m = eps.size();
  PowerSplit out{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (eps[i] > 0.0) {
      out.plus[i] = abs_power(eps[i], delta[i]);
    } else if (eps[i] < 0.0) {
      out.minus[i] = abs_power(eps[i], delta[i]);
    }
  }
  return out;
}

Eigen::MatrixXd VolatilityPath::d(long t) const {
  return h.row(t).cwiseSqrt().transpose().asDiagonal();
}

Eigen::MatrixXd VolatilityPath::conditional_covariance(long t, const Eigen::MatrixXd& r) const {
  const Eigen::MatrixXd dt = d(t);
  return dt * r * dt;
}

namespace detail {

int lead_columns(const ModelOrders& orders) { return std::max(orders.p, orders.q); }

void fill_presample(const ModelSpec& spec, const Presample& presample, RecursionBuffers& buffers) {
  const ModelOrders& o = spec.orders;
  const int lead = buffers.lead;
  for (int k = 0; k < lead; ++k) {
    const int col = lead - 1 - k;
    if (k < o.q) {
      buffers.plus.col(col) = presample.plus.col(k);
      buffers.minus.col(col) = presample.minus.col(k);
    } else {
      buffers.plus.col(col).setZero();
      buffers.minus.col(col).setZero();
    }
    if (k < o.p) {
      buffers.hpow.col(col) = presample.hpow.col(k);
    } else {
      buffers.hpow.col(col) = spec.omega;
    }
  }
}

Presample resolve_presample(const ModelSpec& spec, const InitPolicy& init, const RecursionBuffers& buffers,
                            long n) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  switch (init.kind) {
    case InitPolicy::Kind::Explicit: {
      const Presample& p = init.presample;
      if (p.plus.rows() != m || p.plus.cols() != o.q || p.minus.rows() != m || p.minus.cols() != o.q ||
          p.hpow.rows() != m || p.hpow.cols() != o.p) {
        throw Error(ErrorCode::LengthMismatch, "explicit presample has the wrong shape");
      }
      return p;
    }
    case InitPolicy::Kind::SampleMean: {
      Presample p;
      const Eigen::VectorXd mean_plus = buffers.plus.middleCols(buffers.lead, n).rowwise().mean();
      const Eigen::VectorXd mean_minus = buffers.minus.middleCols(buffers.lead, n).rowwise().mean();
      p.plus = mean_plus.replicate(1, o.q);
      p.minus = mean_minus.replicate(1, o.q);
      p.hpow = spec.omega.replicate(1, o.p);
      return p;
    }
    case InitPolicy::Kind::ZeroOmega:
      break;
  }
  Presample p;
  p.plus = Eigen::MatrixXd::Zero(m, o.q);
  p.minus = Eigen::MatrixXd::Zero(m, o.q);
  p.hpow = spec.omega.replicate(1, o.p);
  return p;
}

bool hpow_step(const ModelSpec& spec, RecursionBuffers& buffers, long col) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  bool ok = true;
  for (int i = 0; i < m; ++i) {
    double acc = spec.omega[i];
    for (int k = 1; k <= o.q; ++k) {
      const auto& ap = spec.a_plus[k - 1];
      const auto& am = spec.a_minus[k - 1];
      for (int j = 0; j < m; ++j) {
        acc += ap(i, j) * buffers.plus(j, col - k);
        acc += am(i, j) * buffers.minus(j, col - k);
      }
    }
    for (int k = 1; k <= o.p; ++k) {
      const auto& bk = spec.b[k - 1];
      for (int j = 0; j < m; ++j) acc += bk(i, j) * buffers.hpow(j, col - k);
    }
    buffers.hpow(i, col) = acc;
    if (!(acc > 0.0 && acc <= kExplosiveThreshold)) ok = false;
  }
  return ok;
}

Presample presample_at(const ModelOrders& orders, const RecursionBuffers& buffers, long col) {
  Presample p;
  p.plus.resize(orders.m, orders.q);
  p.minus.resize(orders.m, orders.q);
  p.hpow.resize(orders.m, orders.p);
  for (int k = 0; k < orders.q; ++k) {
    p.plus.col(k) = buffers.plus.col(col - k);
    p.minus.col(k) = buffers.minus.col(col - k);
  }
  for (int k = 0; k < orders.p; ++k) p.hpow.col(k) = buffers.hpow.col(col - k);
  return p;
}

}  // namespace detail

VolatilityPath recursion(const ModelSpec& spec, const ReturnsMatrix& returns, const InitPolicy& init) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  const long n = returns.rows();
  if (n < 1) throw Error(ErrorCode::NotEnoughData, "recursion needs at least one observation");
  if (returns.cols() != m) {
    throw Error(ErrorCode::LengthMismatch, "returns have " + std::to_string(returns.cols()) +
                                               " columns, model dimension is " + std::to_string(m));
  }

  detail::RecursionBuffers buf;
  buf.lead = detail::lead_columns(o);
  buf.plus.resize(m, buf.lead + n);
  buf.minus.resize(m, buf.lead + n);
  buf.hpow.resize(m, buf.lead + n);
  for (long t = 0; t < n; ++t) {
    for (int i = 0; i < m; ++i) {
      const double e = returns(t, i);
      buf.plus(i, buf.lead + t) = e > 0.0 ? abs_power(e, spec.delta[i]) : 0.0;
      buf.minus(i, buf.lead + t) = e < 0.0 ? abs_power(e, spec.delta[i]) : 0.0;
    }
  }
  Presample presample = detail::resolve_presample(spec, init, buf, n);
  detail::fill_presample(spec, presample, buf);

  VolatilityPath path;
  path.hpow.resize(n, m);
  path.h.resize(n, m);
  for (long t = 0; t < n; ++t) {
    if (!detail::hpow_step(spec, buf, buf.lead + t)) {
      throw ExplosivePathError(t, "powered volatility left (0, 1e300] at t = " + std::to_string(t));
    }
    for (int i = 0; i < m; ++i) {
      const double hp = buf.hpow(i, buf.lead + t);
      path.hpow(t, i) = hp;
      path.h(t, i) = variance_from_powered(hp, spec.delta[i]);
    }
  }
  path.presample = InitPolicy::explicit_values(std::move(presample));
  path.presample.kind = init.kind;
  return path;
}

ArchInfinity arch_infinity_weights(const ModelSpec& spec, int truncation) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  if (o.p > 0 && spectral_radius_b(spec) >= 1.0) {
    throw Error(ErrorCode::NonInvertibleBPolynomial, "spectral radius of the B companion is >= 1");
  }
  ArchInfinity out;
  out.psi_plus.assign(truncation + 1, Eigen::MatrixXd::Zero(m, m));
  out.psi_minus.assign(truncation + 1, Eigen::MatrixXd::Zero(m, m));
  for (int k = 1; k <= truncation; ++k) {
    Eigen::MatrixXd plus = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd minus = Eigen::MatrixXd::Zero(m, m);
    if (k <= o.q) {
      plus = spec.a_plus[k - 1];
      minus = spec.a_minus[k - 1];
    }
    for (int j = 1; j <= std::min(o.p, k - 1); ++j) {
      plus += spec.b[j - 1] * out.psi_plus[k - j];
      minus += spec.b[j - 1] * out.psi_minus[k - j];
    }
    out.psi_plus[k] = std::move(plus);
    out.psi_minus[k] = std::move(minus);
  }
  Eigen::MatrixXd b1 = Eigen::MatrixXd::Identity(m, m);
  for (const auto& bj : spec.b) b1 -= bj;
  out.constant = b1.partialPivLu().solve(spec.omega);
  return out;
}

IdentifiabilityReport check_identifiability(const ModelSpec& spec) {
  const ModelOrders& o = spec.orders;
  const int m = o.m;
  IdentifiabilityReport report;

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < o.q; ++k) sum += spec.a_plus[k] + spec.a_minus[k];
  report.nonzero_sum = (sum.array() != 0.0).any();

  // Column i of the highest lag whose column i is nonzero.
  auto top_column = [m](const std::vector<Eigen::MatrixXd>& lags, int i) -> Eigen::VectorXd {
    for (int k = static_cast<int>(lags.size()) - 1; k >= 0; --k) {
      if ((lags[k].col(i).array() != 0.0).any()) return lags[k].col(i);
    }
    return Eigen::VectorXd::Zero(m);
  };
  report.m_matrix.resize(m, 3 * m);
  for (int i = 0; i < m; ++i) {
    report.m_matrix.col(i) = top_column(spec.a_plus, i);
    report.m_matrix.col(m + i) = top_column(spec.a_minus, i);
    report.m_matrix.col(2 * m + i) = top_column(spec.b, i);
  }

  if (o.p == 0) {
    report.automatic = true;
    report.full_rank = true;
    report.rank_m = m;
    return report;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(report.m_matrix);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv.maxCoeff() : 0.0;
  int rank = 0;
  if (smax > 0.0) {
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] > 1e-10 * smax) ++rank;
    }
  }
  report.rank_m = rank;
  report.full_rank = rank == m;
  return report;
}

}  // namespace apgarch
