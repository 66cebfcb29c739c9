#include "apgarch/likelihood.hpp"

#include "apgarch/error.hpp"

#include <cmath>

namespace apgarch {

bool is_admissible(const ModelSpec& spec) {
  const int m = spec.orders.m;
  for (int i = 0; i < m; ++i) {
    if (!(spec.omega[i] > 0.0) || !std::isfinite(spec.omega[i])) return false;
    if (!(spec.delta[i] > 0.0) || !std::isfinite(spec.delta[i])) return false;
  }
  auto nonnegative = [](const std::vector<Eigen::MatrixXd>& blocks) {
    for (const auto& a : blocks) {
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double x = a.data()[k];
        if (!(x >= 0.0) || !std::isfinite(x)) return false;
      }
    }
    return true;
  };
  if (!nonnegative(spec.a_plus) || !nonnegative(spec.a_minus) || !nonnegative(spec.b)) return false;
  for (int c = 0; c < m; ++c) {
    for (int r = c + 1; r < m; ++r) {
      if (!(std::abs(spec.r(r, c)) < 1.0)) return false;
    }
  }
  return is_positive_definite(spec.r);
}

QuasiLikelihood::QuasiLikelihood(const ReturnsMatrix& returns, InitPolicy init)
    : eps_(returns.transpose()), log_abs_(eps_.rows(), eps_.cols()), init_(std::move(init)) {
  if (returns.rows() < 1) throw Error(ErrorCode::NotEnoughData, "criterion needs at least one observation");
  for (Eigen::Index t = 0; t < eps_.cols(); ++t) {
    for (Eigen::Index i = 0; i < eps_.rows(); ++i) {
      const double e = eps_(i, t);
      log_abs_(i, t) = e == 0.0 ? 0.0 : std::log(std::abs(e));
    }
  }
}

double QuasiLikelihood::run(const ModelSpec& spec, Eigen::VectorXd* per_obs) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (spec.orders.m != m() || !is_admissible(spec)) return kInf;
  const ModelOrders& o = spec.orders;
  const int dim = o.m;
  const long n_obs = n();

  detail::RecursionBuffers buf;
  buf.lead = detail::lead_columns(o);
  buf.plus.resize(dim, buf.lead + n_obs);
  buf.minus.resize(dim, buf.lead + n_obs);
  buf.hpow.resize(dim, buf.lead + n_obs);
  for (int i = 0; i < dim; ++i) {
    const double d = spec.delta[i];
    for (long t = 0; t < n_obs; ++t) {
      const double e = eps_(i, t);
      // Same arithmetic as abs_power(), with the log taken once per data set.
      double powered = 0.0;
      if (e != 0.0) powered = d == 2.0 ? e * e : std::exp(d * log_abs_(i, t));
      buf.plus(i, buf.lead + t) = e > 0.0 ? powered : 0.0;
      buf.minus(i, buf.lead + t) = e < 0.0 ? powered : 0.0;
    }
  }
  detail::fill_presample(spec, detail::resolve_presample(spec, init_, buf, n_obs), buf);

  const Eigen::LLT<Eigen::MatrixXd> llt(spec.r);
  const Eigen::MatrixXd chol = llt.matrixL();
  double log_det_r = 0.0;
  for (int i = 0; i < dim; ++i) log_det_r += 2.0 * std::log(chol(i, i));

  Eigen::VectorXd z(dim);
  Eigen::VectorXd w(dim);
  double sum = 0.0;
  for (long t = 0; t < n_obs; ++t) {
    const long col = buf.lead + t;
    if (!detail::hpow_step(spec, buf, col)) return kInf;
    double log_h_sum = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double d = spec.delta[i];
      const double log_hpow = std::log(buf.hpow(i, col));
      const double log_h = d == 2.0 ? log_hpow : (2.0 / d) * log_hpow;
      log_h_sum += log_h;
      z[i] = eps_(i, t) * std::exp(-0.5 * log_h);
    }
    // z' R^{-1} z = |L^{-1} z|^2 by forward substitution.
    double quad = 0.0;
    for (int i = 0; i < dim; ++i) {
      double acc = z[i];
      for (int j = 0; j < i; ++j) acc -= chol(i, j) * w[j];
      w[i] = acc / chol(i, i);
      quad += w[i] * w[i];
    }
    const double lt = log_h_sum + log_det_r + quad;
    if (!std::isfinite(lt)) return kInf;
    if (per_obs) (*per_obs)[t] = lt;
    sum += lt;
  }
  return sum / static_cast<double>(n_obs);
}

ObjectiveValue QuasiLikelihood::evaluate(const ParamVector& v) const {
  ObjectiveValue out;
  out.per_obs.resize(n());
  const ModelSpec spec = unpack_unchecked(v);
  out.total = run(spec, &out.per_obs);
  out.valid = std::isfinite(out.total);
  if (!out.valid) out.per_obs.setConstant(std::numeric_limits<double>::infinity());
  return out;
}

double QuasiLikelihood::mean(const ParamVector& v) const { return run(unpack_unchecked(v), nullptr); }

ObjectiveValue neg_quasi_loglik(const ParamVector& v, const ReturnsMatrix& returns, const InitPolicy& init) {
  return QuasiLikelihood(returns, init).evaluate(v);
}

Eigen::VectorXd numerical_gradient(const ScalarFunction& f, const Eigen::VectorXd& x, double step_scale) {
  const double f0 = f(x);
  if (!std::isfinite(f0)) throw Error(ErrorCode::GradientAtInvalidPoint, "objective is not finite at the base point");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_scale * std::max(std::abs(x[i]), 1e-4);
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    const bool ok_p = std::isfinite(fp);
    const bool ok_m = std::isfinite(fm);
    if (ok_p && ok_m) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (ok_p) {
      g[i] = (fp - f0) / h;
    } else if (ok_m) {
      g[i] = (f0 - fm) / h;
    } else {
      throw Error(ErrorCode::GradientAtInvalidPoint,
                  "objective is not finite on either side of coordinate " + std::to_string(i));
    }
  }
  return g;
}

Eigen::VectorXd loglik_gradient(const ParamVector& v, const ReturnsMatrix& returns, const InitPolicy& init,
                                double step_scale) {
  const QuasiLikelihood criterion(returns, init);
  ParamVector probe = v;
  return numerical_gradient(
      [&](const Eigen::VectorXd& x) {
        probe.values = x;
        return criterion.mean(probe);
      },
      v.values, step_scale);
}

}  // namespace apgarch
