#include "apgarch/inference.hpp"

#include "apgarch/error.hpp"
#include "apgarch/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace apgarch {

Eigen::MatrixXd per_observation_scores(const ParamVector& v, const QuasiLikelihood& criterion, double step_scale) {
  const ObjectiveValue base = criterion.evaluate(v);
  if (!base.valid) throw Error(ErrorCode::GradientAtInvalidPoint, "criterion is not finite at the estimate");
  const Eigen::Index dim = v.values.size();
  Eigen::MatrixXd scores(criterion.n(), dim);
  parallel_for(dim, [&](long i) {
    ParamVector probe = v;
    const double h = step_scale * std::max(std::abs(v.values[i]), 1e-4);
    probe.values[i] = v.values[i] + h;
    const ObjectiveValue up = criterion.evaluate(probe);
    probe.values[i] = v.values[i] - h;
    const ObjectiveValue down = criterion.evaluate(probe);
    if (up.valid && down.valid) {
      scores.col(i) = (up.per_obs - down.per_obs) / (2.0 * h);
    } else if (up.valid) {
      scores.col(i) = (up.per_obs - base.per_obs) / h;
    } else if (down.valid) {
      scores.col(i) = (base.per_obs - down.per_obs) / h;
    } else {
      throw Error(ErrorCode::GradientAtInvalidPoint,
                  "criterion is not finite on either side of coordinate " + std::to_string(i));
    }
  });
  return scores;
}

Eigen::MatrixXd score_outer(const ParamVector& v, const QuasiLikelihood& criterion, double step_scale) {
  const Eigen::MatrixXd g = per_observation_scores(v, criterion, step_scale);
  return g.transpose() * g / static_cast<double>(g.rows());
}

Eigen::MatrixXd score_outer(const FitResult& fit, const ReturnsMatrix& returns, const InitPolicy& init) {
  return score_outer(fit.v_hat, QuasiLikelihood(returns, init));
}

HessianEstimate numerical_hessian(const ScalarFunction& f, const Eigen::VectorXd& x, double step_scale) {
  const Eigen::Index dim = x.size();
  Eigen::VectorXd h(dim);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    h[i] = step_scale * std::max(std::abs(x[i]), 1e-2);
    Eigen::VectorXd probe = x;
    probe[i] = x[i] - h[i];
    if (!std::isfinite(f(probe))) {
      shift[i] = h[i];
      continue;
    }
    probe[i] = x[i] + h[i];
    if (!std::isfinite(f(probe))) shift[i] = -h[i];
  }

  Eigen::MatrixXd hess(dim, dim);
  const long pairs = static_cast<long>(dim * (dim + 1) / 2);
  parallel_for(pairs, [&](long k) {
    // Map k to (i, j) with j <= i.
    Eigen::Index i = 0;
    long rem = k;
    while (rem > i) {
      rem -= i + 1;
      ++i;
    }
    const Eigen::Index j = rem;
    Eigen::VectorXd c = x;
    c[i] += shift[i];
    if (j != i) c[j] += shift[j];
    if (i == j) {
      Eigen::VectorXd p = c;
      const double f0 = f(c);
      p[i] = c[i] + h[i];
      const double fp = f(p);
      p[i] = c[i] - h[i];
      const double fm = f(p);
      hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    } else {
      Eigen::VectorXd p = c;
      auto at = [&](double si, double sj) {
        p[i] = c[i] + si * h[i];
        p[j] = c[j] + sj * h[j];
        return f(p);
      };
      const double fpp = at(1, 1);
      const double fpm = at(1, -1);
      const double fmp = at(-1, 1);
      const double fmm = at(-1, -1);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  });

  HessianEstimate out;
  out.j = 0.5 * (hess + hess.transpose());
  if (out.j.allFinite()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.j);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    out.condition = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  } else {
    out.condition = std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

void require_conditioned(double condition) {
  if (!(condition <= 1e10)) {
    std::ostringstream os;
    os << "condition number of J_hat is " << condition << " (limit 1e10)";
    throw Error(ErrorCode::IllConditionedJ, os.str());
  }
}

}  // namespace

HessianEstimate hessian(const ParamVector& v, const QuasiLikelihood& criterion, double step_scale) {
  const ParamVector templ = v;
  HessianEstimate out = numerical_hessian(
      [&](const Eigen::VectorXd& x) {
        ParamVector probe = templ;
        probe.values = x;
        return criterion.mean(probe);
      },
      v.values, step_scale);
  require_conditioned(out.condition);
  return out;
}

HessianEstimate hessian(const FitResult& fit, const ReturnsMatrix& returns, const InitPolicy& init) {
  return hessian(fit.v_hat, QuasiLikelihood(returns, init));
}

SandwichCovariance sandwich_from(const Eigen::MatrixXd& i_hat, const Eigen::MatrixXd& j_hat, long n) {
  SandwichCovariance out;
  out.i_hat = i_hat;
  out.j_hat = j_hat;
  out.n = n;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j_hat);
  const auto& sv = svd.singularValues();
  out.j_condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  require_conditioned(out.j_condition);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(j_hat);
  const Eigen::MatrixXd left = lu.solve(i_hat);                    // J^{-1} I
  const Eigen::MatrixXd sigma = lu.solve(left.transpose()).transpose();  // (J^{-1} (J^{-1} I)')' = J^{-1} I J^{-1}
  out.sigma_hat = 0.5 * (sigma + sigma.transpose());
  out.std_errors = (out.sigma_hat.diagonal() / static_cast<double>(n)).cwiseSqrt();
  return out;
}

SandwichCovariance sandwich(const ParamVector& v, const QuasiLikelihood& criterion) {
  const HessianEstimate j = hessian(v, criterion);
  const Eigen::MatrixXd i = score_outer(v, criterion);
  return sandwich_from(i, j.j, criterion.n());
}

SandwichCovariance sandwich(const FitResult& fit, const ReturnsMatrix& returns, const InitPolicy& init) {
  return sandwich(fit.v_hat, QuasiLikelihood(returns, init));
}

WaldOutcome wald_test(const Eigen::VectorXd& v_hat, const SandwichCovariance& cov, const Eigen::MatrixXd& c_matrix,
                      const Eigen::VectorXd& c_vector) {
  const Eigen::Index s = c_matrix.rows();
  if (s < 1 || c_matrix.cols() != v_hat.size() || c_vector.size() != s) {
    throw Error(ErrorCode::RankDeficientConstraints, "constraint matrix must be s x s0 with s >= 1 and c of length s");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c_matrix.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() != s) throw Error(ErrorCode::RankDeficientConstraints, "constraint matrix does not have full row rank");

  const Eigen::MatrixXd middle = c_matrix * cov.sigma_hat * c_matrix.transpose();
  const Eigen::MatrixXd sym = 0.5 * (middle + middle.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double emax = eig.eigenvalues().maxCoeff();
  const double emin = eig.eigenvalues().minCoeff();
  if (!(emin > 1e-12 * std::max(emax, 0.0)) || !std::isfinite(emax)) {
    throw Error(ErrorCode::SingularConstraintCovariance, "C Sigma C' is not positive definite");
  }
  const Eigen::VectorXd d = c_matrix * v_hat - c_vector;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(sym);
  WaldOutcome out;
  out.df = static_cast<int>(s);
  out.statistic = std::max(0.0, static_cast<double>(cov.n) * d.dot(ldlt.solve(d)));
  out.p_value = chi2_upper_tail(out.statistic, out.df);
  for (double level : {0.10, 0.05, 0.01}) out.reject_at[level] = out.p_value < level;
  return out;
}

WaldOutcome wald_test(const FitResult& fit, const SandwichCovariance& cov, const Eigen::MatrixXd& c_matrix,
                      const Eigen::VectorXd& c_vector) {
  return wald_test(fit.v_hat.values, cov, c_matrix, c_vector);
}

double regularized_gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x).
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::clamp(1.0 - sum * std::exp(log_prefactor), 0.0, 1.0);
  }
  // Continued fraction for Q(a, x), modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int k = 1; k < 10000; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::clamp(std::exp(log_prefactor) * frac, 0.0, 1.0);
}

double chi2_upper_tail(double x, int df) {
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace apgarch
