#include "apgarch/simulate.hpp"

#include "apgarch/error.hpp"
#include "apgarch/rng.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace apgarch {

Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& r) {
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (r.rows() != r.cols() || !r.allFinite() || llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPositiveDefiniteCorrelation, "correlation matrix has no Cholesky factor");
  }
  return llt.matrixL();
}

namespace {

// Unit-variance Student-t draw: Z / sqrt(chi2_nu / nu) scaled by sqrt((nu - 2) / nu).
double student_draw(GaussianGenerator& gen, double dof) {
  double chi2 = 0.0;
  std::gamma_distribution<double> gamma(0.5 * dof, 2.0);
  chi2 = gamma(gen.engine());
  const double t = gen.normal() / std::sqrt(chi2 / dof);
  return t * std::sqrt((dof - 2.0) / dof);
}

}  // namespace

SimulationOutput simulate(const ModelSpec& spec, const SimulationOptions& options) {
  if (const auto violations = validate(spec); !violations.empty()) {
    throw Error(ErrorCode::InvalidSpec, violations.front());
  }
  if (options.n < 1) throw Error(ErrorCode::NotEnoughData, "n must be at least 1");
  if (options.burn_in < 0) throw Error(ErrorCode::InvalidSpec, "burn_in must be nonnegative");
  if (options.innovation == Innovation::StudentT && !(options.student_dof > 2.0)) {
    throw Error(ErrorCode::InvalidSpec, "Student-t innovations need more than 2 degrees of freedom");
  }

  const ModelOrders& o = spec.orders;
  const int m = o.m;
  const long total = options.burn_in + options.n;
  const Eigen::MatrixXd factor = correlation_factor(spec.r);

  detail::RecursionBuffers buf;
  buf.lead = detail::lead_columns(o);
  buf.plus.resize(m, buf.lead + total);
  buf.minus.resize(m, buf.lead + total);
  buf.hpow.resize(m, buf.lead + total);
  detail::fill_presample(spec, detail::resolve_presample(spec, InitPolicy::zero_omega(), buf, 0), buf);

  SimulationOutput out;
  out.returns.resize(options.n, m);
  out.eta_tilde.resize(options.n, m);
  out.volatility.hpow.resize(options.n, m);
  out.volatility.h.resize(options.n, m);
  out.seed = options.seed;
  out.burn_in = options.burn_in;
  out.generator = std::string(kGeneratorName);

  GaussianGenerator gen(options.seed);
  Eigen::VectorXd eta(m);
  for (long t = 0; t < total; ++t) {
    const long col = buf.lead + t;
    if (t == options.burn_in) {
      out.volatility.presample = InitPolicy::explicit_values(detail::presample_at(o, buf, col - 1));
    }
    if (!detail::hpow_step(spec, buf, col)) {
      throw ExplosivePathError(t, "simulated powered volatility left (0, 1e300] at step " + std::to_string(t));
    }
    for (int i = 0; i < m; ++i) {
      eta[i] = options.innovation == Innovation::Gaussian ? gen.normal() : student_draw(gen, options.student_dof);
    }
    const Eigen::VectorXd eta_tilde = factor * eta;
    for (int i = 0; i < m; ++i) {
      const double hp = buf.hpow(i, col);
      const double h = variance_from_powered(hp, spec.delta[i]);
      const double e = std::sqrt(h) * eta_tilde[i];
      buf.plus(i, col) = e > 0.0 ? abs_power(e, spec.delta[i]) : 0.0;
      buf.minus(i, col) = e < 0.0 ? abs_power(e, spec.delta[i]) : 0.0;
      if (t >= options.burn_in) {
        const long row = t - options.burn_in;
        out.returns(row, i) = e;
        out.eta_tilde(row, i) = eta_tilde[i];
        out.volatility.hpow(row, i) = hp;
        out.volatility.h(row, i) = h;
      }
    }
  }
  return out;
}

}  // namespace apgarch
