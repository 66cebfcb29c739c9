#pragma once
// Randomized invariant checks shared by the unit suites and the acceptance
// binary. Each returns ok plus a description of the first failure.

#include "apgarch/estimate.hpp"
#include "apgarch/inference.hpp"
#include "apgarch/likelihood.hpp"
#include "apgarch/montecarlo.hpp"
#include "apgarch/simulate.hpp"
#include "apgarch/stationarity.hpp"
#include "apgarch/volatility.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace testing {

struct PropertyResult {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

inline Eigen::MatrixXd gaussian_returns(long n, int m, apgarch::GaussianGenerator& g, double scale = 1.0) {
  Eigen::MatrixXd r(n, m);
  for (long t = 0; t < n; ++t) {
    for (int i = 0; i < m; ++i) r(t, i) = scale * g.normal();
  }
  return r;
}

inline PropertyResult roundtrip_property(std::uint64_t seed = 11) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int m = 1; m <= 3; ++m) {
    for (int p = 0; p <= 2; ++p) {
      for (int q = 0; q <= 2; ++q) {
        for (auto kind : {EstimationMode::Kind::DeltaKnown, EstimationMode::Kind::DeltaEstimated}) {
          const ModelSpec s = random_spec({m, p, q}, g);
          const EstimationMode mode =
              kind == EstimationMode::Kind::DeltaKnown ? EstimationMode::known(s.delta) : EstimationMode::estimated();
          const ParamVector v = pack(s, mode);
          std::ostringstream where;
          where << "m=" << m << " p=" << p << " q=" << q;
          if (v.values.size() != param_count({m, p, q}, kind)) res.fail("length law " + where.str());
          if (!(unpack(v) == s)) res.fail("unpack(pack(s)) != s at " + where.str());
          if (pack(unpack(v), mode).values != v.values) res.fail("pack(unpack(v)) != v at " + where.str());
        }
      }
    }
  }
  return res;
}

inline PropertyResult power_split_property(std::uint64_t seed = 3, int reps = 2000) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::VectorXd eps(3), delta(3);
    for (int i = 0; i < 3; ++i) {
      eps[i] = rep % 10 == 0 && i == 1 ? 0.0 : 3.0 * g.normal();
      delta[i] = 0.1 + 3.5 * g.uniform();
    }
    const PowerSplit s = power_split(eps, delta);
    for (int i = 0; i < 3; ++i) {
      const double direct = std::pow(std::abs(eps[i]), delta[i]);
      if (s.plus[i] * s.minus[i] != 0.0) res.fail("plus * minus != 0");
      if (std::abs(s.plus[i] + s.minus[i] - direct) > 1e-13 * std::max(1.0, direct)) res.fail("plus + minus != |eps|^d");
    }
  }
  return res;
}

inline PropertyResult positivity_property(std::uint64_t seed = 17, int reps = 200) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int rep = 0; rep < reps; ++rep) {
    const ModelOrders o{1 + rep % 3, rep % 3, rep % 3};
    const ModelSpec s = random_spec(o, g);
    const VolatilityPath path = recursion(s, gaussian_returns(100, o.m, g, 2.0));
    for (int i = 0; i < o.m; ++i) {
      if (path.hpow.col(i).minCoeff() < s.omega[i]) res.fail("hpow below omega");
      if (!(path.h.col(i).minCoeff() > 0.0)) res.fail("non-positive variance");
    }
  }
  return res;
}

inline PropertyResult scaling_property(std::uint64_t seed = 23, int reps = 50) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int rep = 0; rep < reps; ++rep) {
    const ModelOrders o{1 + rep % 3, rep % 2, 1 + rep % 2};
    const ModelSpec s = random_spec(o, g);
    Eigen::VectorXd lambda(o.m), factor(o.m);
    for (int i = 0; i < o.m; ++i) {
      lambda[i] = 0.2 + 4.0 * g.uniform();
      factor[i] = std::pow(lambda[i], s.delta[i]);
    }
    const Eigen::MatrixXd returns = gaussian_returns(80, o.m, g);
    // A(i, j) scales by f_i / f_j; the same rule leaves diagonal B untouched.
    const Eigen::MatrixXd ratio = factor * factor.cwiseInverse().transpose();
    ModelSpec scaled = s;
    scaled.omega = factor.cwiseProduct(s.omega);
    for (auto& a : scaled.a_plus) a = a.cwiseProduct(ratio);
    for (auto& a : scaled.a_minus) a = a.cwiseProduct(ratio);
    for (auto& b : scaled.b) b = b.cwiseProduct(ratio);
    const VolatilityPath a = recursion(s, returns);
    const VolatilityPath b = recursion(scaled, returns * lambda.asDiagonal());
    const Eigen::MatrixXd expected = a.hpow * factor.asDiagonal();
    if (((b.hpow - expected).array().abs() / expected.array()).maxCoeff() > 1e-12) res.fail("scaled hpow mismatch");
  }
  return res;
}

// Objective gap between the two presample policies on simulated data, held
// to the fixed 1e-3 threshold at n.
inline PropertyResult forgetting_property(long n = 2000) {
  using namespace apgarch;
  PropertyResult res;
  const ModelSpec specs[] = {bivariate_spec(), garch11_spec(0.05, 0.05, 0.1, 0.85), garch11_spec(0.1, 0.02, 0.1, 0.9, 1.2)};
  for (const ModelSpec& s : specs) {
    const int which = static_cast<int>(&s - specs);
    SimulationOptions so;
    so.n = n;
    so.seed = 8;
    const SimulationOutput sim = simulate(s, so);
    const ParamVector v = pack(s, EstimationMode::known(s.delta));
    const double a = QuasiLikelihood(sim.returns, InitPolicy::zero_omega()).mean(v);
    const double b = QuasiLikelihood(sim.returns, InitPolicy::sample_mean()).mean(v);
    if (!(std::abs(a - b) < 1e-3)) {
      std::ostringstream os;
      os << "objective gap " << std::abs(a - b) << " at n = " << n << " for design " << which;
      res.fail(os.str());
    }
  }
  return res;
}

// Shape of the forgetting: per-observation differences between the two
// presample policies vanish geometrically, so n times the objective gap stays
// bounded as n grows. With p = 0 only the first q terms can differ.
inline PropertyResult forgetting_rate_property() {
  using namespace apgarch;
  PropertyResult res;
  const ModelSpec specs[] = {bivariate_spec(), garch11_spec(0.05, 0.05, 0.1, 0.85), garch11_spec(0.1, 0.02, 0.1, 0.9, 1.2)};
  for (const ModelSpec& s : specs) {
    const int which = static_cast<int>(&s - specs);
    const ParamVector v = pack(s, EstimationMode::known(s.delta));
    double scaled_first = 0.0;
    for (long n : {500L, 2000L, 8000L}) {
      SimulationOptions so;
      so.n = n;
      so.seed = 8;
      const SimulationOutput sim = simulate(s, so);
      const Eigen::VectorXd a = QuasiLikelihood(sim.returns, InitPolicy::zero_omega()).evaluate(v).per_obs;
      const Eigen::VectorXd b = QuasiLikelihood(sim.returns, InitPolicy::sample_mean()).evaluate(v).per_obs;
      const Eigen::VectorXd d = (a - b).cwiseAbs();
      std::ostringstream where;
      where << " for design " << which << " at n = " << n;
      if (s.orders.p == 0 && d.tail(n - s.orders.q).maxCoeff() != 0.0) res.fail("late difference with p = 0" + where.str());
      if (!(d.tail(n / 2).maxCoeff() < 1e-8)) res.fail("per-observation difference not forgotten" + where.str());
      const double scaled = std::abs(a.mean() - b.mean()) * static_cast<double>(n);
      if (n == 500) scaled_first = scaled;
      // The presample itself moves with n under SampleMean, so n * gap is
      // bounded rather than constant.
      if (!(scaled < 5.0 * std::max(scaled_first, 1.0))) res.fail("gap not O(1/n)" + where.str());
    }
  }
  return res;
}

inline PropertyResult arch_infinity_property(std::uint64_t seed = 31, int reps = 20) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int rep = 0; rep < reps; ++rep) {
    const ModelOrders o{1 + rep % 3, 0, 1 + rep % 3};
    const ModelSpec s = random_spec(o, g);
    SimulationOptions so;
    so.n = 60;
    so.seed = 100 + rep;
    const SimulationOutput sim = simulate(s, so);
    const ArchInfinity w = arch_infinity_weights(s, o.q);
    const VolatilityPath path = recursion(s, sim.returns);
    for (int t = o.q; t < so.n; ++t) {
      Eigen::VectorXd h = w.constant;
      for (int k = 1; k <= o.q; ++k) {
        const PowerSplit split = power_split(sim.returns.row(t - k).transpose(), s.delta);
        h += w.psi_plus[k] * split.plus + w.psi_minus[k] * split.minus;
      }
      if ((h.transpose() - path.hpow.row(t)).cwiseAbs().maxCoeff() > 1e-12 * h.maxCoeff()) {
        res.fail("expansion differs from recursion");
      }
    }
  }
  return res;
}

inline PropertyResult wald_invariance_property(std::uint64_t seed = 41, int reps = 100) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  for (int rep = 0; rep < reps; ++rep) {
    const int dim = 4 + rep % 10;
    const int s = 1 + rep % 3;
    Eigen::MatrixXd f(dim, dim + 3);
    for (int i = 0; i < f.size(); ++i) f.data()[i] = g.normal();
    SandwichCovariance cov;
    cov.sigma_hat = f * f.transpose() / dim;
    cov.n = 1000;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = g.normal();
    Eigen::MatrixXd c(s, dim), mix(s, s);
    for (int i = 0; i < c.size(); ++i) c.data()[i] = g.normal();
    for (int i = 0; i < mix.size(); ++i) mix.data()[i] = g.normal();
    mix += 2.0 * Eigen::MatrixXd::Identity(s, s);
    Eigen::VectorXd target = c * v;
    for (int i = 0; i < s; ++i) target[i] += 0.1 * g.normal();
    const double w1 = wald_test(v, cov, c, target).statistic;
    const double w2 = wald_test(v, cov, mix * c, mix * target).statistic;
    if (std::abs(w1 - w2) > 1e-8 * std::max(1.0, w1)) res.fail("statistic changed under an invertible transform");
  }
  return res;
}

// gamma significantly negative implies a stable B companion.
inline PropertyResult spectral_radius_property(int specs = 200, std::uint64_t seed = 51) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  int stationary = 0;
  int unstable_b = 0;
  for (int k = 0; k < specs; ++k) {
    const ModelOrders o{1 + k % 2, 1 + (k / 2) % 2, 1 + (k / 4) % 2};
    ModelSpec s = random_spec(o, g, false);
    // Spread B over [0, 1.2] in total row mass so both verdicts occur.
    const double target = 1.2 * g.uniform();
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(o.m, o.m);
    for (const auto& b : s.b) total += b;
    const double mass = total.rowwise().sum().maxCoeff();
    for (auto& b : s.b) b *= target / std::max(mass, 1e-12);
    for (auto& a : s.a_plus) a *= 0.1;
    for (auto& a : s.a_minus) a *= 0.1;
    LyapunovOptions lo;
    lo.n_steps = 1000;
    lo.n_replications = 10;
    lo.seed = seed + k;
    const LyapunovEstimate gamma = estimate_lyapunov(s, lo);
    const double radius = spectral_radius_b(s);
    if (radius >= 1.0) ++unstable_b;
    if (gamma.stationary(3.0)) {
      ++stationary;
      if (!(radius < 1.0)) {
        std::ostringstream os;
        os << "spec " << k << ": gamma " << gamma.gamma_hat << " but rho(B) = " << radius;
        res.fail(os.str());
      }
    }
  }
  if (stationary == 0 || unstable_b == 0) res.fail("generator did not cover both verdicts");
  return res;
}

// l_t against -2 log N(eps_t; 0, H_t) - m log(2 pi), with H_t inverted
// explicitly. Specs, orders, powers and data vary across pairs.
inline PropertyResult likelihood_oracle_property(int pairs = 1000, std::uint64_t seed = 61, double tol = 1e-10) {
  using namespace apgarch;
  PropertyResult res;
  GaussianGenerator g(seed);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const ModelOrders o{1 + k % 3, k % 3, (k / 3) % 3};
    const ModelSpec s = random_spec(o, g);
    const long n = 5 + k % 40;
    const Eigen::MatrixXd returns = gaussian_returns(n, o.m, g, 0.5 + 2.0 * g.uniform());
    const ParamVector v = pack(s, k % 2 == 0 ? EstimationMode::known(s.delta) : EstimationMode::estimated());
    const ObjectiveValue obj = neg_quasi_loglik(v, returns);
    if (!obj.valid) {
      res.fail("valid spec produced an invalid objective");
      continue;
    }
    const VolatilityPath path = recursion(s, returns);
    for (long t = 0; t < n; ++t) {
      const Eigen::MatrixXd h = path.conditional_covariance(t, s.r);
      const Eigen::VectorXd e = returns.row(t).transpose();
      const Eigen::MatrixXd inv = h.inverse();
      const double log_density = -0.5 * o.m * log_2pi - 0.5 * std::log(h.determinant()) - 0.5 * e.dot(inv * e);
      const double oracle = -2.0 * log_density - o.m * log_2pi;
      const double diff = std::abs(obj.per_obs[t] - oracle) / std::max(1.0, std::abs(oracle));
      worst = std::max(worst, diff);
    }
  }
  if (!(worst <= tol)) {
    std::ostringstream os;
    os << "largest relative deviation " << worst;
    res.fail(os.str());
  }
  return res;
}

inline PropertyResult seed_determinism_property() {
  using namespace apgarch;
  PropertyResult res;
  const ModelSpec s = bivariate_spec();
  SimulationOptions so;
  so.n = 400;
  so.seed = 99;
  const SimulationOutput a = simulate(s, so);
  const SimulationOutput b = simulate(s, so);
  if (a.returns != b.returns || a.volatility.hpow != b.volatility.hpow) res.fail("simulate not deterministic");

  LyapunovOptions lo;
  lo.n_steps = 500;
  lo.n_replications = 5;
  const LyapunovEstimate la = estimate_lyapunov(s, lo);
  const LyapunovEstimate lb = estimate_lyapunov(s, lo);
  if (la.gamma_hat != lb.gamma_hat || la.std_error != lb.std_error) res.fail("lyapunov not deterministic");

  FitOptions fo;
  fo.mode = EstimationMode::known(s.delta);
  fo.starts = 2;
  const FitResult fa = fit_qmle(a.returns, s.orders, fo);
  const FitResult fb = fit_qmle(a.returns, s.orders, fo);
  if (fa.v_hat.values != fb.v_hat.values || fa.objective != fb.objective) res.fail("fit not deterministic");

  McDesign d;
  d.truth = s;
  d.n = 300;
  d.replications = 3;
  d.seed = 5;
  d.skip_stationarity_check = true;
  const McSummary ma = run_design(d);
  const McSummary mb = run_design(d);
  for (std::size_t i = 0; i < ma.per_parameter.size(); ++i) {
    if (ma.per_parameter[i].bias != mb.per_parameter[i].bias || ma.per_parameter[i].rmse != mb.per_parameter[i].rmse) {
      res.fail("monte carlo summary not deterministic");
    }
  }
  return res;
}

}  // namespace testing
