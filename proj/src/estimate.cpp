#include "apgarch/estimate.hpp"

#include "apgarch/error.hpp"
#include "apgarch/parallel.hpp"
#include "apgarch/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apgarch {

optim::Box default_bounds(const ModelOrders& orders, EstimationMode::Kind kind) {
  const ParamLayout layout(orders, kind);
  optim::Box box{Eigen::VectorXd(layout.size()), Eigen::VectorXd(layout.size())};
  for (int i = 0; i < layout.size(); ++i) {
    switch (layout.block_of(i)) {
      case ParamLayout::Block::Omega:
        box.lower[i] = 1e-6;
        box.upper[i] = 1e3;
        break;
      case ParamLayout::Block::APlus:
      case ParamLayout::Block::AMinus:
      case ParamLayout::Block::B:
        box.lower[i] = 0.0;
        box.upper[i] = 10.0;
        break;
      case ParamLayout::Block::Delta:
        box.lower[i] = 0.05;
        box.upper[i] = 4.0;
        break;
      case ParamLayout::Block::Rho:
        box.lower[i] = -0.999;
        box.upper[i] = 0.999;
        break;
    }
  }
  return box;
}

Eigen::VectorXd heuristic_start(const ReturnsMatrix& returns, const ModelOrders& orders,
                                const EstimationMode& mode, const optim::Box& box) {
  const int m = orders.m;
  ModelSpec s = ModelSpec::zeros(orders);
  s.delta = mode.estimates_delta() ? Eigen::VectorXd::Constant(m, 1.5) : mode.fixed_delta;
  const double n = static_cast<double>(returns.rows());
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < returns.rows(); ++t) acc += abs_power(returns(t, i), s.delta[i]);
    s.omega[i] = 0.5 * acc / n * (orders.p >= 1 ? 0.2 : 1.0);
  }
  for (int k = 0; k < orders.q; ++k) {
    s.a_plus[k].diagonal().setConstant(0.05);
    s.a_minus[k].diagonal().setConstant(0.05);
  }
  if (orders.p >= 1) s.b[0].diagonal().setConstant(0.8);

  const Eigen::RowVectorXd mean = returns.colwise().mean();
  const Eigen::MatrixXd centered = returns.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / n;
  for (int c = 0; c < m; ++c) {
    for (int r = c + 1; r < m; ++r) {
      const double denom = std::sqrt(cov(r, r) * cov(c, c));
      const double rho = denom > 0.0 ? std::clamp(cov(r, c) / denom, -0.95, 0.95) : 0.0;
      s.r(r, c) = rho;
      s.r(c, r) = rho;
    }
  }
  if (!is_positive_definite(s.r)) s.r = Eigen::MatrixXd::Identity(m, m);
  return box.project(pack(s, mode).values);
}

namespace {

struct StartOutcome {
  optim::Result result;
  int iterations = 0;
  long evaluations = 0;
};

}  // namespace

FitResult fit_qmle(const ReturnsMatrix& returns, const ModelOrders& orders, const FitOptions& options) {
  const EstimationMode& mode = options.mode;
  if (!mode.estimates_delta() && mode.fixed_delta.size() != orders.m) {
    throw Error(ErrorCode::LengthMismatch, "fixed delta must have length m");
  }
  if (returns.cols() != orders.m) throw Error(ErrorCode::LengthMismatch, "returns do not have m columns");
  const int dim = param_count(orders, mode.kind);
  const long n = returns.rows();
  if (n <= dim) {
    throw Error(ErrorCode::NotEnoughData, "need more observations (" + std::to_string(n) + ") than parameters (" +
                                              std::to_string(dim) + ")");
  }
  if (options.starts < 1) throw Error(ErrorCode::InvalidSpec, "starts must be at least 1");
  const optim::Box box = options.bounds.value_or(default_bounds(orders, mode.kind));
  if (box.lower.size() != dim || box.upper.size() != dim || !(box.lower.array() < box.upper.array()).all()) {
    throw Error(ErrorCode::InvalidSpec, "bounds must give lo < hi for every coordinate");
  }

  const QuasiLikelihood criterion(returns, options.init);
  const ParamVector templ{Eigen::VectorXd::Zero(dim), mode, orders};

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(options.start ? box.project(*options.start) : heuristic_start(returns, orders, mode, box));
  GaussianGenerator jitter(options.seed);
  for (int k = 1; k < options.starts; ++k) {
    Eigen::VectorXd x = starts.front();
    for (int i = 0; i < dim; ++i) x[i] *= 0.5 + jitter.uniform();
    starts.push_back(box.project(x));
  }

  auto polish = [&](const Eigen::VectorXd& x0) {
    StartOutcome out;
    ParamVector probe = templ;
    const optim::Objective f = [&](const Eigen::VectorXd& x) {
      probe.values = x;
      return criterion.mean(probe);
    };
    if (!std::isfinite(f(x0))) {
      out.result.x = x0;
      out.result.value = std::numeric_limits<double>::infinity();
      return out;
    }
    optim::NelderMeadOptions nm;
    nm.max_iterations = std::min(options.max_iterations, 200 * dim);
    nm.f_tolerance = options.simplex_tolerance;
    nm.x_tolerance = 1e-3;
    const optim::Result coarse = optim::nelder_mead(f, x0, box, nm);

    optim::BfgsOptions qn;
    qn.max_iterations = options.max_iterations;
    qn.f_tolerance = options.tolerance;
    qn.gradient_tolerance = options.gradient_tolerance;
    optim::Result polished = optim::projected_bfgs(f, coarse.x, box, qn);
    if (!(polished.value <= coarse.value)) {
      polished.x = coarse.x;
      polished.value = coarse.value;
      polished.converged = coarse.converged;
    }
    out.iterations = coarse.iterations + polished.iterations;
    out.evaluations = coarse.evaluations + polished.evaluations;
    out.result = std::move(polished);
    return out;
  };

  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(static_cast<long>(starts.size()), [&](long k) { outcomes[k] = polish(starts[k]); });

  ParamVector probe = templ;
  const optim::Objective f = [&](const Eigen::VectorXd& x) {
    probe.values = x;
    return criterion.mean(probe);
  };
  struct Assessment {
    double gradient_norm = 0.0;
    std::vector<int> on_bound;
    bool converged = false;
  };
  auto assess = [&](const StartOutcome& o) {
    Assessment a;
    const Eigen::VectorXd g = numerical_gradient(f, o.result.x, 1e-5);
    a.gradient_norm = optim::projected_gradient_norm(o.result.x, g, box);
    for (int i = 0; i < dim; ++i) {
      if (o.result.x[i] <= box.lower[i] || o.result.x[i] >= box.upper[i]) a.on_bound.push_back(i);
    }
    const double tol = std::max(options.gradient_tolerance, options.convergence_tolerance);
    a.converged = a.gradient_norm < tol * std::max(1.0, std::abs(o.result.value)) ||
                  (o.result.converged && a.on_bound.empty());
    return a;
  };
  auto best_index = [&] {
    int best = -1;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const double value = outcomes[k].result.value;
      if (std::isfinite(value) && (best < 0 || value < outcomes[best].result.value)) best = static_cast<int>(k);
    }
    return best;
  };

  int best = best_index();
  if (best < 0) throw Error(ErrorCode::AllStartsInvalid, "no start yields a finite quasi-likelihood");
  Assessment verdict = assess(outcomes[best]);
  // An unconverged winner triggers extra jittered starts around the first one.
  for (int extra = 0; !verdict.converged && extra < options.retry_starts; ++extra) {
    Eigen::VectorXd x = starts.front();
    for (int i = 0; i < dim; ++i) x[i] *= 0.5 + jitter.uniform();
    starts.push_back(box.project(x));
    outcomes.push_back(polish(starts.back()));
    const int next = best_index();
    if (next != best) {
      best = next;
      verdict = assess(outcomes[best]);
    }
  }

  FitResult fit;
  fit.n = n;
  for (const StartOutcome& o : outcomes) {
    fit.start_objectives.push_back(std::isfinite(o.result.value) ? o.result.value
                                                                  : std::numeric_limits<double>::infinity());
    fit.evaluations += o.evaluations;
  }
  const StartOutcome& winner = outcomes[best];
  fit.v_hat = templ;
  fit.v_hat.values = winner.result.x;
  fit.objective = criterion.mean(fit.v_hat);
  fit.iterations = winner.iterations;
  fit.start_index = best;
  fit.gradient_norm = verdict.gradient_norm;
  fit.boundary_active = verdict.on_bound;
  fit.converged = verdict.converged;
  return fit;
}

}  // namespace apgarch
