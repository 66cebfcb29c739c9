#include "apgarch/optimize.hpp"

#include "apgarch/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace apgarch::optim {

namespace {

bool at_lower(double x, double lo) { return x <= lo + 1e-12 * std::max(1.0, std::abs(lo)); }
bool at_upper(double x, double hi) { return x >= hi - 1e-12 * std::max(1.0, std::abs(hi)); }

double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (at_lower(x[i], box.lower[i]) && g[i] > 0.0) continue;
    if (at_upper(x[i], box.upper[i]) && g[i] < 0.0) continue;
    norm = std::max(norm, std::abs(g[i]));
  }
  return norm;
}

Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& box, const NelderMeadOptions& options) {
  const Eigen::Index dim = x0.size();
  const double nd = static_cast<double>(dim);
  // Gao & Han adaptive coefficients.
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / nd;
  const double contract = 0.75 - 1.0 / (2.0 * nd);
  const double shrink = 1.0 - 1.0 / nd;

  Result out;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    return finite_or_inf(f(x));
  };

  std::vector<Eigen::VectorXd> pts(dim + 1, box.project(x0));
  std::vector<double> vals(dim + 1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd& p = pts[i + 1];
    const double step = options.initial_step * std::max(std::abs(p[i]), 0.05);
    if (p[i] + step <= box.upper[i]) {
      p[i] += step;
    } else {
      p[i] -= step;
    }
    p = box.project(p);
  }
  for (Eigen::Index i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

  std::vector<Eigen::Index> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    p2.reserve(dim + 1);
    v2.reserve(dim + 1);
    for (auto k : order) {
      p2.push_back(std::move(pts[k]));
      v2.push_back(vals[k]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (Eigen::Index i = 1; i <= dim; ++i) d = std::max(d, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  sort_simplex();
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const double fspread = vals[dim] - vals[0];
    if (std::isfinite(vals[dim]) && fspread <= options.f_tolerance && diameter() <= options.x_tolerance) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) centroid += pts[i];
    centroid /= nd;

    const Eigen::VectorXd xr = box.project(centroid + reflect * (centroid - pts[dim]));
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = box.project(centroid + expand * (xr - centroid));
      const double fe = eval(xe);
      if (fe < fr) {
        pts[dim] = xe;
        vals[dim] = fe;
      } else {
        pts[dim] = xr;
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = xr;
      vals[dim] = fr;
    } else {
      bool accepted = false;
      if (fr < vals[dim]) {
        const Eigen::VectorXd xc = box.project(centroid + contract * (xr - centroid));
        const double fc = eval(xc);
        if (fc <= fr) {
          pts[dim] = xc;
          vals[dim] = fc;
          accepted = true;
        }
      } else {
        const Eigen::VectorXd xc = box.project(centroid - contract * (centroid - pts[dim]));
        const double fc = eval(xc);
        if (fc < vals[dim]) {
          pts[dim] = xc;
          vals[dim] = fc;
          accepted = true;
        }
      }
      if (!accepted) {
        for (Eigen::Index i = 1; i <= dim; ++i) {
          pts[i] = box.project(pts[0] + shrink * (pts[i] - pts[0]));
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  out.x = pts[0];
  out.value = vals[0];
  out.spread = diameter();
  return out;
}

Result projected_bfgs(const Objective& f, const Eigen::VectorXd& x0, const Box& box, const BfgsOptions& options) {
  const Eigen::Index dim = x0.size();
  Result out;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    return finite_or_inf(f(x));
  };
  auto gradient = [&](const Eigen::VectorXd& x) {
    out.evaluations += 2 * dim + 1;
    return numerical_gradient(f, x, options.step_scale);
  };

  Eigen::VectorXd x = box.project(x0);
  double fx = eval(x);
  out.x = x;
  out.value = fx;
  if (!std::isfinite(fx)) return out;

  Eigen::VectorXd g = gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  bool scaled = false;
  bool steepest = false;
  int stalls = 0;

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const double pg = projected_gradient_norm(x, g, box);
    out.spread = pg;
    if (pg < options.gradient_tolerance * std::max(1.0, std::abs(fx))) {
      out.converged = true;
      break;
    }

    std::vector<bool> free(dim, true);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if ((at_lower(x[i], box.lower[i]) && g[i] > 0.0) || (at_upper(x[i], box.upper[i]) && g[i] < 0.0)) {
        free[i] = false;
      }
    }
    Eigen::VectorXd gf = g;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (!free[i]) gf[i] = 0.0;
    }
    Eigen::VectorXd d = -(hinv * gf);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (!free[i]) d[i] = 0.0;
    }
    if (!(gf.dot(d) < 0.0)) {
      hinv.setIdentity();
      scaled = false;
      d = -gf;
    }

    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = fx;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = box.project(x + alpha * d);
      f_new = eval(x_new);
      if (f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved || (x_new - x).lpNorm<Eigen::Infinity>() == 0.0) {
      if (!steepest) {
        // Retry along steepest descent before giving up.
        hinv.setIdentity();
        scaled = false;
        steepest = true;
        continue;
      }
      break;
    }
    steepest = false;

    const Eigen::VectorXd g_new = gradient(x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double improvement = fx - f_new;
    x = x_new;
    fx = f_new;
    g = g_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        hinv = Eigen::MatrixXd::Identity(dim, dim) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(dim, dim) - rho * s * y.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }

    if (improvement < options.f_tolerance) {
      if (++stalls >= 2) {
        ++out.iterations;
        break;
      }
    } else {
      stalls = 0;
    }
  }
  out.x = x;
  out.value = fx;
  out.spread = projected_gradient_norm(x, g, box);
  out.converged = out.converged || out.spread < options.gradient_tolerance * std::max(1.0, std::abs(fx));
  return out;
}

}  // namespace apgarch::optim
