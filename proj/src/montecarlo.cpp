#include "apgarch/montecarlo.hpp"

#include "apgarch/error.hpp"
#include "apgarch/inference.hpp"
#include "apgarch/parallel.hpp"
#include "apgarch/rng.hpp"
#include "apgarch/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace apgarch {

double quantile_type7(std::vector<double> values, double prob) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::uint64_t replication_seed(std::uint64_t seed, long replication) {
  return derive_seed(seed, static_cast<std::uint64_t>(replication));
}

namespace {

EstimationMode fit_mode(const McDesign& design) {
  return design.mode == EstimationMode::Kind::DeltaEstimated ? EstimationMode::estimated()
                                                               : EstimationMode::known(design.truth.delta);
}

}  // namespace

McSummary summarize(const McDesign& design, std::vector<ReplicationRecord> records) {
  const EstimationMode mode = fit_mode(design);
  const ParamVector truth = pack(design.truth, mode);
  const ParamLayout layout(design.truth.orders, mode.kind);
  const auto names = layout.names();

  McSummary out;
  std::vector<const ReplicationRecord*> used;
  for (const auto& r : records) {
    if (r.converged && !r.failed) used.push_back(&r);
  }
  out.used = static_cast<long>(used.size());
  out.failures = static_cast<long>(records.size()) - out.used;

  for (int i = 0; i < layout.size(); ++i) {
    ParameterSummary p;
    p.name = names[i];
    p.true_value = truth.values[i];
    std::vector<double> est;
    est.reserve(used.size());
    for (const auto* r : used) est.push_back(r->estimate[i]);
    if (!est.empty()) {
      double sum = 0.0;
      double sq = 0.0;
      for (double e : est) {
        sum += e - p.true_value;
        sq += (e - p.true_value) * (e - p.true_value);
      }
      const double k = static_cast<double>(est.size());
      p.bias = sum / k;
      p.rmse = std::sqrt(sq / k);
      p.min = *std::min_element(est.begin(), est.end());
      p.max = *std::max_element(est.begin(), est.end());
      p.q1 = quantile_type7(est, 0.25);
      p.median = quantile_type7(est, 0.5);
      p.q3 = quantile_type7(est, 0.75);
    } else {
      p.bias = p.rmse = p.min = p.max = p.q1 = p.median = p.q3 = std::nan("");
    }
    out.per_parameter.push_back(std::move(p));
  }
  if (design.wald) out.rejection_pct = rejection_frequency(records, design.wald->level);
  out.replications = std::move(records);
  return out;
}

McSummary run_design(const McDesign& design) {
  if (design.replications < 1) throw Error(ErrorCode::InvalidSpec, "replications must be at least 1");
  if (const auto violations = validate(design.truth); !violations.empty()) {
    throw Error(ErrorCode::InvalidSpec, violations.front());
  }
  if (!design.skip_stationarity_check && design.truth.orders.q >= 1) {
    LyapunovOptions lo;
    lo.n_steps = design.lyapunov_steps;
    lo.n_replications = design.lyapunov_replications;
    lo.seed = design.seed;
    const LyapunovEstimate gamma = estimate_lyapunov(design.truth, lo);
    if (gamma.gamma_hat - 3.0 * gamma.std_error >= 0.0) {
      std::ostringstream os;
      os << "top Lyapunov exponent estimate " << gamma.gamma_hat << " (se " << gamma.std_error
         << ") is not negative; the design has no stationary solution";
      throw Error(ErrorCode::StationarityVeto, os.str());
    }
  }

  const EstimationMode mode = fit_mode(design);
  std::vector<ReplicationRecord> records(design.replications);
  parallel_for(design.replications, [&](long r) {
    ReplicationRecord& rec = records[r];
    rec.index = r;
    rec.seed = replication_seed(design.seed, r);
    try {
      SimulationOptions so;
      so.n = design.n;
      so.burn_in = design.burn_in;
      so.seed = rec.seed;
      const SimulationOutput sim = simulate(design.truth, so);

      FitOptions fo;
      fo.mode = mode;
      fo.starts = design.starts;
      fo.seed = rec.seed;
      fo.init = design.init;
      const FitResult fit = fit_qmle(sim.returns, design.truth.orders, fo);
      rec.estimate = fit.v_hat.values;
      rec.objective = fit.objective;
      rec.converged = fit.converged;
      if (design.wald) {
        const SandwichCovariance cov = sandwich(fit, sim.returns, design.init);
        rec.std_errors.assign(cov.std_errors.data(), cov.std_errors.data() + cov.std_errors.size());
        rec.wald_p_value = wald_test(fit, cov, design.wald->c_matrix, design.wald->c_vector).p_value;
      }
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });
  return summarize(design, std::move(records));
}

double rejection_frequency(const std::vector<ReplicationRecord>& records, double level) {
  long used = 0;
  long rejected = 0;
  for (const auto& r : records) {
    if (!r.converged || r.failed || !r.wald_p_value) continue;
    ++used;
    if (level >= 1.0 || *r.wald_p_value < level) ++rejected;
  }
  return used > 0 ? 100.0 * static_cast<double>(rejected) / static_cast<double>(used) : std::nan("");
}

double rejection_frequency(const McDesign& design) {
  if (!design.wald) throw Error(ErrorCode::InvalidSpec, "design has no Wald constraint");
  const McSummary s = run_design(design);
  return *s.rejection_pct;
}

void write_boxplot_csv(std::ostream& out, const McSummary& summary) {
  out << "parameter,min,q1,median,q3,max\n";
  out << std::setprecision(10);
  for (const auto& p : summary.per_parameter) {
    out << p.name << ',' << p.min << ',' << p.q1 << ',' << p.median << ',' << p.q3 << ',' << p.max << '\n';
  }
}

void write_summary_csv(std::ostream& out, const McSummary& summary) {
  out << "parameter,true,bias,rmse,min,q1,median,q3,max\n";
  out << std::setprecision(10);
  for (const auto& p : summary.per_parameter) {
    out << p.name << ',' << p.true_value << ',' << p.bias << ',' << p.rmse << ',' << p.min << ',' << p.q1 << ','
        << p.median << ',' << p.q3 << ',' << p.max << '\n';
  }
}

void write_summary_table(std::ostream& out, const McSummary& summary) {
  out << std::left << std::setw(18) << "parameter" << std::right << std::setw(11) << "true" << std::setw(11)
      << "bias" << std::setw(11) << "rmse" << std::setw(11) << "q1" << std::setw(11) << "median" << std::setw(11)
      << "q3" << '\n';
  out << std::fixed << std::setprecision(5);
  for (const auto& p : summary.per_parameter) {
    out << std::left << std::setw(18) << p.name << std::right << std::setw(11) << p.true_value << std::setw(11)
        << p.bias << std::setw(11) << p.rmse << std::setw(11) << p.q1 << std::setw(11) << p.median << std::setw(11)
        << p.q3 << '\n';
  }
  out << "replications used: " << summary.used << ", excluded (not converged or failed): " << summary.failures
      << '\n';
  if (summary.rejection_pct) out << "Wald rejection frequency: " << std::setprecision(1) << *summary.rejection_pct << "%\n";
  out << "quartiles: linear interpolation between order statistics (type 7)\n";
  out.unsetf(std::ios::floatfield);
}

void write_replications_csv(std::ostream& out, const McDesign& design, const McSummary& summary) {
  const EstimationMode mode = fit_mode(design);
  const auto names = ParamLayout(design.truth.orders, mode.kind).names();
  out << "replication,seed,converged,failed,objective";
  for (const auto& n : names) out << ',' << n;
  if (design.wald) out << ",wald_p_value";
  out << '\n' << std::setprecision(12);
  for (const auto& r : summary.replications) {
    out << r.index << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ','
        << r.objective;
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << ',';
      if (r.estimate.size() == static_cast<Eigen::Index>(names.size())) out << r.estimate[i];
    }
    if (design.wald) {
      out << ',';
      if (r.wald_p_value) out << *r.wald_p_value;
    }
    out << '\n';
  }
}

}  // namespace apgarch
