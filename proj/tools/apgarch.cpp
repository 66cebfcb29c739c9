// Command-line front end: simulate | fit | wald | lyapunov | mc | identifiability.
#include "apgarch/error.hpp"
#include "apgarch/estimate.hpp"
#include "apgarch/inference.hpp"
#include "apgarch/montecarlo.hpp"
#include "apgarch/parallel.hpp"
#include "apgarch/report.hpp"
#include "apgarch/series.hpp"
#include "apgarch/simulate.hpp"
#include "apgarch/stationarity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

using namespace apgarch;
using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  return out;
}

// Writes to the file when a path is given, to stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
  } else {
    auto out = open_out(path);
    write(out);
  }
}

ModelSpec load_spec(const std::string& path, EstimationMode::Kind* kind = nullptr) {
  const json doc = read_json_file(path);
  if (kind) *kind = mode_from_json(doc);
  return spec_from_json(doc);
}

void require_valid(const ModelSpec& spec) {
  if (const auto v = validate(spec); !v.empty()) throw Error(ErrorCode::InvalidSpec, v.front());
}

struct SimulateArgs {
  std::string config, out, eta_out;
  long n = 1000;
  long burn_in = 1000;
  std::uint64_t seed = 1;
  bool volatility = false;
  double student_dof = 0.0;
};

int run_simulate(const SimulateArgs& a) {
  const ModelSpec spec = load_spec(a.config);
  require_valid(spec);
  SimulationOptions so;
  so.n = a.n;
  so.burn_in = a.burn_in;
  so.seed = a.seed;
  if (a.student_dof > 0.0) {
    so.innovation = Innovation::StudentT;
    so.student_dof = a.student_dof;
  }
  const SimulationOutput sim = simulate(spec, so);
  const int m = spec.orders.m;
  emit(a.out, [&](std::ostream& os) {
    os << "t";
    for (int i = 1; i <= m; ++i) os << ",eps_" << i;
    if (a.volatility) {
      for (int i = 1; i <= m; ++i) os << ",h_" << i;
    }
    os << '\n' << std::setprecision(17);
    for (long t = 0; t < a.n; ++t) {
      os << t + 1;
      for (int i = 0; i < m; ++i) os << ',' << sim.returns(t, i);
      if (a.volatility) {
        for (int i = 0; i < m; ++i) os << ',' << sim.volatility.h(t, i);
      }
      os << '\n';
    }
  });
  if (!a.eta_out.empty()) {
    auto os = open_out(a.eta_out);
    os << "t";
    for (int i = 1; i <= m; ++i) os << ",eta_tilde_" << i;
    os << '\n' << std::setprecision(17);
    for (long t = 0; t < a.n; ++t) {
      os << t + 1;
      for (int i = 0; i < m; ++i) os << ',' << sim.eta_tilde(t, i);
      os << '\n';
    }
  }
  return 0;
}

struct FitArgs {
  std::string data, config, json_out, text_out;
  std::optional<std::string> date_column;
  std::vector<std::string> columns;
  bool prices = false;
  bool no_header = false;
  double scale = 100.0;
  std::optional<int> p, q;
  std::optional<std::string> delta_mode;
  std::vector<double> delta;
  int subperiods = 1;
  int starts = 1;
  std::string presample = "zero_omega";
  std::uint64_t seed = 1;
  bool no_inference = false;
};

int run_fit(const FitArgs& a) {
  SeriesFile file;
  file.path = a.data;
  file.has_header = !a.no_header;
  file.date_column = a.date_column;
  file.value_columns = a.columns;
  file.kind = a.prices ? SeriesFile::Kind::Prices : SeriesFile::Kind::Returns;
  file.scale = a.scale;
  const LoadedSeries series = load_series(file);
  const int m = static_cast<int>(series.returns.cols());

  // Config keys first, flags override.
  ModelOrders orders{m, 1, 1};
  EstimationMode::Kind kind = EstimationMode::Kind::DeltaKnown;
  Eigen::VectorXd delta = Eigen::VectorXd::Constant(m, 2.0);
  if (!a.config.empty()) {
    const json doc = read_json_file(a.config);
    if (doc.contains("m") && doc["m"].get<int>() != m) {
      throw Error(ErrorCode::InvalidSpec, "config m does not match the number of series columns");
    }
    orders.p = doc.value("p", orders.p);
    orders.q = doc.value("q", orders.q);
    kind = mode_from_json(doc);
    if (doc.contains("delta")) delta = Eigen::Map<const Eigen::VectorXd>(
        doc["delta"].get<std::vector<double>>().data(), static_cast<Eigen::Index>(doc["delta"].size()));
  }
  if (a.p) orders.p = *a.p;
  if (a.q) orders.q = *a.q;
  if (a.delta_mode) {
    if (*a.delta_mode == "estimate") {
      kind = EstimationMode::Kind::DeltaEstimated;
    } else if (*a.delta_mode == "known") {
      kind = EstimationMode::Kind::DeltaKnown;
    } else {
      throw Error(ErrorCode::ParseError, "--delta-mode must be known or estimate");
    }
  }
  if (!a.delta.empty()) delta = Eigen::Map<const Eigen::VectorXd>(a.delta.data(), static_cast<Eigen::Index>(a.delta.size()));
  if (delta.size() != m) throw Error(ErrorCode::InvalidSpec, "delta must have one entry per series");
  if (orders.q < 1) throw Error(ErrorCode::UnsupportedOrder, "q must be at least 1");

  FitOptions fo;
  fo.mode = kind == EstimationMode::Kind::DeltaEstimated ? EstimationMode::estimated() : EstimationMode::known(delta);
  fo.starts = a.starts;
  fo.seed = a.seed;
  fo.init = init_from_name(a.presample);
  ReportOptions ro;
  ro.inference = !a.no_inference;

  std::vector<Window> windows{{0, series.returns.rows()}};
  if (a.subperiods > 1) {
    for (const Window& w : split_windows(series.returns.rows(), a.subperiods)) windows.push_back(w);
  }
  std::vector<FitReport> reports;
  for (const Window& w : windows) {
    const ReturnsMatrix sample = series.returns.middleRows(w.begin, w.length);
    const FitResult fit = fit_qmle(sample, orders, fo);
    FitReport r = make_report(fit, sample, fo, ro);
    r.window_begin = w.begin;
    r.options["input"] = {{"path", a.data},
                          {"kind", a.prices ? "prices" : "returns"},
                          {"scale", a.scale},
                          {"dropped_rows", series.dropped_rows}};
    reports.push_back(std::move(r));
  }

  emit(a.text_out, [&](std::ostream& os) {
    if (series.dropped_rows > 0) os << "dropped " << series.dropped_rows << " rows with missing values\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (reports.size() > 1) {
        os << (k == 0 ? std::string("== full sample") : "== subperiod " + std::to_string(k)) << ", rows "
           << reports[k].window_begin + 1 << ".." << reports[k].window_begin + reports[k].n << '\n';
      }
      write_report_text(os, reports[k]);
      os << '\n';
    }
    if (reports.size() > 1) os << "subperiods are equal consecutive row windows, remainder in the last one\n";
  });
  if (!a.json_out.empty()) {
    json doc;
    if (reports.size() == 1) {
      doc = report_to_json(reports.front());
    } else {
      doc["windows"] = json::array();
      for (const auto& r : reports) doc["windows"].push_back(report_to_json(r));
      doc["note"] = "window 0 is the full sample; subperiods are equal consecutive row windows";
    }
    emit(a.json_out, [&](std::ostream& os) { os << std::setprecision(17) << doc.dump(2) << '\n'; });
  }
  for (const auto& r : reports) {
    if (!r.converged) std::cerr << "warning: optimizer did not converge (window starting at row " << r.window_begin + 1 << ")\n";
  }
  return 0;
}

struct WaldArgs {
  std::string report, constraints;
  int window = 0;
};

int run_wald(const WaldArgs& a) {
  json doc = read_json_file(a.report);
  if (doc.contains("windows")) {
    if (a.window < 0 || a.window >= static_cast<int>(doc["windows"].size())) {
      throw Error(ErrorCode::ParseError, "--window out of range");
    }
    doc = doc["windows"][static_cast<std::size_t>(a.window)];
  }
  const FitReport r = report_from_json(doc);
  if (!r.sigma_hat) {
    throw Error(ErrorCode::SingularConstraintCovariance,
                "the report carries no covariance: " + (r.inference_error.empty() ? "unavailable" : r.inference_error));
  }
  const auto [c_matrix, c_vector] = read_constraints(a.constraints);
  SandwichCovariance cov;
  cov.sigma_hat = *r.sigma_hat;
  cov.n = r.n;
  const WaldOutcome w = wald_test(r.estimates, cov, c_matrix, c_vector);
  std::cout << std::setprecision(8) << "W = " << w.statistic << ", df = " << w.df << ", p-value = " << w.p_value
            << '\n';
  for (const auto& [level, reject] : w.reject_at) {
    std::cout << "level " << level << ": " << (reject ? "reject" : "do not reject") << '\n';
  }
  return 0;
}

struct LyapunovArgs {
  std::string config;
  long steps = 10000;
  long reps = 100;
  std::uint64_t seed = 1;
  double multiplier = 3.0;
};

int run_lyapunov(const LyapunovArgs& a) {
  const ModelSpec spec = load_spec(a.config);
  require_valid(spec);
  LyapunovOptions lo;
  lo.n_steps = a.steps;
  lo.n_replications = a.reps;
  lo.seed = a.seed;
  const LyapunovEstimate g = estimate_lyapunov(spec, lo);
  std::cout << std::setprecision(8) << "gamma_hat = " << g.gamma_hat << '\n'
            << "std_error = " << g.std_error << '\n'
            << "restarts = " << g.restarts << '\n'
            << "stationary (gamma_hat + " << a.multiplier << " se < 0): " << (g.stationary(a.multiplier) ? "yes" : "no")
            << '\n';
  return 0;
}

struct McArgs {
  std::string config, summary_out, summary_csv, boxplot_csv, dump_csv;
  std::optional<long> n, replications;
  std::optional<std::uint64_t> seed;
};

int run_mc(const McArgs& a) {
  McDesign d = design_from_json(read_json_file(a.config));
  if (a.n) d.n = *a.n;
  if (a.replications) d.replications = *a.replications;
  if (a.seed) d.seed = *a.seed;
  const McSummary s = run_design(d);
  emit(a.summary_out, [&](std::ostream& os) { write_summary_table(os, s); });
  if (!a.summary_csv.empty()) {
    auto os = open_out(a.summary_csv);
    write_summary_csv(os, s);
  }
  if (!a.boxplot_csv.empty()) {
    auto os = open_out(a.boxplot_csv);
    write_boxplot_csv(os, s);
  }
  if (!a.dump_csv.empty()) {
    auto os = open_out(a.dump_csv);
    write_replications_csv(os, d, s);
  }
  return 0;
}

int run_identifiability(const std::string& config) {
  const ModelSpec spec = load_spec(config);
  require_valid(spec);
  const IdentifiabilityReport r = check_identifiability(spec);
  std::cout << "left coprimeness: not verified (skipped)\n";
  if (r.automatic) std::cout << "p = 0: identifiability is automatic\n";
  std::cout << "A+(1) + A-(1) nonzero: " << (r.nonzero_sum ? "yes" : "no") << '\n'
            << "rank of M: " << r.rank_m << " of " << spec.orders.m << '\n'
            << "full rank: " << (r.full_rank ? "yes" : "no") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CCC-APGARCH toolkit"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0: all cores)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate returns from a model config");
  s->add_option("--config", sim.config, "Model config (JSON)")->required();
  s->add_option("--n", sim.n, "Observations kept")->check(CLI::PositiveNumber);
  s->add_option("--burn-in", sim.burn_in, "Discarded warm-up steps")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--out", sim.out, "Output CSV (stdout when omitted)");
  s->add_flag("--volatility", sim.volatility, "Append h_1..h_m columns");
  s->add_option("--eta-out", sim.eta_out, "Also write the correlated innovations");
  s->add_option("--student-t", sim.student_dof, "Standardized Student-t innovations with this many degrees of freedom");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit by Gaussian QML and report");
  f->add_option("--data", fit.data, "Series CSV")->required();
  f->add_option("--config", fit.config, "Config with p, q, delta, delta_mode");
  f->add_option("--date-column", fit.date_column, "Name of the date column");
  f->add_option("--columns", fit.columns, "Value columns (default: all but the date)")->delimiter(',');
  f->add_flag("--prices", fit.prices, "Input holds prices; fit scaled log returns");
  f->add_flag("--no-header", fit.no_header, "Input has no header row");
  f->add_option("--scale", fit.scale, "Log-return scale for --prices");
  f->add_option("--p", fit.p, "GARCH order");
  f->add_option("--q", fit.q, "ARCH order");
  f->add_option("--delta-mode", fit.delta_mode, "known | estimate");
  f->add_option("--delta", fit.delta, "Known powers")->delimiter(',');
  f->add_option("--subperiods", fit.subperiods, "Also fit k equal consecutive windows")->check(CLI::PositiveNumber);
  f->add_option("--starts", fit.starts, "Optimizer starts")->check(CLI::PositiveNumber);
  f->add_option("--presample", fit.presample, "zero_omega | sample_mean")->check(CLI::IsMember({"zero_omega", "sample_mean"}));
  f->add_option("--seed", fit.seed, "Seed for start jitter and diagnostics");
  f->add_option("--json", fit.json_out, "Machine-readable report");
  f->add_option("--out", fit.text_out, "Text report (stdout when omitted)");
  f->add_flag("--no-inference", fit.no_inference, "Skip sandwich standard errors");

  WaldArgs wald;
  auto* w = app.add_subcommand("wald", "Wald test of C v = c from a fit report");
  w->add_option("--report", wald.report, "Report JSON written by fit --json")->required();
  w->add_option("--constraints", wald.constraints, "CSV rows: C entries then c")->required();
  w->add_option("--window", wald.window, "Window index for subperiod reports (0: full sample)");

  LyapunovArgs lyap;
  auto* l = app.add_subcommand("lyapunov", "Estimate the top Lyapunov exponent");
  l->add_option("--config", lyap.config, "Model config (JSON)")->required();
  l->add_option("--steps", lyap.steps, "Matrix products per replication")->check(CLI::Range(100L, 100000000L));
  l->add_option("--reps", lyap.reps, "Replications")->check(CLI::PositiveNumber);
  l->add_option("--seed", lyap.seed, "Random seed");
  l->add_option("--multiplier", lyap.multiplier, "Standard-error multiplier for the verdict");

  McArgs mc;
  auto* c = app.add_subcommand("mc", "Run a Monte Carlo design");
  c->add_option("--config", mc.config, "Design (JSON)")->required();
  c->add_option("--n", mc.n, "Override sample size");
  c->add_option("--replications", mc.replications, "Override replication count");
  c->add_option("--seed", mc.seed, "Override seed");
  c->add_option("--out", mc.summary_out, "Summary table (stdout when omitted)");
  c->add_option("--summary-csv", mc.summary_csv, "Summary CSV");
  c->add_option("--boxplot-csv", mc.boxplot_csv, "Quartile summary CSV");
  c->add_option("--dump", mc.dump_csv, "Per-replication estimates CSV");

  std::string ident_config;
  auto* id = app.add_subcommand("identifiability", "Check the identifiability rank condition");
  id->add_option("--config", ident_config, "Model config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorFamily::Parse);
  }

  try {
    set_max_threads(threads);
    if (*s) return run_simulate(sim);
    if (*f) return run_fit(fit);
    if (*w) return run_wald(wald);
    if (*l) return run_lyapunov(lyap);
    if (*c) return run_mc(mc);
    if (*id) return run_identifiability(ident_config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << '\n';
    return static_cast<int>(ErrorFamily::Parse);
  }
  return 0;
}
