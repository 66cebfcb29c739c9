#include "apgarch/report.hpp"

#include "apgarch/error.hpp"
#include "apgarch/inference.hpp"
#include "apgarch/stationarity.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace apgarch {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

Eigen::VectorXd vector_from(const json& j, const std::string& key) {
  if (!j.is_array()) bad("'" + key + "' must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad("'" + key + "' must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad("'" + key + "' must be a nested array (rows)");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("'" + key + "' rows have unequal lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) bad("'" + key + "' must hold numbers");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return out;
}

json vector_to(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(std::isfinite(v[i]) ? json(v[i]) : json(nullptr));
  return out;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to(m.row(r).transpose()));
  return out;
}

json optional_number(const std::optional<double>& x) {
  return x && std::isfinite(*x) ? json(*x) : json(nullptr);
}

std::optional<double> number_or_empty(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<double>();
}

int int_key(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) bad(std::string("missing integer key '") + key + "'");
  return doc[key].get<int>();
}

int int_key_or(const json& doc, const char* key, int fallback) {
  return doc.contains(key) ? int_key(doc, key) : fallback;
}

void lag_matrices(const json& doc, const char* key, int lags, int m, std::vector<Eigen::MatrixXd>& out) {
  if (!doc.contains(key)) return;
  const json& j = doc[key];
  if (!j.is_array()) bad(std::string("'") + key + "' must be a list of matrices");
  // A single matrix is accepted for one lag.
  const bool single = lags == 1 && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_number();
  if (single) {
    out[0] = matrix_from(j, key);
  } else {
    if (static_cast<int>(j.size()) != lags) {
      throw Error(ErrorCode::InvalidSpec, std::string("'") + key + "' must list " + std::to_string(lags) + " matrices");
    }
    for (int k = 0; k < lags; ++k) out[k] = matrix_from(j[k], key);
  }
  for (const auto& a : out) {
    if (a.rows() != m || a.cols() != m) throw Error(ErrorCode::InvalidSpec, std::string("'") + key + "' must be m x m");
  }
}

}  // namespace

ModelSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) bad("configuration must be a JSON object");
  ModelOrders orders{int_key(doc, "m"), int_key_or(doc, "p", 0), int_key_or(doc, "q", 1)};
  if (orders.m < 1 || orders.p < 0 || orders.q < 0) throw Error(ErrorCode::InvalidSpec, "need m >= 1, p >= 0, q >= 0");
  ModelSpec s = ModelSpec::zeros(orders);
  const int m = orders.m;
  if (doc.contains("omega")) s.omega = vector_from(doc["omega"], "omega");
  lag_matrices(doc, "a_plus", orders.q, m, s.a_plus);
  lag_matrices(doc, "a_minus", orders.q, m, s.a_minus);
  lag_matrices(doc, "b", orders.p, m, s.b);
  if (doc.contains("delta")) s.delta = vector_from(doc["delta"], "delta");
  if (doc.contains("rho")) {
    const json& r = doc["rho"];
    if (r.is_number()) {
      if (m != 2) throw Error(ErrorCode::InvalidSpec, "a scalar 'rho' needs m = 2");
      s.r(1, 0) = s.r(0, 1) = r.get<double>();
    } else if (r.is_array() && !r.empty() && r[0].is_array()) {
      s.r = matrix_from(r, "rho");
    } else {
      const Eigen::VectorXd lower = vector_from(r, "rho");
      if (lower.size() != m * (m - 1) / 2) {
        throw Error(ErrorCode::InvalidSpec, "'rho' must hold m(m-1)/2 correlations");
      }
      for (int j = 0; j < m; ++j) {
        for (int i = j + 1; i < m; ++i) s.r(i, j) = s.r(j, i) = lower[rho_index(m, i, j)];
      }
    }
  }
  if (s.omega.size() != m || s.delta.size() != m || s.r.rows() != m || s.r.cols() != m) {
    throw Error(ErrorCode::InvalidSpec, "omega, delta and rho must match m");
  }
  return s;
}

EstimationMode::Kind mode_from_json(const json& doc) {
  if (!doc.contains("delta_mode")) return EstimationMode::Kind::DeltaKnown;
  const std::string mode = doc["delta_mode"].get<std::string>();
  if (mode == "known") return EstimationMode::Kind::DeltaKnown;
  if (mode == "estimate") return EstimationMode::Kind::DeltaEstimated;
  bad("delta_mode must be \"known\" or \"estimate\"");
}

json spec_to_json(const ModelSpec& spec, EstimationMode::Kind kind) {
  json doc;
  doc["m"] = spec.orders.m;
  doc["p"] = spec.orders.p;
  doc["q"] = spec.orders.q;
  doc["omega"] = vector_to(spec.omega);
  auto lags = [](const std::vector<Eigen::MatrixXd>& ms) {
    json out = json::array();
    for (const auto& a : ms) out.push_back(matrix_to(a));
    return out;
  };
  doc["a_plus"] = lags(spec.a_plus);
  doc["a_minus"] = lags(spec.a_minus);
  doc["b"] = lags(spec.b);
  doc["rho"] = matrix_to(spec.r);
  doc["delta"] = vector_to(spec.delta);
  doc["delta_mode"] = kind == EstimationMode::Kind::DeltaEstimated ? "estimate" : "known";
  return doc;
}

InitPolicy init_from_name(const std::string& name) {
  if (name == "zero_omega") return InitPolicy::zero_omega();
  if (name == "sample_mean") return InitPolicy::sample_mean();
  bad("presample must be zero_omega or sample_mean, got '" + name + "'");
}

std::string init_name(const InitPolicy& init) {
  switch (init.kind) {
    case InitPolicy::Kind::ZeroOmega: return "zero_omega";
    case InitPolicy::Kind::SampleMean: return "sample_mean";
    case InitPolicy::Kind::Explicit: return "explicit";
  }
  return "explicit";
}

McDesign design_from_json(const json& doc) {
  if (!doc.is_object()) bad("design must be a JSON object");
  McDesign d;
  const json& truth = doc.contains("truth") ? doc["truth"] : doc;
  d.truth = spec_from_json(truth);
  d.mode = mode_from_json(doc.contains("delta_mode") ? doc : truth);
  try {
    d.n = doc.value("n", d.n);
    d.replications = doc.value("replications", d.replications);
    d.seed = doc.value("seed", d.seed);
    d.burn_in = doc.value("burn_in", d.burn_in);
    d.starts = doc.value("starts", d.starts);
    if (doc.contains("presample")) d.init = init_from_name(doc["presample"].get<std::string>());
    if (doc.contains("wald")) {
      const json& w = doc["wald"];
      WaldDesign wd;
      wd.c_matrix = matrix_from(w.at("C"), "wald.C");
      wd.c_vector = vector_from(w.at("c"), "wald.c");
      wd.level = w.value("level", wd.level);
      d.wald = wd;
    }
  } catch (const json::exception& e) {
    bad(std::string("design: ") + e.what());
  }
  return d;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

FitReport make_report(const FitResult& fit, const ReturnsMatrix& returns, const FitOptions& fit_options,
                      const ReportOptions& options) {
  FitReport r;
  r.orders = fit.v_hat.orders;
  r.mode = fit.v_hat.mode;
  r.names = ParamLayout(r.orders, r.mode.kind).names();
  r.estimates = fit.v_hat.values;
  r.n = fit.n;
  r.objective = fit.objective;
  r.converged = fit.converged;
  r.iterations = fit.iterations;
  r.gradient_norm = fit.gradient_norm;
  r.boundary_active = fit.boundary_active;
  r.seed = fit_options.seed;
  r.options = {{"starts", fit_options.starts},
               {"tolerance", fit_options.tolerance},
               {"gradient_tolerance", fit_options.gradient_tolerance},
               {"max_iterations", fit_options.max_iterations},
               {"presample", init_name(fit_options.init)}};

  if (options.inference) {
    try {
      const SandwichCovariance cov = sandwich(fit, returns, fit_options.init);
      if (cov.std_errors.allFinite()) {
        r.std_errors = cov.std_errors;
        r.sigma_hat = cov.sigma_hat;
      } else {
        r.inference_error = "sandwich covariance has a negative or non-finite diagonal";
      }
    } catch (const Error& e) {
      r.inference_error = e.what();
    }
  } else {
    r.inference_error = "inference not requested";
  }

  try {
    const ModelSpec spec = unpack(fit.v_hat);
    r.b_spectral_radius = spectral_radius_b(spec);
    if (r.orders.q >= 1) {
      LyapunovOptions lo;
      lo.n_steps = options.lyapunov_steps;
      lo.n_replications = options.lyapunov_replications;
      lo.seed = fit_options.seed;
      const LyapunovEstimate g = estimate_lyapunov(spec, lo);
      r.gamma_hat = g.gamma_hat;
      r.gamma_std_error = g.std_error;
    }
  } catch (const Error&) {
    // Diagnostics stay unavailable.
  }
  return r;
}

json report_to_json(const FitReport& r) {
  json doc;
  doc["orders"] = {{"m", r.orders.m}, {"p", r.orders.p}, {"q", r.orders.q}};
  doc["delta_mode"] = r.mode.estimates_delta() ? "estimate" : "known";
  if (!r.mode.estimates_delta()) doc["fixed_delta"] = vector_to(r.mode.fixed_delta);
  json est = json::array();
  for (Eigen::Index i = 0; i < r.estimates.size(); ++i) {
    json e = {{"name", r.names[static_cast<std::size_t>(i)]}, {"estimate", r.estimates[i]}};
    e["std_error"] = r.std_errors ? json((*r.std_errors)[i]) : json("unavailable");
    est.push_back(e);
  }
  doc["estimates"] = est;
  doc["sigma_hat"] = r.sigma_hat ? matrix_to(*r.sigma_hat) : json(nullptr);
  if (!r.inference_error.empty()) doc["inference_error"] = r.inference_error;
  doc["n"] = r.n;
  doc["window_begin"] = r.window_begin;
  doc["objective"] = r.objective;
  doc["converged"] = r.converged;
  doc["iterations"] = r.iterations;
  doc["gradient_norm"] = r.gradient_norm;
  doc["diagnostics"] = {{"gamma_hat", optional_number(r.gamma_hat)},
                        {"gamma_std_error", optional_number(r.gamma_std_error)},
                        {"b_spectral_radius", optional_number(r.b_spectral_radius)},
                        {"boundary_active", r.boundary_active}};
  doc["provenance"] = {{"seed", r.seed}, {"version", r.version}, {"options", r.options}};
  return doc;
}

FitReport report_from_json(const json& doc) {
  FitReport r;
  try {
    const json& o = doc.at("orders");
    r.orders = {o.at("m").get<int>(), o.at("p").get<int>(), o.at("q").get<int>()};
    r.mode = doc.at("delta_mode").get<std::string>() == "estimate"
                 ? EstimationMode::estimated()
                 : EstimationMode::known(vector_from(doc.at("fixed_delta"), "fixed_delta"));
    const json& est = doc.at("estimates");
    const auto size = static_cast<Eigen::Index>(est.size());
    if (size != param_count(r.orders, r.mode.kind)) bad("estimate count does not match the orders");
    r.estimates.resize(size);
    Eigen::VectorXd se(size);
    bool have_se = true;
    for (Eigen::Index i = 0; i < size; ++i) {
      const json& e = est[static_cast<std::size_t>(i)];
      r.names.push_back(e.at("name").get<std::string>());
      r.estimates[i] = e.at("estimate").get<double>();
      if (e.at("std_error").is_number()) {
        se[i] = e["std_error"].get<double>();
      } else {
        have_se = false;
      }
    }
    if (have_se) r.std_errors = se;
    if (doc.contains("sigma_hat") && !doc["sigma_hat"].is_null()) r.sigma_hat = matrix_from(doc["sigma_hat"], "sigma_hat");
    r.inference_error = doc.value("inference_error", std::string());
    r.n = doc.at("n").get<long>();
    r.window_begin = doc.value("window_begin", 0L);
    r.objective = doc.at("objective").get<double>();
    r.converged = doc.at("converged").get<bool>();
    r.iterations = doc.at("iterations").get<int>();
    r.gradient_norm = doc.at("gradient_norm").get<double>();
    const json& d = doc.at("diagnostics");
    r.gamma_hat = number_or_empty(d, "gamma_hat");
    r.gamma_std_error = number_or_empty(d, "gamma_std_error");
    r.b_spectral_radius = number_or_empty(d, "b_spectral_radius");
    r.boundary_active = d.at("boundary_active").get<std::vector<int>>();
    const json& p = doc.at("provenance");
    r.seed = p.at("seed").get<std::uint64_t>();
    r.version = p.at("version").get<std::string>();
    r.options = p.value("options", json::object());
  } catch (const json::exception& e) {
    bad(std::string("report: ") + e.what());
  }
  return r;
}

void write_report_text(std::ostream& out, const FitReport& r) {
  out << "CCC-APGARCH(" << r.orders.p << "," << r.orders.q << "), m = " << r.orders.m << ", n = " << r.n
      << ", delta " << (r.mode.estimates_delta() ? "estimated" : "known") << "\n\n";
  out << std::left << std::setw(18) << "parameter" << std::right << std::setw(14) << "estimate" << std::setw(14)
      << "std.error" << '\n';
  out << std::fixed << std::setprecision(6);
  for (Eigen::Index i = 0; i < r.estimates.size(); ++i) {
    out << std::left << std::setw(18) << r.names[static_cast<std::size_t>(i)] << std::right << std::setw(14)
        << r.estimates[i];
    if (r.std_errors) {
      out << std::setw(14) << (*r.std_errors)[i];
    } else {
      out << std::setw(14) << "unavailable";
    }
    for (int b : r.boundary_active) {
      if (b == i) out << "  (at bound)";
    }
    out << '\n';
  }
  out << '\n' << "objective (mean, constant dropped): " << r.objective << '\n';
  out << "converged: " << (r.converged ? "yes" : "no") << ", iterations " << r.iterations
      << ", projected gradient " << std::scientific << std::setprecision(2) << r.gradient_norm << std::fixed
      << std::setprecision(6) << '\n';
  if (!r.inference_error.empty()) out << "inference unavailable: " << r.inference_error << '\n';
  if (r.gamma_hat) {
    out << "Lyapunov exponent at estimate: " << *r.gamma_hat << " (se " << r.gamma_std_error.value_or(NAN) << ")\n";
  }
  if (r.b_spectral_radius) out << "spectral radius of B companion: " << *r.b_spectral_radius << '\n';
  out << "seed " << r.seed << ", version " << r.version << '\n';
  out.unsetf(std::ios::floatfield);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_constraints(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (lineno == 1) continue;
      bad(path + ": row " + std::to_string(lineno) + " is not numeric");
    }
    if (!rows.empty() && row.size() != rows.front().size()) bad(path + ": rows have unequal lengths");
    rows.push_back(row);
  }
  if (rows.empty() || rows.front().size() < 2) bad(path + ": need at least one row with C entries and c");
  const auto s = static_cast<Eigen::Index>(rows.size());
  const auto cols = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Eigen::MatrixXd c_matrix(s, cols);
  Eigen::VectorXd c_vector(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    for (Eigen::Index j = 0; j < cols; ++j) c_matrix(k, j) = rows[k][j];
    c_vector[k] = rows[k][cols];
  }
  return {c_matrix, c_vector};
}

}  // namespace apgarch
