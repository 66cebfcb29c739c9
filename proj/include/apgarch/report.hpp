#pragma once

#include "apgarch/estimate.hpp"
#include "apgarch/montecarlo.hpp"
#include "apgarch/params.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace apgarch {

inline constexpr const char* kVersion = "0.1.0";

/// Experiment configuration document. Keys: m, p, q, omega, a_plus, a_minus,
/// b (lists of row-major nested arrays, one per lag), rho (full matrix or the
/// strict lower triangle in column-major order), delta, delta_mode
/// ("known" | "estimate"). p defaults to 0 and q to 1. Missing coefficient
/// blocks default to zero, rho
/// to the identity, delta to 2. Throws ParseError on malformed documents
/// and InvalidSpec on dimension mismatches.
ModelSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const ModelSpec& spec, EstimationMode::Kind kind = EstimationMode::Kind::DeltaKnown);
EstimationMode::Kind mode_from_json(const nlohmann::json& doc);

/// Monte Carlo design: the spec keys (top level or under "truth") plus
/// n, replications, seed, burn_in, starts, presample ("zero_omega" |
/// "sample_mean"), and optionally
/// "wald": {"C": [[...]], "c": [...], "level": 0.05}.
McDesign design_from_json(const nlohmann::json& doc);

/// "zero_omega" or "sample_mean"; anything else is a ParseError.
InitPolicy init_from_name(const std::string& name);
std::string init_name(const InitPolicy& init);

nlohmann::json read_json_file(const std::string& path);

struct FitReport {
  ModelOrders orders;
  EstimationMode mode;
  std::vector<std::string> names;
  Eigen::VectorXd estimates;
  std::optional<Eigen::VectorXd> std_errors;  // absent: inference unavailable
  std::optional<Eigen::MatrixXd> sigma_hat;
  std::string inference_error;
  long n = 0;
  long window_begin = 0;  // first row of the sample inside the loaded series
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<int> boundary_active;
  std::optional<double> gamma_hat;  // Lyapunov exponent at the estimate
  std::optional<double> gamma_std_error;
  std::optional<double> b_spectral_radius;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  nlohmann::json options;  // free-form provenance

  /// Estimates as a parameter vector.
  ParamVector params() const { return {estimates, mode, orders}; }
};

struct ReportOptions {
  bool inference = true;
  long lyapunov_steps = 2000;
  long lyapunov_replications = 20;
};

/// Runs sandwich inference and stationarity diagnostics at the fit.
/// Inference failures are recorded, not thrown.
FitReport make_report(const FitResult& fit, const ReturnsMatrix& returns, const FitOptions& fit_options,
                      const ReportOptions& options = {});

nlohmann::json report_to_json(const FitReport& report);
FitReport report_from_json(const nlohmann::json& doc);
void write_report_text(std::ostream& out, const FitReport& report);

/// Reads rows of C followed by a final column holding c: each CSV row is
/// "C_k1,...,C_ks0,c_k". A header line is skipped when its first cell is
/// not numeric.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_constraints(const std::string& path);

}  // namespace apgarch
