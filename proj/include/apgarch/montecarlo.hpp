#pragma once

#include "apgarch/estimate.hpp"
#include "apgarch/params.hpp"
#include "apgarch/simulate.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace apgarch {

struct WaldDesign {
  Eigen::MatrixXd c_matrix;
  Eigen::VectorXd c_vector;
  double level = 0.05;
};

struct McDesign {
  ModelSpec truth;
  long n = 500;
  long replications = 100;
  EstimationMode::Kind mode = EstimationMode::Kind::DeltaKnown;
  std::uint64_t seed = 1;
  long burn_in = 1000;
  std::optional<WaldDesign> wald;
  int starts = 1;
  InitPolicy init = InitPolicy::zero_omega();  // presample of the fitted criterion
  bool skip_stationarity_check = false;
  long lyapunov_steps = 2000;
  long lyapunov_replications = 20;
};

struct ParameterSummary {
  std::string name;
  double true_value = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct ReplicationRecord {
  long index = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  bool failed = false;  // optimizer or inference error
  Eigen::VectorXd estimate;
  double objective = 0.0;
  std::optional<double> wald_p_value;
  std::vector<double> std_errors;  // empty when inference was not run or failed
  std::string error;
};

struct McSummary {
  std::vector<ParameterSummary> per_parameter;
  std::optional<double> rejection_pct;
  long failures = 0;  // replications excluded from the aggregates
  long used = 0;
  std::vector<ReplicationRecord> replications;
};

/// Sample quantile with linear interpolation between order statistics
/// (type 7): position (N - 1) prob, zero-based.
double quantile_type7(std::vector<double> values, double prob);

/// Seed of replication r: seed ^ splitmix64(r + 1).
std::uint64_t replication_seed(std::uint64_t seed, long replication);

/// Simulates, fits and optionally Wald-tests every replication, then
/// aggregates bias, RMSE and five-number summaries over the converged fits.
/// Throws StationarityVeto when the truth's Lyapunov estimate is not
/// significantly negative (unless skipped).
McSummary run_design(const McDesign& design);

/// Aggregates stored replications (exposed so the reduction can be checked).
McSummary summarize(const McDesign& design, std::vector<ReplicationRecord> records);

/// Percentage of used replications whose Wald p-value is below the level
/// (every replication rejects at level >= 1).
double rejection_frequency(const McDesign& design);
double rejection_frequency(const std::vector<ReplicationRecord>& records, double level);

/// Rows "parameter,min,q1,median,q3,max".
void write_boxplot_csv(std::ostream& out, const McSummary& summary);
/// Rows "parameter,true,bias,rmse,min,q1,median,q3,max".
void write_summary_csv(std::ostream& out, const McSummary& summary);
/// Aligned text table.
void write_summary_table(std::ostream& out, const McSummary& summary);
/// One row per replication with every estimate.
void write_replications_csv(std::ostream& out, const McDesign& design, const McSummary& summary);

}  // namespace apgarch
