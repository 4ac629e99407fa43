#ifndef NHSENSE_CLI_HPP
#define NHSENSE_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhsense/dilation.hpp"
#include "nhsense/fisher.hpp"
#include "nhsense/models.hpp"

namespace nhsense::cli {

enum class OutputFormat { csv, jsonl };

struct ThetaRange {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  /// count points, endpoints included.
  std::vector<double> grid() const;
};

struct SweepConfig {
  std::string model;
  ParamMap fixed_params;
  ThetaRange theta;
  std::vector<double> times;
  double fd_step = 0.0;  ///< <= 0: default_fd_step(theta)
  int steps_per_unit_time = kDefaultStepsPerUnitTime;
  Eta0Mode eta0 = Eta0Mode::auto_rescale();
  std::string output;  ///< empty: stdout
  OutputFormat format = OutputFormat::csv;
  int jobs = 0;  ///< <= 0: hardware concurrency
  bool strict = false;

  /// Throws Error(UsageError) when the config cannot describe a sweep.
  void validate() const;
};

struct SweepRecord {
  std::string model;
  double theta = 0.0;
  double t = 0.0;
  double f_q_nh = 0.0;
  double f_q_joint = 0.0;
  double p_d = 0.0;
  double q_d = 0.0;
  double q_r = 0.0;
  double f_post = 0.0;
  double f_tot = 0.0;
  double eff_qfi = 0.0;
  bool hierarchy_ok = false;
  /// Set when the point could not be evaluated; numeric fields are then NaN.
  std::optional<std::string> failure;
  std::vector<std::string> warnings;
};

/// Parses "min:max:count".
ThetaRange parse_theta_range(std::string_view text);
/// Parses a comma-separated list of reals.
std::vector<double> parse_real_list(std::string_view text);
/// Parses "auto" or a scalar c >= 1.
Eta0Mode parse_eta0(std::string_view text);

/// Applies one key = value setting; keys accept '-' or '_'.
void apply_setting(SweepConfig& config, const std::string& key, const std::string& value);
/// Flat key = value text, '#' starts a comment.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::string& path);

/// Default hierarchy tolerance; NHSENSE_TOL replaces the relative part.
HierarchyTolerance default_tolerance();

std::string csv_header();
SweepRecord make_record(const FisherBreakdown& b, const HierarchyTolerance& tol);
SweepRecord failed_record(const std::string& model, double theta, double t,
                          const std::string& reason);

struct SweepResult {
  std::vector<SweepRecord> records;  ///< grid order: t outer, theta inner
  bool aborted = false;              ///< --strict stopped at a failure
};

/// Evaluates the grid on a worker pool; rows come back in grid order.
SweepResult run_sweep(const SweepConfig& config, const HierarchyTolerance& tol);

void write_records(std::ostream& out, const std::vector<SweepRecord>& records,
                   OutputFormat format);

struct VerifyOptions {
  std::vector<std::string> models;  ///< empty: all registered models
  std::uint64_t seed = 1;
  int points = 20;
  bool corrupt = false;
  /// Step-halving/doubling self-check of the time-ordered path.
  bool convergence = false;
  std::optional<std::pair<double, double>> theta;
  std::optional<double> t;
  ParamMap params;
  HierarchyTolerance tol;
};

/// Randomized invariant suite. Writes one line per invariant and model,
/// documented discrepancies and warnings, then a summary. Returns the exit status.
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

struct DilateOptions {
  std::string model;
  double theta = 0.0;
  double t = 0.0;
  ParamMap params;
  DilationOptions dilation;
};

/// Prints eta(0), m, H_SE (or time samples of them), residuals and the rescale factor.
int cmd_dilate(const DilateOptions& options, std::ostream& out, std::ostream& err);

/// Entry point of the nhsense executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nhsense::cli

#endif  // NHSENSE_CLI_HPP
