#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace illposed {

// Thrown on malformed experiment configs; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a solver fails inside the runner; the CLI maps it to exit code 3.
struct MethodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string problem_name;  // integration | autoconvolution | diagonal_cubic
    std::size_t n = 0;

    double nu = 1.0;
    double rho = 1.0;
    std::uint64_t w_seed = 1;

    std::string method;  // tsvd | tikhonov | landweber | lsq_proj | dual_lsq_proj |
                         // nl_landweber | lm | irgn | pinsker | map | cm
    std::string rule;    // apriori | morozov | quasiopt | hanke_raus | l_curve | none

    double delta_start = 0.0;
    double delta_factor = 0.0;  // in (0,1): the grid is strictly decreasing
    std::size_t delta_count = 0;

    double tau = 2.0;
    double sigma_lm = 0.7;
    double sigma_prior = 1.0;
    std::size_t cm_samples = 2000;

    std::uint64_t master_seed = 0;
    std::size_t realizations = 1;

    std::string output = "results";
    std::string aggregate = "median";  // or "mean"
};

// Parses and validates a strict-schema JSON config; unknown keys are errors
// naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunRecord {
    double delta = 0.0;
    double alpha_or_N = 0.0;
    double error = 0.0;
    double residual = 0.0;
    std::string rule;
    std::string method;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;  // measured, but written to the CSV as 0 (see write_csv)
};

// Runs the configured sweep; records are ordered by (delta descending,
// realization ascending) regardless of the number of threads.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      std::size_t threads = 1);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double fit_residual = 0.0;  // RMS of log-log residuals
};

// Least-squares line through (log delta, log aggregated-error); needs at least
// 3 distinct delta values.
RateFit fit_rate(const std::vector<RunRecord>& records,
                 const std::string& aggregate = "median");

// Byte-stable CSV with header delta,alpha_or_N,error,residual,rule,method,seed,
// wall_ms. Numeric fields use 17 significant digits; the wall_ms column is
// written as 0 so identical configs give identical bytes. Measured timings go
// to <path>.timings.txt.
void write_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_csv(const std::string& path);

// One two-column text file (log10 delta, log10 aggregated error) per
// (method, rule) pair present in the records, named <dir>/<method>_<rule>.dat.
void write_plot_data(const std::vector<RunRecord>& records, const std::string& dir,
                     const std::string& aggregate = "median");

}  // namespace illposed
