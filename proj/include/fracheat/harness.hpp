#pragma once

#include "fracheat/config.hpp"
#include "fracheat/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracheat {

enum class SweepKind { time, space, trunc };

struct SweepSpec {
    SweepKind kind = SweepKind::time;
    std::vector<double> values;
    int K = 256;       // fixed time steps for space/trunc sweeps
    int M = 32;        // fixed y-intervals for time/trunc sweeps
    int Mx = 0;        // 0: Mx = M
    double Y = 1.0;
    double grading = 0.0;     // <= 0: default grading for the session alpha
    bool mode_space = false;  // time sweep on the diagonal semi-discrete form
    bool projector_only = false;  // space sweep of the elliptic projector
};

struct ExperimentConfig {
    FractionalParams params;
    double T = 1.0;
    std::vector<std::pair<int, double>> mode_u0;
    std::vector<TimeProfile> mode_f;
    SweepSpec sweep;
    std::string out_path;
    std::uint64_t seed = 1;
};

ExperimentConfig experiment_from_config(const ParsedConfig& cfg);
ExperimentConfig load_experiment(const std::string& path);

/// Least-squares slope over the last min(3, n) points.
/// LogLog: log(err) vs log(knob); LogLinear: log(err) vs knob.
enum class FitTransform { log_log, log_linear };
double fit_rate(const std::vector<std::pair<double, double>>& knob_and_error,
                FitTransform transform);

struct RateReport {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> slopes;
    std::vector<std::pair<std::string, double>> references;
    bool stability_ok = true;
};

void write_report_csv(std::ostream& os, const RateReport& report);

RateReport run_time_sweep(const ExperimentConfig& config);
RateReport run_space_sweep(const ExperimentConfig& config);
RateReport run_truncation_sweep(const ExperimentConfig& config);

/// Per-quad-point tables of the separable oracle factors; the only
/// time-dependent quantity left is u_k(t), so error integrals over many
/// time steps avoid re-evaluating Bessel/Mittag-Leffler at fixed points.
struct OracleTables {
    const GradedTensorMesh* mesh = nullptr;
    TensorQuadrature tq;
    std::vector<std::vector<double>> phi, dphi;    // [mode][Mx*nq]
    std::vector<std::vector<double>> prof, dprof;  // [mode][My*nq]
};

OracleTables make_oracle_tables(const GradedTensorMesh& mesh,
                                const FractionalParams& params,
                                const SpectralOracle& oracle, int nq = 5);

/// Energy error of `state` against the oracle with mode values
/// u[m] = u_m(t), using the precomputed tables.
double energy_error_tabulated(const GradedTensorMesh& mesh,
                              const FractionalParams& params,
                              const OracleTables& tables,
                              std::span<const double> state,
                              std::span<const double> mode_values);

}  // namespace fracheat
