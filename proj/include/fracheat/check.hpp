#pragma once

#include "fracheat/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace fracheat {

/// Thresholds for the verification suite; one place for all tolerance
/// bands, loaded from a [check] config section.
struct CheckConfig {
    std::uint64_t seed = 20260801;
    double stab_rel_slack = 1e-10;
    double rate_time_frac_min = 0.4;
    double rate_time_be = 1.0;
    double rate_time_be_tol = 0.1;
    double rate_space_energy = -0.5;
    double rate_space_energy_tol = 0.1;
    double rate_trace_tol = 0.15;
    double trunc_factor_min = 0.9;
    double ml_ode_tol = 1e-6;
    double bessel_energy_tol = 1e-8;
    double energy_norm_rel_tol = 1e-6;
    double caputo_power_tol = 1e-4;
    double isigma_slack = 0.02;
    double assembly_cross_tol = 1e-12;
    double dense_step_tol = 1e-12;
};

CheckConfig check_config_from(const ParsedConfig& cfg);

/// Runs every verification criterion, printing one pass/fail line each.
/// Returns the number of failed criteria.
int run_check(std::ostream& os, const CheckConfig& cfg, bool verbose = false);

}  // namespace fracheat
