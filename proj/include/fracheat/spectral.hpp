#pragma once

#include "fracheat/specfun.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fracheat {

/// Single source of truth for the exponents of the extension problem:
/// spatial order s, temporal order gamma, weight exponent alpha = 1-2s and
/// the normalization d_s = 2^{1-2s} Gamma(1-s)/Gamma(s).
struct FractionalParams {
    double s = 0.5;
    double gamma = 1.0;
    double alpha = 0.0;
    double d_s = 1.0;
    double c_coeff = 0.0;
    double domain_length = 1.0;
};

FractionalParams make_params(double s, double gamma, double c_coeff = 0.0,
                             double domain_length = 1.0);

/// Closed-form forcing profile f_k(t) for one spectral mode.
struct TimeProfile {
    enum class Kind {
        zero,
        constant,           // c
        power,              // c t^p, p >= 0
        exponential_decay,  // c e^{-p t}
        mittag_leffler_mode // c E_{gamma,1}(-p t^gamma)
    };
    Kind kind = Kind::zero;
    double c = 0.0;
    double p = 0.0;

    bool is_zero() const { return kind == Kind::zero || c == 0.0; }
    double operator()(double t, double gamma_order) const;
};

/// Eigenpair data for a finite spectral expansion on Omega = (0,ell):
/// lambda_k = (k pi / ell)^2 + c, phi_k = sqrt(2/ell) sin(k pi x / ell).
struct SpectralMode {
    int k = 1;
    double lambda = 0.0;
    double u0 = 0.0;
    TimeProfile f;
};

struct SpectralData {
    FractionalParams params;
    std::vector<SpectralMode> modes;
};

double eigenvalue(int k, const FractionalParams& params);
double eigenfunction_value(int k, double x, const FractionalParams& params);
double eigenfunction_derivative(int k, double x,
                                const FractionalParams& params);

SpectralData make_spectral_data(
    const FractionalParams& params,
    const std::vector<std::pair<int, double>>& k_and_u0,
    const std::vector<TimeProfile>& profiles = {});

/// Extension profile on the infinite cylinder:
///   psi(y) = c_s (sqrt(lambda) y)^s K_s(sqrt(lambda) y), psi(0) = 1,
/// with the exponential closed form at s = 1/2. Returns value and dpsi/dy.
/// Underflow-safe: returns (0,0) once sqrt(lambda) y > 700.
struct ProfileEval {
    double value = 0.0;
    double derivative = 0.0;
};

ProfileEval psi_profile(const FractionalParams& params, double lambda,
                        double y);

/// Truncated-cylinder profile chi(y) combining K_s and I_s so that
/// chi(0) = 1, chi(Y) = 0, plus the effective-rate shift coefficient
/// e_ks = 2^{1-s} b_s / Gamma(s) (b_s < 0, so e_ks < 0). When
/// sqrt(lambda) Y > 350 the shift is below double precision and the psi
/// profile is returned with e_ks = 0.
struct ChiEval {
    double value = 0.0;
    double derivative = 0.0;
    double e_ks = 0.0;
};

ChiEval chi_profile(const FractionalParams& params, double lambda, double Y,
                    double y);

/// Effective decay rate of one mode: lambda^s on the infinite cylinder,
/// lambda^s (1 - e_ks/d_s) on the truncated one (the Dirichlet cap at y=Y
/// accelerates the decay; e_ks -> 0 exponentially in Y).
struct ModeSolution {
    SpectralMode mode;
    double effective_rate = 0.0;
};

ModeSolution make_mode_solution(const SpectralMode& mode,
                                const FractionalParams& params,
                                std::optional<double> truncation_Y);

/// Duhamel convolution int_0^t r^{gamma-1} E_{gamma,gamma}(-mu r^gamma)
/// f(t-r) dr (or the exponential kernel for gamma = 1), by Gauss-Jacobi /
/// Gauss-Legendre panels dyadically refined toward both endpoints.
double duhamel_convolution(double mu, double gamma, const TimeProfile& f,
                           double t, double tol = 1e-10);

/// u_k(t) = E_{gamma,1}(-mu t^gamma) u0 + Duhamel term (exp for gamma=1).
double mode_solution_u(const ModeSolution& ms, const FractionalParams& params,
                       double t, double tol = 1e-10);

/// Exact-solution evaluator; caches the per-mode effective rates.
struct OracleEval {
    double v = 0.0;
    double grad_x = 0.0;
    double grad_y = 0.0;
};

class SpectralOracle {
public:
    SpectralOracle(SpectralData data, std::optional<double> truncation_Y);

    OracleEval evaluate(double x, double y, double t) const;
    double trace_value(double x, double t) const;
    /// u_k(t) for mode index i (position in the mode list).
    double mode_value(std::size_t i, double t) const;
    double effective_rate(std::size_t i) const;

    const SpectralData& data() const { return data_; }
    std::optional<double> truncation() const { return Y_; }

private:
    SpectralData data_;
    std::optional<double> Y_;
    std::vector<ModeSolution> solutions_;
};

OracleEval oracle_evaluate(const SpectralData& data, double x, double y,
                           double t,
                           std::optional<double> truncation_Y = std::nullopt);

/// Spectral norm (sum_k lambda_k^{s_signed} w_k^2)^{1/2}; s_signed < 0
/// gives the dual norm.
double hs_norm(std::span<const std::pair<int, double>> coeffs, double s_signed,
               const SpectralData& data);

/// Residual of the energy identity
///   int_a^b y^alpha (lambda psi^2 + psi'^2) dy = [y^alpha psi psi']_a^b,
/// computed with adaptive high-order quadrature; a test statistic.
double energy_identity_residual(const FractionalParams& params, double lambda,
                                double a, double b);

}  // namespace fracheat
