#pragma once

namespace fracheat {

/// Evaluation strategy for the Mittag-Leffler function on the nonpositive
/// real axis: Taylor series below series_radius, algebraic asymptotic
/// expansion above asymptotic_radius, quadrature of the integral
/// representation in between (and as fallback when either expansion cannot
/// reach the requested tolerance).
struct MLEvalConfig {
    double series_radius = 5.0;
    double asymptotic_radius = 15.0;
    int quadrature_points = 32;
    double tolerance = 1e-10;
};

/// Gamma function for real x, x not a nonpositive integer.
/// Lanczos approximation with reflection; relative error well below 1e-13
/// on [-10, 50]. Throws std::domain_error at the poles.
double gamma_fn(double x);

/// 1/Gamma(x) for any real x; returns 0 at the poles (nonpositive integers).
double reciprocal_gamma(double x);

/// Mittag-Leffler E_{gamma,mu}(z) for gamma in (0,2), real mu and z <= 0
/// (the only regime the solver needs: arguments -lambda_k^s t^gamma).
/// Absolute error <= cfg.tolerance. Throws std::runtime_error if the
/// intermediate-regime quadrature fails to meet the tolerance.
double mittag_leffler(double gamma, double mu, double z,
                      const MLEvalConfig& cfg = {});

/// Modified Bessel functions of real order nu in (0,1), z > 0.
/// I_nu: ascending series for moderate z, large-z asymptotic expansion.
/// K_nu: reflection formula (pi/2)(I_{-nu}-I_nu)/sin(nu pi) for small z,
/// quadrature of the cosh integral representation in the midrange, and the
/// asymptotic expansion for large z; closed form at nu = 1/2.
double bessel_i(double nu, double z);
double bessel_k(double nu, double z);

/// Normalization d_s = 2^{1-2s} Gamma(1-s)/Gamma(s) relating the fractional
/// operator to the conormal derivative of the extension.
double normalization_constant(double s);

namespace detail {
/// I_nu(z) for any order nu > -1 (needed with nu = s-1 by the profile
/// derivatives and nu = -s by the reflection formula).
double bessel_i_any(double nu, double z);
}  // namespace detail

}  // namespace fracheat
