#pragma once

// Test-side oracles, independent of the library implementation paths they
// check: erfc by quadrature of its defining integral, K_nu by adaptive
// quadrature of the cosh integral representation, Gamma via std::lgamma.

#include "fracheat/quadrature.hpp"

#include <cmath>

namespace testoracle {

// erfc(x) = (2/sqrt(pi)) int_x^inf e^{-t^2} dt, tail truncated where the
// integrand is below 1e-22.
inline double erfc_oracle(double x) {
    const double pi = 3.14159265358979323846;
    const double hi = std::max(x + 7.0, 7.0);
    const double v = fracheat::adaptive_gauss(
        [](double t) { return std::exp(-t * t); }, x, hi, 1e-14, 20);
    return 2.0 / std::sqrt(pi) * v;
}

// K_nu(z) = int_0^inf e^{-z cosh t} cosh(nu t) dt.
inline double bessel_k_oracle(double nu, double z) {
    const double tmax = std::acosh(60.0 / z + 1.0);
    return fracheat::adaptive_gauss(
        [nu, z](double t) {
            return std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
        },
        0.0, tmax, 1e-14, 20);
}

// Gamma via the C library (independent of the Lanczos path under test).
inline double gamma_oracle(double x) {
    if (x > 0.0) return std::exp(std::lgamma(x));
    // reflection for negative non-integers
    const double pi = 3.14159265358979323846;
    return pi / (std::sin(pi * x) * std::exp(std::lgamma(1.0 - x)));
}

}  // namespace testoracle
