#include "fracheat/spectral.hpp"

#include "fracheat/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

FractionalParams make_params(double s, double gamma, double c_coeff,
                             double domain_length) {
    if (s <= 0.0 || s >= 1.0)
        throw std::invalid_argument("make_params: s must be in (0,1)");
    if (gamma <= 0.0 || gamma > 1.0)
        throw std::invalid_argument("make_params: gamma must be in (0,1]");
    if (c_coeff < 0.0)
        throw std::invalid_argument("make_params: c_coeff must be >= 0");
    if (domain_length <= 0.0)
        throw std::invalid_argument("make_params: domain_length must be > 0");
    FractionalParams p;
    p.s = s;
    p.gamma = gamma;
    p.alpha = 1.0 - 2.0 * s;
    p.d_s = normalization_constant(s);
    p.c_coeff = c_coeff;
    p.domain_length = domain_length;
    return p;
}

double TimeProfile::operator()(double t, double gamma_order) const {
    switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return c;
        case Kind::power:
            return c * std::pow(t, p);
        case Kind::exponential_decay:
            return c * std::exp(-p * t);
        case Kind::mittag_leffler_mode:
            if (t == 0.0) return c;
            if (gamma_order == 1.0) return c * std::exp(-p * t);
            return c * mittag_leffler(gamma_order, 1.0,
                                      -p * std::pow(t, gamma_order));
    }
    return 0.0;
}

double eigenvalue(int k, const FractionalParams& params) {
    if (k < 1) throw std::invalid_argument("eigenvalue: k >= 1 required");
    const double w = k * kPi / params.domain_length;
    return w * w + params.c_coeff;
}

double eigenfunction_value(int k, double x, const FractionalParams& params) {
    const double ell = params.domain_length;
    return std::sqrt(2.0 / ell) * std::sin(k * kPi * x / ell);
}

double eigenfunction_derivative(int k, double x,
                                const FractionalParams& params) {
    const double ell = params.domain_length;
    const double w = k * kPi / ell;
    return std::sqrt(2.0 / ell) * w * std::cos(w * x);
}

SpectralData make_spectral_data(
    const FractionalParams& params,
    const std::vector<std::pair<int, double>>& k_and_u0,
    const std::vector<TimeProfile>& profiles) {
    SpectralData data;
    data.params = params;
    for (std::size_t i = 0; i < k_and_u0.size(); ++i) {
        SpectralMode m;
        m.k = k_and_u0[i].first;
        m.lambda = eigenvalue(m.k, params);
        m.u0 = k_and_u0[i].second;
        if (i < profiles.size()) m.f = profiles[i];
        data.modes.push_back(m);
    }
    for (std::size_t i = 1; i < data.modes.size(); ++i)
        if (data.modes[i].k <= data.modes[i - 1].k)
            throw std::invalid_argument(
                "make_spectral_data: mode indices must be increasing");
    return data;
}

ProfileEval psi_profile(const FractionalParams& params, double lambda,
                        double y) {
    if (lambda <= 0.0) throw std::invalid_argument("psi_profile: lambda > 0");
    if (y < 0.0) throw std::invalid_argument("psi_profile: y >= 0");
    const double sl = std::sqrt(lambda);
    const double z = sl * y;
    ProfileEval out;
    const double s = params.s;
    if (z > 700.0) return out;  // underflow guard: profile is ~e^{-z}
    if (std::abs(s - 0.5) < 1e-12) {
        const double e = std::exp(-z);
        out.value = e;
        out.derivative = -sl * e;
        return out;
    }
    if (y == 0.0) {
        out.value = 1.0;
        // psi' ~ -d_s lambda^s y^{-alpha}: zero limit for s > 1/2 (alpha<0),
        // unbounded for s < 1/2.
        out.derivative = (s > 0.5)
                             ? 0.0
                             : std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double cs = std::pow(2.0, 1.0 - s) / gamma_fn(s);
    const double zs = std::pow(z, s);
    out.value = cs * zs * bessel_k(s, z);
    // d/dz (z^s K_s(z)) = -z^s K_{s-1}(z) = -z^s K_{1-s}(z)
    out.derivative = -cs * sl * zs * bessel_k(1.0 - s, z);
    return out;
}

ChiEval chi_profile(const FractionalParams& params, double lambda, double Y,
                    double y) {
    if (Y < 1.0) throw std::invalid_argument("chi_profile: Y >= 1 required");
    if (y < 0.0 || y > Y)
        throw std::invalid_argument("chi_profile: y must lie in [0,Y]");
    const double sl = std::sqrt(lambda);
    ChiEval out;
    if (sl * Y > 350.0) {
        // Shift below double precision: identical to the infinite profile.
        const ProfileEval p = psi_profile(params, lambda, y);
        out.value = p.value;
        out.derivative = p.derivative;
        out.e_ks = 0.0;
        return out;
    }
    const double s = params.s;
    const double z = sl * y;
    if (std::abs(s - 0.5) < 1e-12) {
        const double denom = std::sinh(sl * Y);
        out.value = std::sinh(sl * (Y - y)) / denom;
        out.derivative = -sl * std::cosh(sl * (Y - y)) / denom;
        // e_ks = -e^{-a}/sinh(a) at s = 1/2 (a = sqrt(lambda) Y)
        out.e_ks = -std::exp(-sl * Y) / denom;
        return out;
    }
    const double cs = std::pow(2.0, 1.0 - s) / gamma_fn(s);
    const double a = sl * Y;
    const double bs = -cs * bessel_k(s, a) / bessel_i(s, a);
    out.e_ks = std::pow(2.0, 1.0 - s) * bs / gamma_fn(s);
    if (y == 0.0) {
        out.value = 1.0;
        out.derivative = (s > 0.5)
                             ? 0.0
                             : std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double zs = std::pow(z, s);
    out.value = zs * (cs * bessel_k(s, z) + bs * detail::bessel_i_any(s, z));
    // d/dz (z^s K_s) = -z^s K_{1-s};  d/dz (z^s I_s) = z^s I_{s-1}
    out.derivative =
        sl * zs *
        (-cs * bessel_k(1.0 - s, z) + bs * detail::bessel_i_any(s - 1.0, z));
    return out;
}

ModeSolution make_mode_solution(const SpectralMode& mode,
                                const FractionalParams& params,
                                std::optional<double> truncation_Y) {
    ModeSolution ms;
    ms.mode = mode;
    const double base = std::pow(mode.lambda, params.s);
    if (!truncation_Y) {
        ms.effective_rate = base;
        return ms;
    }
    const ChiEval chi = chi_profile(params, mode.lambda, *truncation_Y, 0.0);
    ms.effective_rate = base * (1.0 - chi.e_ks / params.d_s);
    return ms;
}

double duhamel_convolution(double mu, double gamma, const TimeProfile& f,
                           double t, double tol) {
    if (f.is_zero() || t == 0.0) return 0.0;
    const auto kernel = [&](double r) -> double {
        if (gamma == 1.0) return std::exp(-mu * r) * f(t - r, gamma);
        return std::pow(r, gamma - 1.0) *
               mittag_leffler(gamma, gamma, -mu * std::pow(r, gamma)) *
               f(t - r, gamma);
    };
    const int npts = 32;
    const QuadratureRule gl = gauss_legendre(npts);
    const QuadratureRule gj = gauss_jacobi(npts, 0.0, gamma - 1.0);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int depth = 4; depth <= 48; depth += 4) {
        double acc = 0.0;
        // [0, t/2]: dyadic toward r=0, innermost panel absorbs r^{gamma-1}
        double left = 0.5 * t;
        for (int l = 0; l < depth; ++l) {
            acc += integrate_mapped(gl, 0.5 * left, left, kernel);
            left *= 0.5;
        }
        if (gamma == 1.0) {
            acc += integrate_mapped(gl, 0.0, left, kernel);
        } else {
            acc += integrate_weighted_origin(
                gj, gamma - 1.0, left, [&](double r) {
                    return mittag_leffler(gamma, gamma,
                                          -mu * std::pow(r, gamma)) *
                           f(t - r, gamma);
                });
        }
        // [t/2, t]: dyadic toward r=t (f(t-r) may have a kink there)
        double right = 0.5 * t;
        for (int l = 0; l <= depth; ++l) {
            const double hi = (l == depth) ? t : 0.5 * (right + t);
            acc += integrate_mapped(gl, right, hi, kernel);
            right = hi;
        }
        if (!std::isnan(prev) && std::abs(acc - prev) < tol) return acc;
        prev = acc;
    }
    throw std::runtime_error("duhamel_convolution: failed to converge");
}

double mode_solution_u(const ModeSolution& ms, const FractionalParams& params,
                       double t, double tol) {
    if (t < 0.0) throw std::invalid_argument("mode_solution_u: t >= 0");
    const double mu = ms.effective_rate;
    const double gamma = params.gamma;
    double hom;
    if (t == 0.0) return ms.mode.u0;
    if (gamma == 1.0) {
        hom = std::exp(-mu * t) * ms.mode.u0;
    } else {
        hom = mittag_leffler(gamma, 1.0, -mu * std::pow(t, gamma)) *
              ms.mode.u0;
    }
    return hom + duhamel_convolution(mu, gamma, ms.mode.f, t, tol);
}

SpectralOracle::SpectralOracle(SpectralData data,
                               std::optional<double> truncation_Y)
    : data_(std::move(data)), Y_(truncation_Y) {
    for (const SpectralMode& m : data_.modes)
        solutions_.push_back(make_mode_solution(m, data_.params, Y_));
}

OracleEval SpectralOracle::evaluate(double x, double y, double t) const {
    OracleEval out;
    const FractionalParams& p = data_.params;
    for (std::size_t i = 0; i < solutions_.size(); ++i) {
        const SpectralMode& m = data_.modes[i];
        const double uk = mode_value(i, t);
        const double phi = eigenfunction_value(m.k, x, p);
        const double dphi = eigenfunction_derivative(m.k, x, p);
        double prof, dprof;
        if (Y_) {
            const ChiEval c = chi_profile(p, m.lambda, *Y_, y);
            prof = c.value;
            dprof = c.derivative;
        } else {
            const ProfileEval e = psi_profile(p, m.lambda, y);
            prof = e.value;
            dprof = e.derivative;
        }
        out.v += uk * phi * prof;
        out.grad_x += uk * dphi * prof;
        out.grad_y += uk * phi * dprof;
    }
    return out;
}

double SpectralOracle::trace_value(double x, double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < solutions_.size(); ++i)
        acc += mode_value(i, t) *
               eigenfunction_value(data_.modes[i].k, x, data_.params);
    return acc;
}

double SpectralOracle::mode_value(std::size_t i, double t) const {
    return mode_solution_u(solutions_[i], data_.params, t);
}

double SpectralOracle::effective_rate(std::size_t i) const {
    return solutions_[i].effective_rate;
}

OracleEval oracle_evaluate(const SpectralData& data, double x, double y,
                           double t, std::optional<double> truncation_Y) {
    return SpectralOracle(data, truncation_Y).evaluate(x, y, t);
}

double hs_norm(std::span<const std::pair<int, double>> coeffs, double s_signed,
               const SpectralData& data) {
    double acc = 0.0;
    for (const auto& [k, w] : coeffs) {
        double lambda = -1.0;
        for (const SpectralMode& m : data.modes)
            if (m.k == k) lambda = m.lambda;
        if (lambda <= 0.0)
            throw std::invalid_argument("hs_norm: mode not present in data");
        acc += std::pow(lambda, s_signed) * w * w;
    }
    return std::sqrt(acc);
}

double energy_identity_residual(const FractionalParams& params, double lambda,
                                double a, double b) {
    if (a == b) return 0.0;
    if (a <= 0.0 || a > b)
        throw std::invalid_argument("energy_identity_residual: 0 < a < b");
    const double alpha = params.alpha;
    const auto integrand = [&](double y) {
        const ProfileEval p = psi_profile(params, lambda, y);
        return std::pow(y, alpha) *
               (lambda * p.value * p.value + p.derivative * p.derivative);
    };
    const double integral = adaptive_gauss(integrand, a, b, 1e-12, 20);
    const ProfileEval pa = psi_profile(params, lambda, a);
    const ProfileEval pb = psi_profile(params, lambda, b);
    const double boundary = std::pow(b, alpha) * pb.value * pb.derivative -
                            std::pow(a, alpha) * pa.value * pa.derivative;
    return std::abs(integral - boundary);
}

}  // namespace fracheat
