#include "fracheat/caputo.hpp"

#include "fracheat/quadrature.hpp"
#include "fracheat/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracheat {

TimeGrid make_time_grid(double T, int K) {
    if (T <= 0.0 || K < 1)
        throw std::invalid_argument("make_time_grid: need T > 0, K >= 1");
    return TimeGrid{T, K, T / K};
}

L1Weights l1_weights(double gamma, int K) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("l1_weights: gamma must be in (0,1)");
    if (K < 1) throw std::invalid_argument("l1_weights: K must be >= 1");
    L1Weights w;
    w.gamma = gamma;
    w.a.resize(K);
    const double e = 1.0 - gamma;
    for (int j = 0; j < K; ++j)
        w.a[j] = std::pow(j + 1.0, e) - std::pow(static_cast<double>(j), e);
    return w;
}

L1Weights l1_weights(double gamma, const TimeGrid& grid) {
    L1Weights w = l1_weights(gamma, grid.K);
    w.kappa = gamma_fn(2.0 - gamma) * std::pow(grid.tau, gamma);
    return w;
}

double discrete_caputo(const L1Weights& weights,
                       std::span<const double> history, double new_value) {
    if (history.empty())
        throw std::invalid_argument("discrete_caputo: empty history");
    if (weights.kappa <= 0.0)
        throw std::invalid_argument("discrete_caputo: weights lack kappa");
    const int k = static_cast<int>(history.size()) - 1;  // history = phi^0..phi^k
    double acc = new_value;
    for (int j = 0; j < k; ++j)
        acc -= (weights.a[j] - weights.a[j + 1]) * history[k - j];
    acc -= weights.a[k] * history[0];
    return acc / weights.kappa;
}

double riemann_liouville_integral(double sigma, const TimeGrid& grid,
                                  std::span<const double> samples, int m) {
    if (sigma <= 0.0)
        throw std::invalid_argument("riemann_liouville_integral: sigma > 0");
    if (m < 1 || m > grid.K)
        throw std::invalid_argument("riemann_liouville_integral: bad node");
    if (static_cast<int>(samples.size()) < m + 1)
        throw std::invalid_argument("riemann_liouville_integral: samples");
    const double tm = grid.node(m);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        // substitute u = tm - r on [t_j, t_{j+1}]; interpolant is p + q u
        const double u0 = tm - grid.node(j);
        const double u1 = tm - grid.node(j + 1);
        const double slope = (samples[j + 1] - samples[j]) / grid.tau;
        const double q = -slope;
        const double p = samples[j] + slope * u0;
        acc += p * (std::pow(u0, sigma) - std::pow(u1, sigma)) / sigma +
               q * (std::pow(u0, sigma + 1.0) - std::pow(u1, sigma + 1.0)) /
                   (sigma + 1.0);
    }
    return acc / gamma_fn(sigma);
}

namespace {

// Composite quadrature of int_0^t (t-r)^{-gamma} g'(r) dr with dyadic
// panels refined toward both endpoints; depth = number of dyadic levels.
double caputo_integral_at_depth(const DifferentiableFn& g, double gamma,
                                double t, int depth) {
    const int npts = 24;
    const QuadratureRule gl = gauss_legendre(npts);
    const QuadratureRule gj_upper = gauss_jacobi(npts, -gamma, 0.0);
    const QuadratureRule gj_lower = gauss_jacobi(npts, 0.0, gamma - 1.0);

    double acc = 0.0;
    const double mid = 0.5 * t;
    // Left half: panels [t 2^{-(l+1)}, t 2^{-l}] shrinking toward r=0; the
    // innermost panel integrates r^{gamma-1} * h(r) with h = g' r^{1-gamma}
    // by a Jacobi rule, which is exact when g' has the profile of the
    // fractional kernel.
    double left = mid;
    for (int l = 0; l < depth; ++l) {
        const double lo = 0.5 * left;
        acc += integrate_mapped(gl, lo, left, [&](double r) {
            return std::pow(t - r, -gamma) * g.derivative(r);
        });
        left = lo;
    }
    acc += integrate_weighted_origin(gj_lower, gamma - 1.0, left, [&](double r) {
        return std::pow(t - r, -gamma) * g.derivative(r) *
               std::pow(r, 1.0 - gamma);
    });
    // Right half: panels shrinking toward r=t; every panel adjacent to t
    // uses the Jacobi rule with weight (t-r)^{-gamma}.
    double right = mid;
    for (int l = 0; l < depth; ++l) {
        const double hi = 0.5 * (right + t);
        acc += integrate_mapped(gl, right, hi, [&](double r) {
            return std::pow(t - r, -gamma) * g.derivative(r);
        });
        right = hi;
    }
    acc += integrate_weighted_upper(gj_upper, -gamma, right, t,
                                    [&](double r) { return g.derivative(r); });
    return acc;
}

}  // namespace

double caputo_quadrature(const DifferentiableFn& g, double gamma, double t,
                         int refinement) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("caputo_quadrature: gamma in (0,1)");
    if (t <= 0.0) throw std::invalid_argument("caputo_quadrature: t > 0");
    const double scale = 1.0 / gamma_fn(1.0 - gamma);
    double prev = std::numeric_limits<double>::quiet_NaN();
    double best = 0.0;
    double diff = std::numeric_limits<double>::max();
    for (int depth = 4; depth <= std::max(refinement, 5); depth += 4) {
        const double val = scale * caputo_integral_at_depth(g, gamma, t, depth);
        if (!std::isnan(prev)) {
            diff = std::abs(val - prev);
            best = val;
            if (diff < 1e-10 * std::max(1.0, std::abs(val))) return val;
        }
        prev = val;
        best = val;
    }
    if (diff > 1e-5 * std::max(1.0, std::abs(best)))
        throw std::runtime_error("caputo_quadrature: refinements disagree");
    return best;
}

std::vector<double> diagonal_step(const L1Weights& weights,
                                  const TimeGrid& grid, double gamma,
                                  std::span<const double> rates,
                                  std::vector<std::vector<double>>& histories,
                                  std::span<const double> loads) {
    const std::size_t n_modes = rates.size();
    if (histories.size() != n_modes || loads.size() != n_modes)
        throw std::invalid_argument("diagonal_step: size mismatch");
    std::vector<double> out(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m) {
        auto& hist = histories[m];
        if (hist.empty())
            throw std::invalid_argument("diagonal_step: empty history");
        double next;
        if (gamma == 1.0) {
            next = (hist.back() + grid.tau * loads[m]) /
                   (1.0 + grid.tau * rates[m]);
        } else {
            const int k = static_cast<int>(hist.size()) - 1;
            double hist_term = weights.a[k] * hist[0];
            for (int j = 0; j < k; ++j)
                hist_term += (weights.a[j] - weights.a[j + 1]) * hist[k - j];
            next = (hist_term + weights.kappa * loads[m]) /
                   (1.0 + weights.kappa * rates[m]);
        }
        hist.push_back(next);
        out[m] = next;
    }
    return out;
}

StabilityFunctional stability_functional(double gamma, const TimeGrid& grid,
                                         std::span<const double> h_norms,
                                         std::span<const double> v_norms,
                                         std::span<const double> f_norms) {
    const int K = grid.K;
    if (static_cast<int>(h_norms.size()) != K + 1 ||
        static_cast<int>(v_norms.size()) != K + 1 ||
        static_cast<int>(f_norms.size()) != K + 1)
        throw std::invalid_argument("stability_functional: need K+1 norms");
    StabilityFunctional out;
    double load = 0.0;
    for (int k = 1; k <= K; ++k) load += grid.tau * f_norms[k] * f_norms[k];
    if (gamma == 1.0) {
        double partial = 0.0;
        double lhs = -std::numeric_limits<double>::max();
        for (int m = 1; m <= K; ++m) {
            partial += grid.tau *
                       (v_norms[m] * v_norms[m] - f_norms[m] * f_norms[m]);
            lhs = std::max(lhs, h_norms[m] * h_norms[m] + partial);
        }
        out.lhs = lhs + load;
        out.rhs = h_norms[0] * h_norms[0] + load;
        return out;
    }
    const L1Weights w = l1_weights(gamma, K);
    const double g2 = gamma_fn(2.0 - gamma);
    const double fac = std::pow(grid.tau, 1.0 - gamma) / g2;
    double lhs = 0.0;
    for (int j = 0; j < K; ++j)
        lhs += w.a[j] * h_norms[K - j] * h_norms[K - j];
    lhs *= fac;
    for (int k = 1; k <= K; ++k) lhs += grid.tau * v_norms[k] * v_norms[k];
    out.lhs = lhs;
    out.rhs = std::pow(grid.T, 1.0 - gamma) * h_norms[0] * h_norms[0] / g2 +
              load;
    return out;
}

}  // namespace fracheat
