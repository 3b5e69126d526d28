#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fracheat {

/// Uniform time grid on [0,T] with K steps, nodes t_k = k*tau.
struct TimeGrid {
    double T = 1.0;
    int K = 1;
    double tau = 1.0;

    double node(int k) const { return k * tau; }
};

TimeGrid make_time_grid(double T, int K);

/// L1 weights a_j = (j+1)^{1-gamma} - j^{1-gamma}, j = 0..K-1, and the step
/// scale kappa = Gamma(2-gamma) tau^gamma. a_0 = 1, strictly decreasing,
/// sum = K^{1-gamma}.
struct L1Weights {
    double gamma = 0.5;
    std::vector<double> a;
    double kappa = 0.0;  // set when built from a TimeGrid
};

L1Weights l1_weights(double gamma, int K);
L1Weights l1_weights(double gamma, const TimeGrid& grid);

/// Discrete Caputo derivative delta^gamma phi^{k+1} of the L1 scheme:
///   (1/kappa) [ phi^{k+1} - sum_{j=0}^{k-1} (a_j - a_{j+1}) phi^{k-j}
///               - a_k phi^0 ],
/// where history holds phi^0..phi^k. Exact on constant sequences.
double discrete_caputo(const L1Weights& weights,
                       std::span<const double> history, double new_value);

/// Riemann-Liouville integral I^sigma of the piecewise-linear interpolant of
/// grid samples, evaluated at node t_m: exact per-panel moment integrals of
/// the kernel (t-r)^{sigma-1}/Gamma(sigma). Reduces to the trapezoid rule
/// for sigma = 1.
double riemann_liouville_integral(double sigma, const TimeGrid& grid,
                                  std::span<const double> samples, int m);

/// A scalar function together with its derivative, for quadrature of the
/// continuous Caputo derivative.
struct DifferentiableFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// Caputo derivative (1/Gamma(1-gamma)) int_0^t (t-r)^{-gamma} g'(r) dr by
/// composite quadrature: Gauss-Jacobi panels absorb the (t-r)^{-gamma}
/// endpoint singularity at r=t and an r^{gamma-1} profile of g' at r=0;
/// dyadic panels refine toward both endpoints up to `refinement` levels.
/// Throws std::runtime_error if successive refinements fail to settle.
double caputo_quadrature(const DifferentiableFn& g, double gamma, double t,
                         int refinement);

/// One implicit step of the diagonal semi-discrete scheme
///   delta^gamma U^{n+1} + mu U^{n+1} = f^{n+1}
/// per mode, in closed form. For gamma = 1 pass empty weights; the step is
/// backward Euler (U^n + tau f)/(1 + tau mu). Appends U^{n+1} to each
/// history and returns the new values.
std::vector<double> diagonal_step(const L1Weights& weights,
                                  const TimeGrid& grid, double gamma,
                                  std::span<const double> rates,
                                  std::vector<std::vector<double>>& histories,
                                  std::span<const double> loads);

/// Discrete stability functional of the L1 / backward Euler schemes.
/// h_norms[k] = ||U^k||_H for k=0..K, v_norms[k] = ||U^k||_V and
/// f_norms[k] = ||f^k||_{V'} for k=1..K (index 0 ignored).
///
/// gamma < 1 (normwise-exact, constant one):
///   lhs = (tau^{1-gamma}/Gamma(2-gamma)) sum_j a_j ||U^{K-j}||_H^2
///         + sum_k tau ||U^k||_V^2
///   rhs = T^{1-gamma} ||U^0||_H^2 / Gamma(2-gamma) + sum_k tau ||f^k||_{V'}^2
///
/// gamma = 1: the constant-one inequality is the telescoped per-step bound;
/// lhs takes the largest partial sum
///   max_m [ ||U^m||_H^2 + sum_{k<=m} tau(||U^k||_V^2 - ||f^k||_{V'}^2) ]
/// shifted by the total load term, against rhs = ||U^0||_H^2 + load term.
/// (The a_j weights degenerate to a_0 = 1 as gamma -> 1, so the fractional
/// lhs tends to ||U^K||^2 + energy, which the max dominates.)
struct StabilityFunctional {
    double lhs = 0.0;
    double rhs = 0.0;
};

StabilityFunctional stability_functional(double gamma, const TimeGrid& grid,
                                         std::span<const double> h_norms,
                                         std::span<const double> v_norms,
                                         std::span<const double> f_norms);

}  // namespace fracheat
