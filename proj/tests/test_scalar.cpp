#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracheat/caputo.hpp"
#include "fracheat/quadrature.hpp"
#include "fracheat/specfun.hpp"
#include "test_oracles.hpp"

#include <cmath>
#include <random>

using namespace fracheat;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1") {
    const QuadratureRule r = gauss_legendre(5);
    double acc = 0.0;  // int_{-1}^{1} x^8 dx = 2/9
    for (std::size_t i = 0; i < r.size(); ++i)
        acc += r.weights[i] * std::pow(r.nodes[i], 8);
    CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    double odd = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        odd += r.weights[i] * std::pow(r.nodes[i], 9);
    CHECK(std::abs(odd) < 1e-14);
}

TEST_CASE("gauss-jacobi reproduces weighted monomial moments") {
    // int_{-1}^1 (1+x)^b x^k dx = sum_i C(k,i)(-1)^{k-i} 2^{b+i+1}/(b+i+1)
    // by the binomial expansion x^k = ((1+x)-1)^k; exact reference.
    for (const double b : {-0.5, -0.2, 0.4}) {
        const QuadratureRule r = gauss_jacobi(8, 0.0, b);
        for (int k = 0; k <= 5; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i)
                acc += r.weights[i] * std::pow(r.nodes[i], k);
            double ref = 0.0;
            double binom = 1.0;
            for (int i = 0; i <= k; ++i) {
                const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
                ref += sign * binom * std::pow(2.0, b + i + 1.0) /
                       (b + i + 1.0);
                binom = binom * (k - i) / (i + 1.0);
            }
            CHECK(acc == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("weighted origin mapping integrates y^beta exactly") {
    const QuadratureRule r = gauss_jacobi(6, 0.0, -0.4);
    const double v = integrate_weighted_origin(r, -0.4, 0.7,
                                               [](double) { return 1.0; });
    CHECK(v == doctest::Approx(std::pow(0.7, 0.6) / 0.6).epsilon(1e-13));
}

TEST_CASE("gamma function: factorials, half-integers, reflection") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) ==
          doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(gamma_fn(1.5) ==
          doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
    // relative error <= 1e-13 across [-10, 50]
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-10.0, 50.0);
    for (int i = 0; i < 300; ++i) {
        double x = U(rng);
        if (std::abs(x - std::round(x)) < 1e-3 && x < 0.5) continue;
        const double ref = testoracle::gamma_oracle(x);
        CHECK(std::abs(gamma_fn(x) - ref) <= 1e-13 * std::abs(ref));
    }
}

TEST_CASE("reciprocal gamma vanishes at poles") {
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-4.0) == 0.0);
    CHECK(reciprocal_gamma(2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalization constant d_s") {
    CHECK(normalization_constant(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    const double d25 = std::pow(2.0, 0.5) * testoracle::gamma_oracle(0.75) /
                       testoracle::gamma_oracle(0.25);
    const double d75 = std::pow(2.0, -0.5) * testoracle::gamma_oracle(0.25) /
                       testoracle::gamma_oracle(0.75);
    CHECK(normalization_constant(0.25) == doctest::Approx(d25).epsilon(1e-12));
    CHECK(normalization_constant(0.75) == doctest::Approx(d75).epsilon(1e-12));
    CHECK_THROWS_AS(normalization_constant(1.0), std::domain_error);
}

TEST_CASE("mittag-leffler: exponential case and z=0") {
    CHECK(mittag_leffler(1.0, 1.0, -1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    for (const double g : {0.3, 0.5, 0.9, 1.0, 1.4})
        CHECK(mittag_leffler(g, 1.0, 0.0) == 1.0);
}

TEST_CASE("mittag-leffler gamma=1/2 matches the erfc identity") {
    // E_{1/2,1}(-x) = e^{x^2} erfc(x)
    for (const double x : {0.25, 1.0, 2.0}) {
        const double ref = std::exp(x * x) * testoracle::erfc_oracle(x);
        CHECK(mittag_leffler(0.5, 1.0, -x) ==
              doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("mittag-leffler satisfies the (1+|z|)^{-1} bound") {
    for (const double g : {0.3, 0.5, 0.7, 0.9})
        for (const double mu : {1.0, g})
            for (double z = 0.0; z >= -60.0; z -= 1.7) {
                const double v = mittag_leffler(g, mu, z);
                CHECK(std::abs(v) * (1.0 + std::abs(z)) < 4.0);
            }
}

TEST_CASE("mittag-leffler decay profile is monotone in (0,1]") {
    for (const double g : {0.3, 0.6, 0.9}) {
        double prev = 1.0;
        for (double t = 0.05; t <= 5.0; t += 0.05) {
            const double v = mittag_leffler(g, 1.0, -std::pow(t, g));
            CHECK(v < prev);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("mittag-leffler regime consistency at the crossovers") {
    // values straddling the series/quadrature and quadrature/asymptotic
    // radii must agree through the switch
    MLEvalConfig lo;
    lo.series_radius = 1.0;  // force quadrature at |z|=3
    for (const double g : {0.4, 0.7}) {
        const double a = mittag_leffler(g, 1.0, -3.0);
        const double b = mittag_leffler(g, 1.0, -3.0, lo);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
    MLEvalConfig hi;
    hi.asymptotic_radius = 1e9;  // force quadrature at |z|=20
    for (const double g : {0.4, 0.7}) {
        const double a = mittag_leffler(g, g, -20.0);
        const double b = mittag_leffler(g, g, -20.0, hi);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("mittag-leffler rejects invalid arguments") {
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler(2.5, 1.0, -1.0), std::domain_error);
}

TEST_CASE("bessel half-order closed forms") {
    for (const double z : {0.1, 1.0, 2.0, 8.0, 30.0}) {
        const double k_ref = std::sqrt(kPi / (2.0 * z)) * std::exp(-z);
        const double i_ref = std::sqrt(2.0 / (kPi * z)) * std::sinh(z);
        CHECK(bessel_k(0.5, z) == doctest::Approx(k_ref).epsilon(1e-12));
        CHECK(bessel_i(0.5, z) == doctest::Approx(i_ref).epsilon(1e-12));
    }
    CHECK(bessel_k(0.5, 2.0) ==
          doctest::Approx(std::sqrt(kPi / 4.0) * std::exp(-2.0))
              .epsilon(1e-12));
    CHECK(bessel_i(0.5, 1.0) ==
          doctest::Approx(std::sqrt(2.0 / kPi) * std::sinh(1.0))
              .epsilon(1e-12));
}

TEST_CASE("bessel K matches the integral-representation oracle") {
    for (const double nu : {0.1, 0.3, 0.7, 0.9})
        for (const double z : {0.05, 0.5, 1.0, 3.0, 6.0, 12.0, 30.0}) {
            const double ref = testoracle::bessel_k_oracle(nu, z);
            CHECK(bessel_k(nu, z) == doctest::Approx(ref).epsilon(1e-10));
        }
}

TEST_CASE("bessel positivity and domain errors") {
    for (const double nu : {0.2, 0.5, 0.8})
        for (const double z : {1e-6, 1e-2, 1.0, 10.0, 50.0}) {
            CHECK(bessel_i(nu, z) > 0.0);
            CHECK(bessel_k(nu, z) > 0.0);
            CHECK(bessel_i(nu, z) * bessel_k(nu, z) > 0.0);
        }
    CHECK_THROWS_AS(bessel_k(0.3, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_i(0.3, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(1.5, 1.0), std::domain_error);
}

TEST_CASE("L1 weights: values, monotonicity, telescoping sum") {
    const L1Weights w = l1_weights(0.5, 8);
    CHECK(w.a[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.a[1] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(w.a[2] ==
          doctest::Approx(std::sqrt(3.0) - std::sqrt(2.0)).epsilon(1e-14));
    for (const double g : {0.2, 0.5, 0.8}) {
        const int K = 17;
        const L1Weights lw = l1_weights(g, K);
        double sum = 0.0;
        for (int j = 0; j < K; ++j) {
            CHECK(lw.a[j] > 0.0);
            if (j) CHECK(lw.a[j] < lw.a[j - 1]);
            sum += lw.a[j];
        }
        CHECK(sum ==
              doctest::Approx(std::pow(K, 1.0 - g)).epsilon(1e-12));
    }
    const L1Weights wk = l1_weights(0.5, make_time_grid(0.4, 4));
    CHECK(wk.kappa ==
          doctest::Approx(gamma_fn(1.5) * std::sqrt(0.1)).epsilon(1e-14));
}

TEST_CASE("discrete caputo derivative of the L1 scheme") {
    const TimeGrid grid = make_time_grid(0.1, 1);
    const L1Weights w = l1_weights(0.5, grid);
    // k=0, phi^0=1, phi^1=1 -> 0
    const std::vector<double> h0 = {1.0};
    CHECK(discrete_caputo(w, h0, 1.0) == doctest::Approx(0.0));
    // k=0, phi^0=1, phi^1=0 -> -1/(Gamma(1.5) sqrt(0.1))
    CHECK(discrete_caputo(w, h0, 0.0) ==
          doctest::Approx(-3.5682482323055422).epsilon(1e-13));
    // exactness on constants at every step
    const TimeGrid grid2 = make_time_grid(1.0, 12);
    const L1Weights w2 = l1_weights(0.7, grid2);
    std::vector<double> hist = {3.25};
    for (int k = 0; k < 12; ++k) {
        CHECK(std::abs(discrete_caputo(w2, hist, 3.25)) < 1e-12);
        hist.push_back(3.25);
    }
}

TEST_CASE("riemann-liouville integral of piecewise linears") {
    const TimeGrid grid = make_time_grid(1.0, 16);
    std::vector<double> ones(grid.K + 1, 1.0), ramp(grid.K + 1);
    for (int k = 0; k <= grid.K; ++k) ramp[k] = grid.node(k);
    for (const double sigma : {0.3, 0.5, 1.0, 1.7})
        for (const int m : {1, 7, 16}) {
            const double t = grid.node(m);
            CHECK(riemann_liouville_integral(sigma, grid, ones, m) ==
                  doctest::Approx(std::pow(t, sigma) /
                                  gamma_fn(sigma + 1.0))
                      .epsilon(1e-13));
        }
    CHECK(riemann_liouville_integral(1.0, grid, ramp, 16) ==
          doctest::Approx(0.5).epsilon(1e-13));
    // I^{1/2} t = t^{3/2}/Gamma(2.5); exact for the linear interpolant
    CHECK(riemann_liouville_integral(0.5, grid, ramp, 16) ==
          doctest::Approx(0.7522527780636750).epsilon(1e-13));
}

TEST_CASE("caputo quadrature: power rule and constants") {
    DifferentiableFn linear{[](double t) { return t; },
                            [](double) { return 1.0; }};
    for (const double g : {0.3, 0.5, 0.7}) {
        const double got = caputo_quadrature(linear, g, 1.0, 40);
        CHECK(got == doctest::Approx(1.0 / gamma_fn(2.0 - g)).epsilon(1e-9));
        // scaling in t
        const double t = 0.6;
        CHECK(caputo_quadrature(linear, g, t, 40) ==
              doctest::Approx(std::pow(t, 1.0 - g) / gamma_fn(2.0 - g))
                  .epsilon(1e-8));
    }
    DifferentiableFn constant{[](double) { return 2.0; },
                              [](double) { return 0.0; }};
    CHECK(std::abs(caputo_quadrature(constant, 0.5, 1.0, 20)) < 1e-14);
}

TEST_CASE("caputo quadrature reproduces the Mittag-Leffler eigenrelation") {
    const double g = 0.5, t = 1.0;
    DifferentiableFn fn{
        [g](double r) { return mittag_leffler(g, 1.0, -std::pow(r, g)); },
        [g](double r) {
            if (r == 0.0) return 0.0;
            return -std::pow(r, g - 1.0) *
                   mittag_leffler(g, g, -std::pow(r, g));
        }};
    const double lhs = caputo_quadrature(fn, g, t, 60);
    const double rhs = -mittag_leffler(g, 1.0, -1.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("diagonal step closed forms") {
    const TimeGrid grid = make_time_grid(0.1, 1);
    // gamma = 1: backward Euler
    {
        std::vector<std::vector<double>> hist = {{1.0}};
        const std::vector<double> rates = {1.0};
        const std::vector<double> loads = {0.0};
        const L1Weights none;
        const auto out = diagonal_step(none, grid, 1.0, rates, hist, loads);
        CHECK(out[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-14));
    }
    // gamma = 0.5: one L1 step
    {
        const L1Weights w = l1_weights(0.5, grid);
        std::vector<std::vector<double>> hist = {{1.0}};
        const std::vector<double> rates = {1.0};
        const std::vector<double> loads = {0.0};
        const auto out = diagonal_step(w, grid, 0.5, rates, hist, loads);
        CHECK(out[0] ==
              doctest::Approx(1.0 / (1.0 + w.kappa)).epsilon(1e-14));
        CHECK(out[0] == doctest::Approx(0.7810977098555541).epsilon(1e-12));
    }
    // mu = 0, f = 0: constant preserving over several steps
    {
        const TimeGrid g8 = make_time_grid(1.0, 8);
        const L1Weights w = l1_weights(0.3, g8);
        std::vector<std::vector<double>> hist = {{2.5}};
        const std::vector<double> rates = {0.0};
        const std::vector<double> loads = {0.0};
        for (int n = 0; n < 8; ++n) diagonal_step(w, g8, 0.3, rates, hist, loads);
        for (double v : hist[0]) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
    }
}

TEST_CASE("stability functional: trivial and single-mode cases") {
    const TimeGrid grid = make_time_grid(1.0, 8);
    std::vector<double> zero(grid.K + 1, 0.0);
    const StabilityFunctional z =
        stability_functional(0.5, grid, zero, zero, zero);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);

    // single mode mu=1, gamma=0.5, f=0, U0=1: rhs = 1/Gamma(1.5)
    const L1Weights w = l1_weights(0.5, grid);
    std::vector<std::vector<double>> hist = {{1.0}};
    const std::vector<double> rates = {1.0};
    const std::vector<double> loads = {0.0};
    for (int n = 0; n < grid.K; ++n)
        diagonal_step(w, grid, 0.5, rates, hist, loads);
    std::vector<double> h(grid.K + 1), v(grid.K + 1), f(grid.K + 1, 0.0);
    for (int k = 0; k <= grid.K; ++k) {
        h[k] = std::abs(hist[0][k]);
        v[k] = std::sqrt(rates[0]) * std::abs(hist[0][k]);
    }
    const StabilityFunctional s = stability_functional(0.5, grid, h, v, f);
    CHECK(s.rhs == doctest::Approx(1.1283791670955126).epsilon(1e-12));
    CHECK(s.lhs <= s.rhs * (1.0 + 1e-12));

    // gamma = 1 with the same data: max_k ||U^k||^2 <= 1
    std::vector<std::vector<double>> hist1 = {{1.0}};
    const L1Weights none;
    for (int n = 0; n < grid.K; ++n)
        diagonal_step(none, grid, 1.0, rates, hist1, loads);
    for (int k = 0; k <= grid.K; ++k) {
        h[k] = std::abs(hist1[0][k]);
        v[k] = std::abs(hist1[0][k]);
    }
    const StabilityFunctional s1 = stability_functional(1.0, grid, h, v, f);
    CHECK(s1.lhs <= s1.rhs * (1.0 + 1e-12));
    double mx = 0.0;
    for (int k = 1; k <= grid.K; ++k) mx = std::max(mx, h[k] * h[k]);
    CHECK(mx <= 1.0);
}

TEST_CASE("stability holds with constant one on a randomized suite") {
    std::mt19937_64 rng(998877);
    std::uniform_real_distribution<double> gdist(0.15, 1.0), mu(0.1, 40.0),
        amp(-2.0, 2.0);
    std::uniform_int_distribution<int> kdist(4, 64), nmodes(1, 5),
        fkind(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
        double g = gdist(rng);
        if (trial % 7 == 0) g = 1.0;
        const int K = kdist(rng);
        const TimeGrid grid = make_time_grid(1.0, K);
        L1Weights w;
        if (g < 1.0) w = l1_weights(g, grid);
        const int M = nmodes(rng);
        std::vector<double> rates(M);
        std::vector<std::vector<double>> hist(M);
        for (int m = 0; m < M; ++m) {
            rates[m] = mu(rng);
            hist[m] = {amp(rng)};
        }
        std::vector<double> famp(M);
        for (int m = 0; m < M; ++m)
            famp[m] = fkind(rng) == 0 ? 0.0 : amp(rng);
        std::vector<double> h(K + 1), v(K + 1), fn(K + 1, 0.0);
        for (int n = 0; n < K; ++n) {
            std::vector<double> loads(M);
            for (int m = 0; m < M; ++m)
                loads[m] = famp[m] * std::cos(3.0 * grid.node(n + 1) + m);
            diagonal_step(w, grid, g, rates, hist, loads);
            double fd = 0.0;
            for (int m = 0; m < M; ++m)
                fd += loads[m] * loads[m] / rates[m];
            fn[n + 1] = std::sqrt(fd);
        }
        for (int k = 0; k <= K; ++k) {
            double hh = 0.0, vv = 0.0;
            for (int m = 0; m < M; ++m) {
                hh += hist[m][k] * hist[m][k];
                vv += rates[m] * hist[m][k] * hist[m][k];
            }
            h[k] = std::sqrt(hh);
            v[k] = std::sqrt(vv);
        }
        const StabilityFunctional s = stability_functional(g, grid, h, v, fn);
        CHECK(s.lhs <= s.rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("semi-discrete convergence rates of the diagonal stepper") {
    // gamma = 0.5, mu = 1: fractional-integral error norm decays with
    // observed rate >= 0.4 as tau halves
    auto run_errors = [](double g, int K) {
        const TimeGrid grid = make_time_grid(1.0, K);
        L1Weights w;
        if (g < 1.0) w = l1_weights(g, grid);
        std::vector<std::vector<double>> hist = {{1.0}};
        const std::vector<double> rates = {1.0};
        const std::vector<double> loads = {0.0};
        for (int n = 0; n < K; ++n)
            diagonal_step(w, grid, g, rates, hist, loads);
        std::vector<double> err(K + 1);
        for (int k = 0; k <= K; ++k) {
            const double t = grid.node(k);
            const double exact =
                g == 1.0 ? std::exp(-t)
                         : mittag_leffler(g, 1.0, -std::pow(t, g));
            err[k] = std::abs(hist[0][k] - exact);
        }
        return std::pair{grid, err};
    };
    std::vector<std::pair<double, double>> pts;
    for (int K = 16; K <= 512; K *= 2) {
        auto [grid, err] = run_errors(0.5, K);
        std::vector<double> sq(err.size());
        for (std::size_t i = 0; i < err.size(); ++i) sq[i] = err[i] * err[i];
        const double norm = std::sqrt(
            riemann_liouville_integral(0.5, grid, sq, grid.K));
        pts.emplace_back(grid.tau, norm);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        num += std::log(pts[i - 1].second / pts[i].second);
        den += std::log(pts[i - 1].first / pts[i].first);
    }
    CHECK(num / den >= 0.4);

    // gamma = 1 smooth: linf rate 1 +- 0.1
    std::vector<std::pair<double, double>> pts1;
    for (int K = 16; K <= 512; K *= 2) {
        auto [grid, err] = run_errors(1.0, K);
        double mx = 0.0;
        for (double e : err) mx = std::max(mx, e);
        pts1.emplace_back(grid.tau, mx);
    }
    const double slope =
        std::log(pts1[pts1.size() - 2].second / pts1.back().second) /
        std::log(2.0);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("riemann-liouville continuity bound") {
    std::mt19937_64 rng(3141);
    std::uniform_real_distribution<double> sig(0.2, 1.8), c(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double sigma = sig(rng);
        const TimeGrid grid = make_time_grid(1.0, 64);
        std::vector<double> g(grid.K + 1);
        const double a = c(rng), b = c(rng);
        for (int k = 0; k <= grid.K; ++k)
            g[k] = a * std::sin(4.0 * grid.node(k)) + b;
        double gn = 0.0, in = 0.0;
        for (int k = 1; k <= grid.K; ++k) {
            gn += grid.tau * g[k] * g[k];
            const double ig = riemann_liouville_integral(sigma, grid, g, k);
            in += grid.tau * ig * ig;
        }
        const double bound =
            std::pow(1.0, sigma) / gamma_fn(sigma + 1.0) * std::sqrt(gn);
        CHECK(std::sqrt(in) <= bound * 1.02);
    }
}
