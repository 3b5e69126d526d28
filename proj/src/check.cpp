#include "fracheat/check.hpp"

#include "fracheat/harness.hpp"
#include "fracheat/quadrature.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace fracheat {

CheckConfig check_config_from(const ParsedConfig& cfg) {
    CheckConfig c;
    c.seed = static_cast<std::uint64_t>(
        cfg.get_num_or("check", "seed", static_cast<double>(c.seed)));
    c.stab_rel_slack =
        cfg.get_num_or("check", "stab_rel_slack", c.stab_rel_slack);
    c.rate_time_frac_min =
        cfg.get_num_or("check", "rate_time_frac_min", c.rate_time_frac_min);
    c.rate_time_be = cfg.get_num_or("check", "rate_time_be", c.rate_time_be);
    c.rate_time_be_tol =
        cfg.get_num_or("check", "rate_time_be_tol", c.rate_time_be_tol);
    c.rate_space_energy =
        cfg.get_num_or("check", "rate_space_energy", c.rate_space_energy);
    c.rate_space_energy_tol = cfg.get_num_or("check", "rate_space_energy_tol",
                                             c.rate_space_energy_tol);
    c.rate_trace_tol =
        cfg.get_num_or("check", "rate_trace_tol", c.rate_trace_tol);
    c.trunc_factor_min =
        cfg.get_num_or("check", "trunc_factor_min", c.trunc_factor_min);
    c.ml_ode_tol = cfg.get_num_or("check", "ml_ode_tol", c.ml_ode_tol);
    c.bessel_energy_tol =
        cfg.get_num_or("check", "bessel_energy_tol", c.bessel_energy_tol);
    c.energy_norm_rel_tol =
        cfg.get_num_or("check", "energy_norm_rel_tol", c.energy_norm_rel_tol);
    c.caputo_power_tol =
        cfg.get_num_or("check", "caputo_power_tol", c.caputo_power_tol);
    c.isigma_slack = cfg.get_num_or("check", "isigma_slack", c.isigma_slack);
    c.assembly_cross_tol =
        cfg.get_num_or("check", "assembly_cross_tol", c.assembly_cross_tol);
    c.dense_step_tol =
        cfg.get_num_or("check", "dense_step_tol", c.dense_step_tol);
    return c;
}

namespace {

struct CriterionResult {
    bool pass = true;
    std::string detail;
};

using Criterion = std::function<CriterionResult(const CheckConfig&)>;

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// --- 1: stability with constant one over a randomized configuration suite

CriterionResult stability_suite(const CheckConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    const double gammas[] = {0.3, 0.5, 0.7, 1.0};
    const double ss[] = {0.3, 0.5, 0.7};
    const int Ks[] = {8, 64};
    const int Ms[] = {8, 16};
    std::uniform_int_distribution<int> pick4(0, 3), pick3(0, 2), pick2(0, 1);
    std::uniform_real_distribution<double> amp(-2.0, 2.0);
    double worst = 0.0;
    CriterionResult r;
    for (int trial = 0; trial < 20; ++trial) {
        const double gamma = gammas[pick4(rng)];
        const double s = ss[pick3(rng)];
        const int K = Ks[pick2(rng)];
        const int M = Ms[pick2(rng)];
        const FractionalParams p = make_params(s, gamma);
        std::vector<std::pair<int, double>> modes;
        const int nmodes = 1 + pick3(rng);
        for (int m = 0; m < nmodes; ++m) modes.emplace_back(m + 1, amp(rng));
        const SpectralData data = make_spectral_data(p, modes);
        const GradedTensorMesh mesh =
            make_graded_mesh(M, M, default_grading(p.alpha), 1.0, p);
        DiscreteProblem prob =
            make_problem(p, mesh, make_time_grid(1.0, K), data);
        const Trajectory traj = run(prob);
        const double ratio = traj.stability.rhs > 0.0
                                 ? traj.stability.lhs / traj.stability.rhs
                                 : (traj.stability.lhs > 0.0 ? 2.0 : 1.0);
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + cfg.stab_rel_slack) r.pass = false;
    }
    r.detail = fmt("worst lhs/rhs = %.12g over 20 configs", worst);
    return r;
}

// --- 2/3: temporal rates of the diagonal semi-discrete scheme

RateReport diagonal_time_sweep(double s, double gamma) {
    ExperimentConfig ec;
    ec.params = make_params(s, gamma);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 1.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::time;
    ec.sweep.mode_space = true;
    for (int K = 16; K <= 512; K *= 2)
        ec.sweep.values.push_back(static_cast<double>(K));
    return run_time_sweep(ec);
}

CriterionResult temporal_rate_fractional(const CheckConfig& cfg) {
    const RateReport rep = diagonal_time_sweep(0.5, 0.5);
    const double slope = rep.slopes.front().second;
    CriterionResult r;
    r.pass = slope >= cfg.rate_time_frac_min;
    r.detail = fmt("IL2 slope %.4g (required >= %.4g)", slope,
                   cfg.rate_time_frac_min);
    return r;
}

CriterionResult temporal_rate_backward_euler(const CheckConfig& cfg) {
    const RateReport rep = diagonal_time_sweep(0.5, 1.0);
    const double slope = rep.slopes.front().second;
    CriterionResult r;
    r.pass = std::abs(slope - cfg.rate_time_be) <= cfg.rate_time_be_tol;
    r.detail = fmt("linf slope %.4g (required %.3g +- %.3g)", slope,
                   cfg.rate_time_be, cfg.rate_time_be_tol);
    return r;
}

// --- 4: spatial energy rate of the fully discrete scheme

CriterionResult spatial_energy_rate(const CheckConfig& cfg) {
    CriterionResult r;
    std::ostringstream detail;
    for (const double s : {0.3, 0.5, 0.7}) {
        ExperimentConfig ec;
        ec.params = make_params(s, 1.0);
        ec.T = 1.0;
        ec.mode_u0 = {{1, 1.0}};
        ec.mode_f = {TimeProfile{}};
        ec.sweep.kind = SweepKind::space;
        ec.sweep.values = {8, 16, 32, 64};
        ec.sweep.K = 256;
        ec.sweep.Y = 1.0;
        ec.sweep.grading = 3.0 / (1.0 - ec.params.alpha) + 0.5;
        const RateReport rep = run_space_sweep(ec);
        double slope = 0.0;
        for (const auto& [name, v] : rep.slopes)
            if (name == "err_energy") slope = v;
        const bool ok = std::abs(slope - cfg.rate_space_energy) <=
                            cfg.rate_space_energy_tol &&
                        rep.stability_ok;
        if (!ok) r.pass = false;
        detail << fmt("s=%.1f slope %.4g ", s, slope);
    }
    r.detail = detail.str() +
               fmt("(required %.3g +- %.3g)", cfg.rate_space_energy,
                   cfg.rate_space_energy_tol);
    return r;
}

// --- 5: trace L2 duality rate of the elliptic projector

CriterionResult trace_duality_rate(const CheckConfig& cfg) {
    CriterionResult r;
    std::ostringstream detail;
    for (const double s : {0.3, 0.7}) {
        ExperimentConfig ec;
        ec.params = make_params(s, 1.0);
        ec.T = 1.0;
        ec.mode_u0 = {{1, 1.0}};
        ec.mode_f = {TimeProfile{}};
        ec.sweep.kind = SweepKind::space;
        ec.sweep.projector_only = true;
        ec.sweep.values = {8, 16, 32, 64};
        ec.sweep.Y = 1.0;
        const RateReport rep = run_space_sweep(ec);
        double slope = 0.0;
        for (const auto& [name, v] : rep.slopes)
            if (name == "err_trace_l2") slope = v;
        const double target = -(1.0 + s) / 2.0;
        if (std::abs(slope - target) > cfg.rate_trace_tol) r.pass = false;
        detail << fmt("s=%.1f slope %.4g (target %.3g) ", s, slope, target);
    }
    r.detail = detail.str() + fmt("tol +- %.3g", cfg.rate_trace_tol);
    return r;
}

// --- 6: exponential truncation decay

CriterionResult truncation_decay(const CheckConfig& cfg) {
    ExperimentConfig ec;
    ec.params = make_params(0.5, 1.0);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 1.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::trunc;
    ec.sweep.values = {1.0, 1.5, 2.0, 2.5, 3.0};
    ec.sweep.K = 64;
    ec.sweep.M = 16;
    const RateReport rep = run_truncation_sweep(ec);
    double slope = 0.0;
    for (const auto& [name, v] : rep.slopes)
        if (name == "err_oracle_trace") slope = v;
    const double lambda1 = eigenvalue(1, ec.params);
    const double required = cfg.trunc_factor_min * std::sqrt(lambda1) / 2.0;
    CriterionResult r;
    r.pass = -slope >= required && rep.stability_ok;
    r.detail = fmt("decay constant %.4g (required >= %.4g)", -slope, required);
    return r;
}

// --- 7: identity suite

CriterionResult identity_suite(const CheckConfig& cfg) {
    CriterionResult r;
    std::ostringstream detail;
    // Mittag-Leffler ODE identity: Caputo of E_{g,1}(-t^g) = -E_{g,1}(-t^g)
    double worst_ml = 0.0;
    for (const double g : {0.3, 0.5, 0.7})
        for (const double t : {0.25, 0.5, 1.0}) {
            DifferentiableFn fn;
            fn.value = [g](double r_) {
                return mittag_leffler(g, 1.0, -std::pow(r_, g));
            };
            fn.derivative = [g](double r_) {
                if (r_ == 0.0) return 0.0;
                return -std::pow(r_, g - 1.0) *
                       mittag_leffler(g, g, -std::pow(r_, g));
            };
            const double lhs = caputo_quadrature(fn, g, t, 60);
            const double rhs = -mittag_leffler(g, 1.0, -std::pow(t, g));
            worst_ml = std::max(worst_ml, std::abs(lhs - rhs));
        }
    if (worst_ml > cfg.ml_ode_tol) r.pass = false;
    detail << fmt("ML-ODE %.2e ", worst_ml);

    // Bessel energy identity
    double worst_be = 0.0;
    {
        const FractionalParams p05 = make_params(0.5, 1.0);
        const double lam1 = eigenvalue(1, p05);
        worst_be = std::max(worst_be,
                            energy_identity_residual(p05, lam1, 0.1, 2.0));
        const FractionalParams p03 = make_params(0.3, 1.0);
        worst_be = std::max(worst_be,
                            energy_identity_residual(p03, 1.0, 0.5, 1.0));
    }
    if (worst_be > cfg.bessel_energy_tol) r.pass = false;
    detail << fmt("Bessel-energy %.2e ", worst_be);

    // Single-mode energy-norm identity:
    // int_0^inf y^alpha (lambda psi^2 + psi'^2) dy = d_s lambda^s
    double worst_en = 0.0;
    for (const double s : {0.3, 0.5, 0.7}) {
        const FractionalParams p = make_params(s, 1.0);
        const double lam = eigenvalue(1, p);
        const double sl = std::sqrt(lam);
        const double y1 = 0.01 / sl;
        const QuadratureRule gj_a = gauss_jacobi(20, 0.0, p.alpha);
        const QuadratureRule gj_ma = gauss_jacobi(20, 0.0, -p.alpha);
        const double t1 = integrate_weighted_origin(
            gj_a, p.alpha, y1, [&](double y) {
                const ProfileEval e = psi_profile(p, lam, y);
                return lam * e.value * e.value;
            });
        const double t2 = integrate_weighted_origin(
            gj_ma, -p.alpha, y1, [&](double y) {
                const ProfileEval e = psi_profile(p, lam, y);
                const double w = std::pow(y, p.alpha) * e.derivative;
                return w * w;
            });
        const double tail = adaptive_gauss(
            [&](double y) {
                const ProfileEval e = psi_profile(p, lam, y);
                return std::pow(y, p.alpha) *
                       (lam * e.value * e.value +
                        e.derivative * e.derivative);
            },
            y1, 40.0 / sl, 1e-11, 24);
        const double total = t1 + t2 + tail;
        const double exact = p.d_s * std::pow(lam, p.s);
        worst_en = std::max(worst_en, std::abs(total - exact) / exact);
    }
    if (worst_en > cfg.energy_norm_rel_tol) r.pass = false;
    detail << fmt("energy-norm %.2e ", worst_en);

    // Caputo power rule: d^g t = t^{1-g}/Gamma(2-g)
    double worst_pr = 0.0;
    for (const double g : {0.3, 0.5, 0.7}) {
        DifferentiableFn fn;
        fn.value = [](double r_) { return r_; };
        fn.derivative = [](double) { return 1.0; };
        const double got = caputo_quadrature(fn, g, 1.0, 40);
        const double expect = 1.0 / gamma_fn(2.0 - g);
        worst_pr = std::max(worst_pr, std::abs(got - expect));
    }
    if (worst_pr > cfg.caputo_power_tol) r.pass = false;
    detail << fmt("power-rule %.2e ", worst_pr);

    // I^sigma continuity bound on random sampled functions
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> sig(0.1, 1.9), coef(-1.0, 1.0);
    bool isig_ok = true;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double sigma = sig(rng);
        const TimeGrid grid = make_time_grid(1.0, 64);
        std::vector<double> g(grid.K + 1);
        const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng);
        for (int k = 0; k <= grid.K; ++k) {
            const double t = grid.node(k);
            g[k] = a0 + a1 * std::sin(3.0 * t) + a2 * t * t;
        }
        double gnorm = 0.0, inorm = 0.0;
        for (int k = 1; k <= grid.K; ++k) {
            gnorm += grid.tau * g[k] * g[k];
            const double ig =
                riemann_liouville_integral(sigma, grid, g, k);
            inorm += grid.tau * ig * ig;
        }
        const double bound = std::pow(grid.T, sigma) /
                             gamma_fn(sigma + 1.0) * std::sqrt(gnorm);
        const double ratio = std::sqrt(inorm) / bound;
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio > 1.0 + cfg.isigma_slack) isig_ok = false;
    }
    if (!isig_ok) r.pass = false;
    detail << fmt("Isigma ratio %.4g", worst_ratio);
    r.detail = detail.str();
    return r;
}

// --- 8: oracle cross-validation of assembly and one time step

CriterionResult oracle_crossval(const CheckConfig& cfg) {
    CriterionResult r;
    std::ostringstream detail;
    std::mt19937_64 rng(cfg.seed + 13);
    std::uniform_real_distribution<double> spick(0.15, 0.85);

    // entries of the assembled weighted stiffness vs an independent
    // quadrature oracle (Jacobi rule on the singular layer, adaptive
    // Gauss-Legendre elsewhere)
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const double s = spick(rng);
        const FractionalParams p = make_params(s, 1.0, trial == 2 ? 0.7 : 0.0);
        const GradedTensorMesh mesh =
            make_graded_mesh(4, 5, default_grading(p.alpha), 1.3, p);
        const SparseOperator A = assemble_stiffness(mesh, p);
        std::uniform_int_distribution<int> xi(1, mesh.Mx - 1),
            yj(0, mesh.My - 1);
        for (int probe = 0; probe < 6; ++probe) {
            const int i = xi(rng), j = yj(rng);
            const int i2 = std::min(i + 1, mesh.Mx - 1);
            const int j2 = std::min(j + 1, mesh.My - 1);
            const int rdof = mesh.dof(i, j), cdof = mesh.dof(i2, j2);
            std::vector<double> er(mesh.free_dofs(), 0.0),
                ec(mesh.free_dofs(), 0.0);
            er[rdof] = 1.0;
            ec[cdof] = 1.0;
            // oracle quadrature of a_Y(W_r, W_c)
            double acc = 0.0;
            const QuadratureRule gj = gauss_jacobi(10, 0.0, p.alpha);
            for (int jj = 0; jj < mesh.My; ++jj)
                for (int ii = 0; ii < mesh.Mx; ++ii) {
                    const double xa = mesh.x_nodes[ii],
                                 xb = mesh.x_nodes[ii + 1];
                    const double ya = mesh.y_nodes[jj],
                                 yb = mesh.y_nodes[jj + 1];
                    const auto xline = [&](double y) {
                        return adaptive_gauss(
                            [&](double x) {
                                const PointEval a = evaluate_state(
                                    mesh, er, ii, jj, x, y);
                                const PointEval b = evaluate_state(
                                    mesh, ec, ii, jj, x, y);
                                return a.gx * b.gx + a.gy * b.gy +
                                       p.c_coeff * a.v * b.v;
                            },
                            xa, xb, 1e-14, 12);
                    };
                    if (jj == 0) {
                        acc += integrate_weighted_origin(gj, p.alpha, yb,
                                                         xline);
                    } else {
                        acc += adaptive_gauss(
                            [&](double y) {
                                return std::pow(y, p.alpha) * xline(y);
                            },
                            ya, yb, 1e-14, 16);
                    }
                }
            acc /= p.d_s;
            worst = std::max(worst,
                             std::abs(acc - A.matrix().coeff(rdof, cdof)));
        }
    }
    if (worst > cfg.assembly_cross_tol) r.pass = false;
    detail << fmt("assembly %.2e ", worst);

    // one full time step against a dense solve on a tiny problem
    {
        const FractionalParams p = make_params(0.4, 0.6);
        const GradedTensorMesh mesh =
            make_graded_mesh(4, 4, default_grading(p.alpha), 1.0, p);
        TimeProfile f;
        f.kind = TimeProfile::Kind::exponential_decay;
        f.c = 1.0;
        f.p = 2.0;
        const SpectralData data = make_spectral_data(p, {{1, 1.0}}, {f});
        DiscreteProblem prob =
            make_problem(p, mesh, make_time_grid(1.0, 4), data);
        Trajectory traj;
        traj.states.push_back(initialize(prob));
        traj.trace_history.push_back(std::vector<double>(
            traj.states[0].begin(),
            traj.states[0].begin() + mesh.trace_dofs()));
        const std::vector<double> got = step(prob, traj, 0);
        // dense route
        const int n = mesh.free_dofs();
        Eigen::MatrixXd S = Eigen::MatrixXd(prob.system.matrix());
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        const Eigen::MatrixXd Mtr = Eigen::MatrixXd(prob.trace_mass.matrix());
        Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) v0(i) = traj.states[0][i];
        rhs = prob.c_gamma * (Mtr * v0);
        const std::vector<double> sh = sine_hat_integrals(mesh, 1);
        const double fv = f(prob.grid.node(1), p.gamma) *
                          std::sqrt(2.0 / mesh.ell);
        for (int i = 0; i < mesh.trace_dofs(); ++i) rhs(i) += fv * sh[i];
        const Eigen::VectorXd dense = S.fullPivLu().solve(rhs);
        double worst_step = 0.0;
        for (int i = 0; i < n; ++i)
            worst_step = std::max(worst_step, std::abs(dense(i) - got[i]));
        if (worst_step > cfg.dense_step_tol) r.pass = false;
        detail << fmt("dense-step %.2e", worst_step);
    }
    r.detail = detail.str();
    return r;
}

}  // namespace

int run_check(std::ostream& os, const CheckConfig& cfg, bool verbose) {
    const std::pair<const char*, Criterion> criteria[] = {
        {"stability constant one (randomized suite)", stability_suite},
        {"temporal rate gamma=0.5 (L1 scheme)", temporal_rate_fractional},
        {"temporal rate gamma=1 (backward Euler)",
         temporal_rate_backward_euler},
        {"spatial energy rate (graded meshes)", spatial_energy_rate},
        {"trace L2 duality rate (elliptic projector)", trace_duality_rate},
        {"truncation decay", truncation_decay},
        {"identity suite", identity_suite},
        {"oracle cross-validation", oracle_crossval},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = fn(cfg);
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (!res.pass) ++failures;
        char line[640];
        std::snprintf(line, sizeof(line), "%s %d: %s — %s (%.1fs)\n",
                      res.pass ? "PASS" : "FAIL", index, name,
                      res.detail.c_str(), secs);
        os << line;
        (void)verbose;
    }
    return failures;
}

}  // namespace fracheat
