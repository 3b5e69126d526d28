#include "fracheat/harness.hpp"

#include "fracheat/caputo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace fracheat {

namespace {

TimeProfile parse_profile(std::istream& is, const std::string& origin) {
    std::string kind;
    if (!(is >> kind))
        throw ConfigError(origin + ": missing forcing profile kind");
    TimeProfile p;
    auto need = [&](double& slot) {
        if (!(is >> slot))
            throw ConfigError(origin + ": profile '" + kind +
                              "' needs numeric parameters");
    };
    if (kind == "zero") {
        p.kind = TimeProfile::Kind::zero;
    } else if (kind == "constant") {
        p.kind = TimeProfile::Kind::constant;
        need(p.c);
    } else if (kind == "power") {
        p.kind = TimeProfile::Kind::power;
        need(p.c);
        need(p.p);
    } else if (kind == "expdecay") {
        p.kind = TimeProfile::Kind::exponential_decay;
        need(p.c);
        need(p.p);
    } else if (kind == "mlmode") {
        p.kind = TimeProfile::Kind::mittag_leffler_mode;
        need(p.c);
        need(p.p);
    } else {
        throw ConfigError(origin + ": unknown profile kind '" + kind + "'");
    }
    return p;
}

double parse_grading(const ParsedConfig& cfg) {
    if (!cfg.has("sweep", "grading")) return 0.0;
    const std::string v = cfg.get("sweep", "grading");
    if (v == "auto") return 0.0;
    return cfg.get_num("sweep", "grading");
}

}  // namespace

ExperimentConfig experiment_from_config(const ParsedConfig& cfg) {
    ExperimentConfig ec;
    const double s = cfg.get_num("params", "s");
    const double gamma = cfg.get_num("params", "gamma");
    const double c = cfg.get_num_or("params", "c", 0.0);
    const double ell = cfg.get_num_or("params", "ell", 1.0);
    ec.params = make_params(s, gamma, c, ell);
    ec.T = cfg.get_num_or("params", "T", 1.0);

    for (const std::string& line : cfg.get_all("modes", "mode")) {
        std::istringstream is(line);
        int k;
        double u0;
        if (!(is >> k >> u0))
            throw ConfigError("mode line needs 'k u0 profile...': " + line);
        ec.mode_u0.emplace_back(k, u0);
        ec.mode_f.push_back(parse_profile(is, "mode " + std::to_string(k)));
    }
    if (ec.mode_u0.empty())
        throw ConfigError("config declares no modes");

    const std::string kind = cfg.get_or("sweep", "type", "time");
    if (kind == "time")
        ec.sweep.kind = SweepKind::time;
    else if (kind == "space")
        ec.sweep.kind = SweepKind::space;
    else if (kind == "trunc")
        ec.sweep.kind = SweepKind::trunc;
    else
        throw ConfigError("unknown sweep type '" + kind + "'");
    if (cfg.has("sweep", "values")) {
        ec.sweep.values = cfg.get_list("sweep", "values");
        for (std::size_t i = 1; i < ec.sweep.values.size(); ++i)
            if (ec.sweep.values[i] <= ec.sweep.values[i - 1])
                throw ConfigError("sweep values must be strictly increasing");
    }
    ec.sweep.K = cfg.get_int_or("sweep", "K", 256);
    ec.sweep.M = cfg.get_int_or("sweep", "M", 32);
    ec.sweep.Mx = cfg.get_int_or("sweep", "Mx", 0);
    ec.sweep.Y = cfg.get_num_or("sweep", "Y", 1.0);
    ec.sweep.grading = parse_grading(cfg);
    ec.sweep.mode_space = cfg.get_bool_or("sweep", "mode_space", false);
    ec.sweep.projector_only =
        cfg.get_bool_or("sweep", "projector_only", false);

    ec.out_path = cfg.get_or("output", "path", "");
    ec.seed = static_cast<std::uint64_t>(
        cfg.get_num_or("output", "seed", 1.0));
    return ec;
}

ExperimentConfig load_experiment(const std::string& path) {
    return experiment_from_config(parse_config_file(path));
}

double fit_rate(const std::vector<std::pair<double, double>>& pts,
                FitTransform transform) {
    if (pts.size() < 3)
        throw std::invalid_argument("fit_rate: need at least 3 points");
    const std::size_t n = 3;
    const std::size_t start = pts.size() - n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < pts.size(); ++i) {
        const auto& [knob, err] = pts[i];
        if (err <= 0.0 || knob <= 0.0)
            throw std::invalid_argument("fit_rate: degenerate data");
        const double x =
            (transform == FitTransform::log_log) ? std::log(knob) : knob;
        const double y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

void write_report_csv(std::ostream& os, const RateReport& report) {
    char buf[64];
    for (std::size_t c = 0; c < report.columns.size(); ++c)
        os << (c ? "," : "") << report.columns[c];
    os << "\n";
    for (const auto& row : report.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.12g", row[c]);
            os << (c ? "," : "") << buf;
        }
        os << "\n";
    }
    for (const auto& [name, v] : report.slopes) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        os << "slope," << name << "," << buf << "\n";
    }
    for (const auto& [name, v] : report.references) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        os << "ref_slope," << name << "," << buf << "\n";
    }
}

OracleTables make_oracle_tables(const GradedTensorMesh& mesh,
                                const FractionalParams& params,
                                const SpectralOracle& oracle, int nq) {
    OracleTables t;
    t.mesh = &mesh;
    t.tq = make_tensor_quadrature(mesh, params, nq);
    const std::size_t nmodes = oracle.data().modes.size();
    const std::size_t nxq = t.tq.xq.size();
    const std::size_t nyq = t.tq.yq.size();
    for (std::size_t m = 0; m < nmodes; ++m) {
        const SpectralMode& mode = oracle.data().modes[m];
        std::vector<double> phi(nxq), dphi(nxq), prof(nyq), dprof(nyq);
        for (std::size_t q = 0; q < nxq; ++q) {
            phi[q] = eigenfunction_value(mode.k, t.tq.xq[q], params);
            dphi[q] = eigenfunction_derivative(mode.k, t.tq.xq[q], params);
        }
        for (std::size_t q = 0; q < nyq; ++q) {
            if (oracle.truncation()) {
                const ChiEval c = chi_profile(params, mode.lambda,
                                              *oracle.truncation(),
                                              t.tq.yq[q]);
                prof[q] = c.value;
                dprof[q] = c.derivative;
            } else {
                const ProfileEval p =
                    psi_profile(params, mode.lambda, t.tq.yq[q]);
                prof[q] = p.value;
                dprof[q] = p.derivative;
            }
        }
        t.phi.push_back(std::move(phi));
        t.dphi.push_back(std::move(dphi));
        t.prof.push_back(std::move(prof));
        t.dprof.push_back(std::move(dprof));
    }
    return t;
}

double energy_error_tabulated(const GradedTensorMesh& mesh,
                              const FractionalParams& params,
                              const OracleTables& tables,
                              std::span<const double> state,
                              std::span<const double> mode_values) {
    const int nq = tables.tq.nq;
    const std::size_t nmodes = mode_values.size();
    double acc = 0.0;
    const double inv_ds = 1.0 / params.d_s;
    for (int j = 0; j < mesh.My; ++j)
        for (int yqi = tables.tq.y_begin(j); yqi < tables.tq.y_end(j);
             ++yqi) {
            const std::size_t yq = static_cast<std::size_t>(yqi);
            const double y = tables.tq.yq[yq];
            const double wy = tables.tq.wy[yq];
            for (int i = 0; i < mesh.Mx; ++i)
                for (int qx = 0; qx < nq; ++qx) {
                    const std::size_t xq =
                        static_cast<std::size_t>(i) * nq + qx;
                    const double x = tables.tq.xq[xq];
                    double v = 0, gx = 0, gy = 0;
                    for (std::size_t m = 0; m < nmodes; ++m) {
                        const double um = mode_values[m];
                        v += um * tables.phi[m][xq] * tables.prof[m][yq];
                        gx += um * tables.dphi[m][xq] * tables.prof[m][yq];
                        gy += um * tables.phi[m][xq] * tables.dprof[m][yq];
                    }
                    const PointEval s =
                        evaluate_state(mesh, state, i, j, x, y);
                    const double dx = s.gx - gx;
                    const double dy = s.gy - gy;
                    const double dv = s.v - v;
                    acc += tables.tq.wx[xq] * wy * inv_ds *
                           (dx * dx + dy * dy + params.c_coeff * dv * dv);
                }
        }
    return std::sqrt(std::max(0.0, acc));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GradedTensorMesh sweep_mesh(const ExperimentConfig& config, int M,
                            double Y) {
    const int Mx = config.sweep.Mx > 0 ? config.sweep.Mx : M;
    const double mu = config.sweep.grading > 0.0
                          ? config.sweep.grading
                          : default_grading(config.params.alpha);
    return make_graded_mesh(Mx, M, mu, Y, config.params);
}

SpectralData sweep_data(const ExperimentConfig& config) {
    return make_spectral_data(config.params, config.mode_u0, config.mode_f);
}

void push_slope(RateReport& report, const std::string& name,
                const std::vector<std::pair<double, double>>& pts,
                FitTransform transform) {
    double slope = kNaN;
    try {
        slope = fit_rate(pts, transform);
    } catch (const std::invalid_argument&) {
        // degenerate data (zero errors): slope stays undefined
    }
    report.slopes.emplace_back(name, slope);
}

// Trace L2 error sequence of a trajectory against the oracle, and the
// fractional-integral error norm [I^{1-gamma} ||e||^2 (T)]^{1/2}
// (max over steps for gamma = 1).
double fractional_error_norm(const TimeGrid& grid, double gamma,
                             const std::vector<double>& errors) {
    if (gamma == 1.0) {
        double mx = 0.0;
        for (double e : errors) mx = std::max(mx, e);
        return mx;
    }
    std::vector<double> sq(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) sq[i] = errors[i] * errors[i];
    const double v =
        riemann_liouville_integral(1.0 - gamma, grid, sq, grid.K);
    return std::sqrt(std::max(0.0, v));
}

RateReport time_sweep_mode_space(const ExperimentConfig& config) {
    RateReport report;
    report.columns = {"K", "tau", "err_IL2", "err_energy"};
    const SpectralData data = sweep_data(config);
    const SpectralOracle oracle(data, std::nullopt);
    const double gamma = config.params.gamma;
    std::vector<double> rates;
    for (std::size_t m = 0; m < data.modes.size(); ++m)
        rates.push_back(oracle.effective_rate(m));
    std::vector<std::pair<double, double>> il2_pts, en_pts;
    for (double Kd : config.sweep.values) {
        const int K = static_cast<int>(Kd);
        const TimeGrid grid = make_time_grid(config.T, K);
        L1Weights weights;
        if (gamma < 1.0) weights = l1_weights(gamma, grid);
        std::vector<std::vector<double>> hist(data.modes.size());
        for (std::size_t m = 0; m < data.modes.size(); ++m)
            hist[m] = {data.modes[m].u0};
        std::vector<double> errors(K + 1, 0.0);
        double energy_sq = 0.0;
        for (int n = 0; n < K; ++n) {
            std::vector<double> loads(data.modes.size());
            for (std::size_t m = 0; m < data.modes.size(); ++m)
                loads[m] = data.modes[m].f(grid.node(n + 1), gamma);
            diagonal_step(weights, grid, gamma, rates, hist, loads);
        }
        for (int k = 0; k <= K; ++k) {
            double l2 = 0.0, en = 0.0;
            for (std::size_t m = 0; m < data.modes.size(); ++m) {
                const double d =
                    hist[m][k] - oracle.mode_value(m, grid.node(k));
                l2 += d * d;
                en += rates[m] * d * d;
            }
            errors[k] = std::sqrt(l2);
            if (k >= 1) energy_sq += grid.tau * en;
        }
        const double il2 = fractional_error_norm(grid, gamma, errors);
        const double en = std::sqrt(energy_sq);
        report.rows.push_back({static_cast<double>(K), grid.tau, il2, en});
        il2_pts.emplace_back(grid.tau, il2);
        en_pts.emplace_back(grid.tau, en);
    }
    push_slope(report, "err_IL2", il2_pts, FitTransform::log_log);
    push_slope(report, "err_energy", en_pts, FitTransform::log_log);
    report.references.emplace_back("err_IL2", gamma == 1.0 ? 1.0 : 0.5);
    return report;
}

}  // namespace

RateReport run_time_sweep(const ExperimentConfig& config) {
    if (config.sweep.values.empty())
        throw ConfigError("sweep requires a values list");
    if (config.sweep.mode_space) return time_sweep_mode_space(config);
    RateReport report;
    report.columns = {"K", "tau", "err_IL2", "err_energy"};
    const SpectralData data = sweep_data(config);
    const GradedTensorMesh mesh =
        sweep_mesh(config, config.sweep.M, config.sweep.Y);
    const SpectralOracle oracle(data, config.sweep.Y);
    const FractionalParams& p = config.params;
    const OracleTables tables = make_oracle_tables(mesh, p, oracle);
    std::vector<std::pair<double, double>> il2_pts, en_pts;
    for (double Kd : config.sweep.values) {
        const int K = static_cast<int>(Kd);
        const TimeGrid grid = make_time_grid(config.T, K);
        DiscreteProblem problem = make_problem(p, mesh, grid, data);
        const Trajectory traj = run(problem);
        if (traj.stability.lhs > traj.stability.rhs * (1.0 + 1e-10))
            report.stability_ok = false;
        std::vector<double> errors(K + 1), mode_vals(data.modes.size());
        double energy_sq = 0.0;
        for (int k = 0; k <= K; ++k) {
            errors[k] =
                trace_l2_error(mesh, traj.states[k], oracle, grid.node(k));
            if (k >= 1) {
                for (std::size_t m = 0; m < mode_vals.size(); ++m)
                    mode_vals[m] = oracle.mode_value(m, grid.node(k));
                const double ee = energy_error_tabulated(
                    mesh, p, tables, traj.states[k], mode_vals);
                energy_sq += grid.tau * ee * ee;
            }
        }
        const double il2 = fractional_error_norm(grid, p.gamma, errors);
        const double en = std::sqrt(energy_sq);
        report.rows.push_back({static_cast<double>(K), grid.tau, il2, en});
        il2_pts.emplace_back(grid.tau, il2);
        en_pts.emplace_back(grid.tau, en);
    }
    push_slope(report, "err_IL2", il2_pts, FitTransform::log_log);
    push_slope(report, "err_energy", en_pts, FitTransform::log_log);
    report.references.emplace_back("err_IL2", p.gamma == 1.0 ? 1.0 : 0.5);
    return report;
}

namespace {

RateReport projector_sweep(const ExperimentConfig& config) {
    RateReport report;
    report.columns = {"M", "N", "err_trace_l2", "err_trace_hs", "err_energy"};
    const SpectralData data = sweep_data(config);
    const SpectralOracle oracle(data, config.sweep.Y);
    const FractionalParams& p = config.params;
    std::vector<std::pair<double, double>> en_pts, l2_pts, hs_pts;
    for (double Md : config.sweep.values) {
        const int M = static_cast<int>(Md);
        const GradedTensorMesh mesh = sweep_mesh(config, M, config.sweep.Y);
        const SparseOperator A = assemble_stiffness(mesh, p);
        const auto target = [&](double x, double y) -> PointEval {
            const OracleEval e = oracle.evaluate(x, y, 0.0);
            return PointEval{e.v, e.grad_x, e.grad_y};
        };
        const std::vector<double> G = elliptic_project(mesh, p, A, target);
        const double en = energy_error(mesh, p, G, target);
        const double l2 = trace_l2_error_full(mesh, G, oracle, 0.0);
        const double hs = trace_hs_error(mesh, G, oracle, 0.0, p.s);
        const double N = mesh.free_dofs();
        report.rows.push_back({static_cast<double>(M), N, l2, hs, en});
        en_pts.emplace_back(N, en);
        l2_pts.emplace_back(N, l2);
        hs_pts.emplace_back(N, hs);
    }
    push_slope(report, "err_trace_l2", l2_pts, FitTransform::log_log);
    push_slope(report, "err_trace_hs", hs_pts, FitTransform::log_log);
    push_slope(report, "err_energy", en_pts, FitTransform::log_log);
    report.references.emplace_back("err_trace_l2", -(1.0 + p.s) / 2.0);
    report.references.emplace_back("err_energy", -0.5);
    return report;
}

}  // namespace

RateReport run_space_sweep(const ExperimentConfig& config) {
    if (config.sweep.values.empty())
        throw ConfigError("sweep requires a values list");
    if (config.sweep.projector_only) return projector_sweep(config);
    RateReport report;
    report.columns = {"M",           "N",           "err_trace_l2",
                      "err_trace_hs", "err_energy", "err_IL2"};
    const SpectralData data = sweep_data(config);
    const SpectralOracle oracle(data, config.sweep.Y);
    const FractionalParams& p = config.params;
    const TimeGrid grid = make_time_grid(config.T, config.sweep.K);
    std::vector<std::pair<double, double>> en_pts, l2_pts, hs_pts, il2_pts;
    for (double Md : config.sweep.values) {
        const int M = static_cast<int>(Md);
        const GradedTensorMesh mesh = sweep_mesh(config, M, config.sweep.Y);
        const OracleTables tables = make_oracle_tables(mesh, p, oracle);
        DiscreteProblem problem = make_problem(p, mesh, grid, data);
        const Trajectory traj = run(problem);
        if (traj.stability.lhs > traj.stability.rhs * (1.0 + 1e-10))
            report.stability_ok = false;
        std::vector<double> errors(grid.K + 1),
            mode_vals(data.modes.size());
        double energy_sq = 0.0;
        for (int k = 0; k <= grid.K; ++k) {
            errors[k] =
                trace_l2_error(mesh, traj.states[k], oracle, grid.node(k));
            if (k >= 1) {
                for (std::size_t m = 0; m < mode_vals.size(); ++m)
                    mode_vals[m] = oracle.mode_value(m, grid.node(k));
                const double ee = energy_error_tabulated(
                    mesh, p, tables, traj.states[k], mode_vals);
                energy_sq += grid.tau * ee * ee;
            }
        }
        const double l2_T =
            trace_l2_error_full(mesh, traj.states[grid.K], oracle, config.T);
        const double hs_T =
            trace_hs_error(mesh, traj.states[grid.K], oracle, config.T, p.s);
        const double en = std::sqrt(energy_sq);
        const double il2 = fractional_error_norm(grid, p.gamma, errors);
        const double N = mesh.free_dofs();
        report.rows.push_back(
            {static_cast<double>(M), N, l2_T, hs_T, en, il2});
        en_pts.emplace_back(N, en);
        l2_pts.emplace_back(N, l2_T);
        hs_pts.emplace_back(N, hs_T);
        il2_pts.emplace_back(N, il2);
    }
    push_slope(report, "err_trace_l2", l2_pts, FitTransform::log_log);
    push_slope(report, "err_trace_hs", hs_pts, FitTransform::log_log);
    push_slope(report, "err_energy", en_pts, FitTransform::log_log);
    push_slope(report, "err_IL2", il2_pts, FitTransform::log_log);
    report.references.emplace_back("err_energy", -0.5);
    report.references.emplace_back("err_trace_l2", -(1.0 + p.s) / 2.0);
    return report;
}

RateReport run_truncation_sweep(const ExperimentConfig& config) {
    if (config.sweep.values.empty())
        throw ConfigError("sweep requires a values list");
    RateReport report;
    report.columns = {"Y", "err_oracle_trace", "err_solver_trace",
                      "mode_shift"};
    const SpectralData data = sweep_data(config);
    const SpectralOracle infinite(data, std::nullopt);
    const FractionalParams& p = config.params;
    const TimeGrid grid = make_time_grid(config.T, config.sweep.K);
    std::vector<std::pair<double, double>> oracle_pts, shift_pts;
    for (double Y : config.sweep.values) {
        const SpectralOracle truncated(data, Y);
        double diff_sq = 0.0;
        for (std::size_t m = 0; m < data.modes.size(); ++m) {
            const double d = truncated.mode_value(m, config.T) -
                             infinite.mode_value(m, config.T);
            diff_sq += d * d;
        }
        const double err_oracle = std::sqrt(diff_sq);
        const GradedTensorMesh mesh = sweep_mesh(config, config.sweep.M, Y);
        DiscreteProblem problem = make_problem(p, mesh, grid, data);
        const Trajectory traj = run(problem);
        if (traj.stability.lhs > traj.stability.rhs * (1.0 + 1e-10))
            report.stability_ok = false;
        const double err_solver =
            trace_l2_error(mesh, traj.states[grid.K], infinite, config.T);
        const ChiEval chi =
            chi_profile(p, data.modes.front().lambda, Y, 0.0);
        const double shift = std::abs(chi.e_ks) / p.d_s;
        report.rows.push_back({Y, err_oracle, err_solver, shift});
        oracle_pts.emplace_back(Y, err_oracle);
        shift_pts.emplace_back(Y, shift);
    }
    push_slope(report, "err_oracle_trace", oracle_pts,
               FitTransform::log_linear);
    push_slope(report, "mode_shift", shift_pts, FitTransform::log_linear);
    const double root_lambda1 = std::sqrt(data.modes.front().lambda);
    report.references.emplace_back("err_oracle_trace", -root_lambda1 / 2.0);
    report.references.emplace_back("mode_shift", -2.0 * root_lambda1);
    return report;
}

}  // namespace fracheat
