#include "fracheat/check.hpp"
#include "fracheat/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace fracheat;

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    return f;
}

std::string resolve_out(const std::string& cli_out,
                        const ExperimentConfig& config,
                        const std::string& fallback) {
    if (!cli_out.empty()) return cli_out;
    if (!config.out_path.empty()) return config.out_path;
    return fallback;
}

int cmd_solve(const std::string& config_path, const std::string& out,
              bool verbose) {
    const ExperimentConfig config = load_experiment(config_path);
    const SpectralData data =
        make_spectral_data(config.params, config.mode_u0, config.mode_f);
    const int M = config.sweep.M;
    const int Mx = config.sweep.Mx > 0 ? config.sweep.Mx : M;
    const double mu = config.sweep.grading > 0.0
                          ? config.sweep.grading
                          : default_grading(config.params.alpha);
    const GradedTensorMesh mesh =
        make_graded_mesh(Mx, M, mu, config.sweep.Y, config.params);
    const TimeGrid grid = make_time_grid(config.T, config.sweep.K);
    DiscreteProblem problem =
        make_problem(config.params, mesh, grid, data);
    const Trajectory traj = run(problem);
    const std::string path = resolve_out(out, config, "trajectory.csv");
    std::ofstream f = open_out(path);
    write_trajectory_csv(f, problem, traj);
    if (verbose)
        std::cout << "wrote " << path << " (" << grid.K + 1 << " steps, "
                  << mesh.free_dofs() << " DOFs, stability lhs/rhs = "
                  << traj.stability.lhs << "/" << traj.stability.rhs << ")\n";
    if (traj.stability.lhs > traj.stability.rhs * (1.0 + 1e-10)) {
        std::cerr << "stability functional violated\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out,
              SweepKind kind, bool verbose) {
    const ExperimentConfig config = load_experiment(config_path);
    RateReport report;
    const char* fallback = "report.csv";
    switch (kind) {
        case SweepKind::time:
            report = run_time_sweep(config);
            fallback = "sweep_time.csv";
            break;
        case SweepKind::space:
            report = run_space_sweep(config);
            fallback = "sweep_space.csv";
            break;
        case SweepKind::trunc:
            report = run_truncation_sweep(config);
            fallback = "sweep_trunc.csv";
            break;
    }
    const std::string path = resolve_out(out, config, fallback);
    std::ofstream f = open_out(path);
    write_report_csv(f, report);
    if (verbose) {
        std::cout << "wrote " << path << "\n";
        for (const auto& [name, v] : report.slopes)
            std::cout << "  slope " << name << " = " << v << "\n";
    }
    if (!report.stability_ok) {
        std::cerr << "stability functional violated during sweep\n";
        return 1;
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out,
               bool verbose) {
    const ParsedConfig raw = parse_config_file(config_path);
    const ExperimentConfig config = experiment_from_config(raw);
    const SpectralData data =
        make_spectral_data(config.params, config.mode_u0, config.mode_f);
    const int nx = raw.get_int_or("oracle", "nx", 17);
    const int ny = raw.get_int_or("oracle", "ny", 17);
    const double t = raw.get_num_or("oracle", "t", config.T);
    std::optional<double> Y;
    if (raw.get_bool_or("oracle", "truncated", false)) Y = config.sweep.Y;
    const double ymax = Y ? *Y : raw.get_num_or("oracle", "ymax", 2.0);
    const SpectralOracle oracle(data, Y);
    const std::string path = resolve_out(out, config, "oracle.csv");
    std::ofstream f = open_out(path);
    f << "x,y,t,v,grad_x,grad_y\n";
    char buf[256];
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            const double x = config.params.domain_length * i / nx;
            const double y = ymax * j / ny;
            const OracleEval e = oracle.evaluate(x, y, t);
            std::snprintf(buf, sizeof(buf),
                          "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", x, y, t,
                          e.v, e.grad_x, e.grad_y);
            f << buf;
        }
    if (verbose) std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_check(const std::string& config_path, bool verbose) {
    CheckConfig cfg;
    if (!config_path.empty())
        cfg = check_config_from(parse_config_file(config_path));
    const int failures = run_check(std::cout, cfg, verbose);
    if (failures > 0) {
        std::cerr << failures << " criterion(s) failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-time fractional heat solver and verification harness"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    bool verbose = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "config file");
        if (config_required) opt->required();
        sub->add_option("--out", out_path, "output CSV path");
        sub->add_flag("--verbose,-v", verbose, "print progress details");
    };
    add_common(app.add_subcommand("solve", "single run, trajectory CSV"),
               true);
    add_common(app.add_subcommand("sweep-time", "temporal convergence sweep"),
               true);
    add_common(app.add_subcommand("sweep-space", "spatial convergence sweep"),
               true);
    add_common(app.add_subcommand("sweep-trunc", "truncation sweep"), true);
    add_common(app.add_subcommand("oracle", "sample the exact solution"),
               true);
    add_common(app.add_subcommand("check", "run the verification suite"),
               false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("solve"))
            return cmd_solve(config_path, out_path, verbose);
        if (app.got_subcommand("sweep-time"))
            return cmd_sweep(config_path, out_path, SweepKind::time, verbose);
        if (app.got_subcommand("sweep-space"))
            return cmd_sweep(config_path, out_path, SweepKind::space, verbose);
        if (app.got_subcommand("sweep-trunc"))
            return cmd_sweep(config_path, out_path, SweepKind::trunc, verbose);
        if (app.got_subcommand("oracle"))
            return cmd_oracle(config_path, out_path, verbose);
        if (app.got_subcommand("check"))
            return cmd_check(config_path, verbose);
    } catch (const fracheat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
