#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracheat/harness.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace fracheat;

TEST_CASE("config parsing: sections, comments, repeated keys") {
    const std::string text = R"(
# comment
[params]
s = 0.5
gamma = 0.5   # trailing comment
T = 2.0

[modes]
mode = 1 1.0 zero
mode = 2 0.5 expdecay 1.0 2.0

[sweep]
type = time
values = 8 16 32
mode_space = true

[output]
path = out.csv
seed = 42
)";
    const ParsedConfig cfg = parse_config_text(text);
    const ExperimentConfig ec = experiment_from_config(cfg);
    CHECK(ec.params.s == 0.5);
    CHECK(ec.T == 2.0);
    CHECK(ec.mode_u0.size() == 2);
    CHECK(ec.mode_u0[1].first == 2);
    CHECK(ec.mode_f[1].kind == TimeProfile::Kind::exponential_decay);
    CHECK(ec.mode_f[1].c == 1.0);
    CHECK(ec.sweep.values.size() == 3);
    CHECK(ec.sweep.mode_space);
    CHECK(ec.out_path == "out.csv");
    CHECK(ec.seed == 42);
}

TEST_CASE("config errors carry context") {
    CHECK_THROWS_AS(parse_config_file("/no/such/config.cfg"), ConfigError);
    try {
        parse_config_file("/no/such/config.cfg");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/no/such/config.cfg") !=
              std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("key value\n"), ConfigError);
    CHECK_THROWS_AS(
        experiment_from_config(parse_config_text(
            "[params]\ns=0.5\ngamma=0.5\n[modes]\nmode = 1 1.0 wiggle\n")),
        ConfigError);
    CHECK_THROWS_AS(
        experiment_from_config(parse_config_text(
            "[params]\ns=0.5\ngamma=0.5\n[modes]\nmode = 1 1.0 zero\n"
            "[sweep]\nvalues = 8 4\n")),
        ConfigError);
}

TEST_CASE("fit_rate recovers exact and noisy slopes") {
    std::vector<std::pair<double, double>> lin;
    for (const double h : {0.1, 0.05, 0.025, 0.0125})
        lin.emplace_back(h, 3.0 * h);
    CHECK(fit_rate(lin, FitTransform::log_log) ==
          doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::pair<double, double>> expd;
    for (const double Y : {1.0, 2.0, 3.0, 4.0})
        expd.emplace_back(Y, 5.0 * std::exp(-2.0 * Y));
    CHECK(fit_rate(expd, FitTransform::log_linear) ==
          doctest::Approx(-2.0).epsilon(1e-12));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    std::vector<std::pair<double, double>> noisy;
    for (const double h : {0.5, 0.25, 0.125, 0.0625, 0.03125})
        noisy.emplace_back(h, std::pow(h, 0.5) * (1.0 + noise(rng)));
    CHECK(fit_rate(noisy, FitTransform::log_log) ==
          doctest::Approx(0.5).epsilon(0.02));

    std::vector<std::pair<double, double>> degenerate = {
        {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}};
    CHECK_THROWS_AS(fit_rate(degenerate, FitTransform::log_log),
                    std::invalid_argument);
}

TEST_CASE("report CSV is deterministic and carries slope rows") {
    RateReport rep;
    rep.columns = {"K", "err"};
    rep.rows = {{8.0, 0.5}, {16.0, 0.25}};
    rep.slopes = {{"err", -1.0}};
    rep.references = {{"err", -1.0}};
    std::ostringstream a, b;
    write_report_csv(a, rep);
    write_report_csv(b, rep);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("K,err\n") == 0);
    CHECK(a.str().find("slope,err,-1") != std::string::npos);
    CHECK(a.str().find("ref_slope,err,-1") != std::string::npos);
}

TEST_CASE("time sweep with zero data reports undefined slopes") {
    ExperimentConfig ec;
    ec.params = make_params(0.5, 0.5);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 0.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::time;
    ec.sweep.mode_space = true;
    ec.sweep.values = {8, 16, 32};
    const RateReport rep = run_time_sweep(ec);
    for (const auto& row : rep.rows) {
        CHECK(row[2] == 0.0);
        CHECK(row[3] == 0.0);
    }
    for (const auto& [name, v] : rep.slopes) CHECK(std::isnan(v));
}

TEST_CASE("golden first row of the shipped gamma=0.5 time sweep") {
    // frozen from the first vetted run of configs/time_g05.cfg
    ExperimentConfig ec;
    ec.params = make_params(0.5, 0.5);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 1.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::time;
    ec.sweep.mode_space = true;
    ec.sweep.values = {16, 32, 64, 128, 256, 512};
    const RateReport rep = run_time_sweep(ec);
    CHECK(rep.rows[0][2] == doctest::Approx(0.02248500676).epsilon(1e-9));
    CHECK(rep.rows[0][3] == doctest::Approx(0.0512977797067).epsilon(1e-9));
    CHECK(rep.slopes[0].second == doctest::Approx(0.796154405212).epsilon(1e-6));
    // deterministic CSV across repeated runs
    const RateReport rep2 = run_time_sweep(ec);
    std::ostringstream a, b;
    write_report_csv(a, rep);
    write_report_csv(b, rep2);
    CHECK(a.str() == b.str());
}

TEST_CASE("gamma=1 fractional-integral column degenerates to max-over-steps") {
    ExperimentConfig ec;
    ec.params = make_params(0.5, 1.0);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 1.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::time;
    ec.sweep.mode_space = true;
    ec.sweep.values = {8, 16, 32};
    const RateReport rep = run_time_sweep(ec);
    // recompute the linf error for the first K by hand
    const int K = 8;
    const TimeGrid grid = make_time_grid(1.0, K);
    std::vector<std::vector<double>> hist = {{1.0}};
    const std::vector<double> rates = {std::pow(eigenvalue(1, ec.params),
                                                ec.params.s)};
    const L1Weights none;
    const std::vector<double> loads = {0.0};
    double mx = 0.0;
    for (int n = 0; n < K; ++n)
        diagonal_step(none, grid, 1.0, rates, hist, loads);
    for (int k = 0; k <= K; ++k)
        mx = std::max(mx, std::abs(hist[0][k] -
                                   std::exp(-rates[0] * grid.node(k))));
    CHECK(rep.rows[0][2] == doctest::Approx(mx).epsilon(1e-12));
}

TEST_CASE("truncation sweep reports decaying oracle difference and shift") {
    ExperimentConfig ec;
    ec.params = make_params(0.5, 1.0);
    ec.T = 1.0;
    ec.mode_u0 = {{1, 1.0}};
    ec.mode_f = {TimeProfile{}};
    ec.sweep.kind = SweepKind::trunc;
    ec.sweep.values = {1.0, 1.5, 2.0};
    ec.sweep.K = 8;
    ec.sweep.M = 8;
    const RateReport rep = run_truncation_sweep(ec);
    CHECK(rep.rows.size() == 3);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i][1] < rep.rows[i - 1][1]);  // oracle diff decays
        CHECK(rep.rows[i][3] < rep.rows[i - 1][3]);  // mode shift decays
    }
    CHECK(rep.stability_ok);
}
