#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracheat/harness.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <sstream>

using namespace fracheat;

namespace {
constexpr double kPi = 3.14159265358979323846;

DiscreteProblem small_problem(double s, double gamma, int Mx, int My, int K,
                              double Y, const SpectralData& data) {
    const GradedTensorMesh mesh = make_graded_mesh(
        Mx, My, default_grading(data.params.alpha), Y, data.params);
    return make_problem(data.params, mesh, make_time_grid(1.0, K), data);
}
}  // namespace

TEST_CASE("initialize: zero data and nodal trace exactness") {
    const FractionalParams p = make_params(0.5, 0.5);
    {
        const SpectralData data = make_spectral_data(p, {{1, 0.0}});
        DiscreteProblem prob = small_problem(0.5, 0.5, 6, 4, 4, 1.0, data);
        for (double v : initialize(prob)) CHECK(v == 0.0);
    }
    {
        const SpectralData data = make_spectral_data(p, {{2, 1.3}});
        DiscreteProblem prob = small_problem(0.5, 0.5, 6, 4, 4, 1.0, data);
        const std::vector<double> V0 = initialize(prob);
        for (int i = 1; i < prob.mesh.Mx; ++i)
            CHECK(V0[prob.mesh.dof(i, 0)] ==
                  doctest::Approx(1.3 * eigenfunction_value(
                                            2, prob.mesh.x_nodes[i], p))
                      .epsilon(1e-13));
    }
}

TEST_CASE("initialize approximates the truncated profile under refinement") {
    const FractionalParams p = make_params(0.5, 1.0);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}});
    double prev = 1e9;
    for (const int M : {8, 16, 32}) {
        const GradedTensorMesh mesh = make_graded_mesh(M, M, 3.5, 1.0, p);
        DiscreteProblem prob =
            make_problem(p, mesh, make_time_grid(1.0, 1), data);
        const std::vector<double> V0 = initialize(prob);
        // compare at interior nodes against phi_1(x) chi_1(y)
        double worst = 0.0;
        for (int j = 1; j < mesh.My; j += 3)
            for (int i = 1; i < mesh.Mx; i += 3) {
                const double exact =
                    eigenfunction_value(1, mesh.x_nodes[i], p) *
                    chi_profile(p, eigenvalue(1, p), 1.0, mesh.y_nodes[j])
                        .value;
                worst = std::max(
                    worst, std::abs(V0[mesh.dof(i, j)] - exact));
            }
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("step: zero data stays zero; K=1 equals one step") {
    const FractionalParams p = make_params(0.3, 0.7);
    const SpectralData data = make_spectral_data(p, {{1, 0.0}});
    DiscreteProblem prob = small_problem(0.3, 0.7, 5, 4, 3, 1.0, data);
    const Trajectory traj = run(prob);
    for (const auto& st : traj.states)
        for (double v : st) CHECK(v == 0.0);

    const SpectralData data1 = make_spectral_data(p, {{1, 1.0}});
    DiscreteProblem prob1 = small_problem(0.3, 0.7, 5, 4, 1, 1.0, data1);
    const Trajectory t1 = run(prob1);
    Trajectory manual;
    manual.states.push_back(initialize(prob1));
    manual.trace_history.push_back(std::vector<double>(
        manual.states[0].begin(),
        manual.states[0].begin() + prob1.mesh.trace_dofs()));
    const std::vector<double> v1 = step(prob1, manual, 0);
    for (std::size_t i = 0; i < v1.size(); ++i)
        CHECK(v1[i] == t1.states[1][i]);
}

TEST_CASE("factorization reuse is bitwise-identical to fresh factorization") {
    const FractionalParams p = make_params(0.5, 0.5);
    TimeProfile f;
    f.kind = TimeProfile::Kind::constant;
    f.c = 0.4;
    const SpectralData data = make_spectral_data(p, {{1, 1.0}}, {f});
    DiscreteProblem reused = small_problem(0.5, 0.5, 6, 5, 3, 1.0, data);
    const Trajectory a = run(reused);
    // fresh problem (fresh factorization) per step
    Trajectory b;
    {
        DiscreteProblem fresh0 = small_problem(0.5, 0.5, 6, 5, 3, 1.0, data);
        b.states.push_back(initialize(fresh0));
        b.trace_history.push_back(std::vector<double>(
            b.states[0].begin(),
            b.states[0].begin() + fresh0.mesh.trace_dofs()));
        for (int n = 0; n < 3; ++n) {
            DiscreteProblem fresh =
                small_problem(0.5, 0.5, 6, 5, 3, 1.0, data);
            b.states.push_back(step(fresh, b, n));
            b.trace_history.push_back(std::vector<double>(
                b.states[n + 1].begin(),
                b.states[n + 1].begin() + fresh.mesh.trace_dofs()));
        }
    }
    for (int k = 0; k <= 3; ++k)
        for (std::size_t i = 0; i < a.states[k].size(); ++i)
            CHECK(a.states[k][i] == b.states[k][i]);  // bitwise
}

TEST_CASE("system matrix differs from stiffness only on trace rows/columns") {
    const FractionalParams p = make_params(0.4, 0.6);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}});
    DiscreteProblem prob = small_problem(0.4, 0.6, 6, 5, 4, 1.0, data);
    Eigen::SparseMatrix<double> diff =
        prob.system.matrix() - prob.stiffness.matrix();
    const int nt = prob.mesh.trace_dofs();
    for (int k = 0; k < diff.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
            if (std::abs(it.value()) > 1e-14) {
                CHECK(it.row() < nt);
                CHECK(it.col() < nt);
            }
}

TEST_CASE("trace extraction equals the first block of the state") {
    const FractionalParams p = make_params(0.5, 1.0);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}});
    DiscreteProblem prob = small_problem(0.5, 1.0, 6, 5, 5, 1.0, data);
    const Trajectory traj = run(prob);
    for (int k = 0; k <= 5; ++k)
        for (int i = 0; i < prob.mesh.trace_dofs(); ++i)
            CHECK(traj.trace_history[k][i] == traj.states[k][i]);
}

TEST_CASE("backward Euler trace norm is nonincreasing without forcing") {
    const FractionalParams p = make_params(0.5, 1.0);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}, {3, -0.5}});
    DiscreteProblem prob = small_problem(0.5, 1.0, 10, 8, 12, 1.0, data);
    const Trajectory traj = run(prob);
    for (std::size_t k = 1; k < traj.diagnostics.size(); ++k)
        CHECK(traj.diagnostics[k].trace_l2 <=
              traj.diagnostics[k - 1].trace_l2 * (1.0 + 1e-12));
}

TEST_CASE("stability functional with constant one on solver runs") {
    for (const double gamma : {0.4, 1.0})
        for (const double s : {0.3, 0.7}) {
            const FractionalParams p = make_params(s, gamma);
            const SpectralData data =
                make_spectral_data(p, {{1, 1.0}, {2, 0.6}});
            DiscreteProblem prob = small_problem(s, gamma, 8, 8, 16, 1.0, data);
            const Trajectory traj = run(prob);
            CHECK(traj.stability.lhs <=
                  traj.stability.rhs * (1.0 + 1e-10));
        }
    // forced run: dual norms enter the right-hand side
    {
        const FractionalParams p = make_params(0.5, 0.5);
        TimeProfile f;
        f.kind = TimeProfile::Kind::exponential_decay;
        f.c = 2.0;
        f.p = 1.0;
        const SpectralData data = make_spectral_data(p, {{1, 0.5}}, {f});
        DiscreteProblem prob = small_problem(0.5, 0.5, 8, 8, 16, 1.0, data);
        const Trajectory traj = run(prob);
        CHECK(traj.stability.rhs > 0.0);
        CHECK(traj.stability.lhs <= traj.stability.rhs * (1.0 + 1e-10));
    }
}

TEST_CASE("solver trace approaches the truncated-oracle mode value") {
    const FractionalParams p = make_params(0.5, 0.5);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}});
    const SpectralOracle oracle(data, 1.0);
    double prev = 1e9;
    for (const int level : {0, 1, 2}) {
        const int M = 8 << level;
        const int K = 16 << (2 * level);  // tau^{1/2} ~ h balance
        const GradedTensorMesh mesh = make_graded_mesh(M, M, 3.5, 1.0, p);
        DiscreteProblem prob =
            make_problem(p, mesh, make_time_grid(1.0, K), data);
        const Trajectory traj = run(prob);
        const double err =
            trace_l2_error(mesh, traj.states.back(), oracle, 1.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("trajectory CSV format and determinism") {
    const FractionalParams p = make_params(0.5, 0.5);
    const SpectralData data = make_spectral_data(p, {{1, 1.0}});
    DiscreteProblem prob = small_problem(0.5, 0.5, 5, 4, 4, 1.0, data);
    const Trajectory traj = run(prob);
    std::ostringstream a, b;
    write_trajectory_csv(a, prob, traj);
    write_trajectory_csv(b, prob, traj);
    CHECK(a.str() == b.str());
    std::istringstream is(a.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "step,t,trace_l2,energy,stab_lhs,stab_rhs");
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 5);
    // per-step stability columns satisfy the inequality
    std::istringstream is2(a.str());
    std::getline(is2, header);
    while (std::getline(is2, line)) {
        double vals[6];
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &vals[0],
                    &vals[1], &vals[2], &vals[3], &vals[4], &vals[5]);
        CHECK(vals[4] <= vals[5] * (1.0 + 1e-10) + 1e-15);
    }
}
