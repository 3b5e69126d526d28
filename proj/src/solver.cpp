#include "fracheat/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fracheat {

DiscreteProblem make_problem(const FractionalParams& params,
                             const GradedTensorMesh& mesh,
                             const TimeGrid& grid, const SpectralData& data) {
    DiscreteProblem p;
    p.params = params;
    p.mesh = mesh;
    p.grid = grid;
    p.data = data;
    p.stiffness = assemble_stiffness(mesh, params);
    p.trace_mass = assemble_trace_mass(mesh);
    if (params.gamma == 1.0) {
        p.c_gamma = 1.0 / grid.tau;
    } else {
        p.weights = l1_weights(params.gamma, grid);
        p.c_gamma = 1.0 / p.weights.kappa;
    }
    p.system = combine(p.c_gamma, p.trace_mass, 1.0, p.stiffness);
    const double norm = std::sqrt(2.0 / mesh.ell);
    for (const SpectralMode& m : data.modes) {
        std::vector<double> s = sine_hat_integrals(mesh, m.k);
        for (double& v : s) v *= norm;
        p.load_table.push_back(std::move(s));
    }
    return p;
}

namespace {

std::vector<double> trace_of(const GradedTensorMesh& mesh,
                             std::span<const double> state) {
    return {state.begin(), state.begin() + mesh.trace_dofs()};
}

// Load vector L^{n} on trace DOFs from the spectral expansion of f at t.
std::vector<double> load_vector(const DiscreteProblem& p, double t) {
    std::vector<double> load(p.mesh.trace_dofs(), 0.0);
    for (std::size_t m = 0; m < p.data.modes.size(); ++m) {
        const TimeProfile& f = p.data.modes[m].f;
        if (f.is_zero()) continue;
        const double fv = f(t, p.params.gamma);
        for (int i = 0; i < p.mesh.trace_dofs(); ++i)
            load[i] += fv * p.load_table[m][i];
    }
    return load;
}

std::vector<double> embed_trace(const DiscreteProblem& p,
                                std::span<const double> trace) {
    std::vector<double> full(p.mesh.free_dofs(), 0.0);
    for (int i = 0; i < p.mesh.trace_dofs(); ++i) full[i] = trace[i];
    return full;
}

}  // namespace

std::vector<double> initialize(const DiscreteProblem& problem) {
    const GradedTensorMesh& mesh = problem.mesh;
    std::vector<double> trace(mesh.trace_dofs(), 0.0);
    for (int i = 1; i < mesh.Mx; ++i) {
        double v = 0.0;
        for (const SpectralMode& m : problem.data.modes)
            v += m.u0 *
                 eigenfunction_value(m.k, mesh.x_nodes[i], problem.params);
        trace[i - 1] = v;
    }
    return harmonic_extension_solve(mesh, problem.stiffness, trace);
}

std::vector<double> step(const DiscreteProblem& problem,
                         const Trajectory& trajectory, int n) {
    const GradedTensorMesh& mesh = problem.mesh;
    const int ntr = mesh.trace_dofs();
    if (static_cast<int>(trajectory.trace_history.size()) < n + 1)
        throw std::invalid_argument("step: missing history");
    std::vector<double> hist(ntr, 0.0);
    if (problem.params.gamma == 1.0) {
        hist = trajectory.trace_history[n];
    } else {
        const std::vector<double>& a = problem.weights.a;
        for (int j = 0; j < n; ++j) {
            const double w = a[j] - a[j + 1];
            const std::vector<double>& tr = trajectory.trace_history[n - j];
            for (int i = 0; i < ntr; ++i) hist[i] += w * tr[i];
        }
        const std::vector<double>& tr0 = trajectory.trace_history[0];
        for (int i = 0; i < ntr; ++i) hist[i] += a[n] * tr0[i];
    }
    std::vector<double> rhs =
        problem.trace_mass.apply(embed_trace(problem, hist));
    for (double& v : rhs) v *= problem.c_gamma;
    const std::vector<double> load =
        load_vector(problem, problem.grid.node(n + 1));
    for (int i = 0; i < ntr; ++i) rhs[i] += load[i];
    return problem.system.solve(rhs);
}

Trajectory run(const DiscreteProblem& problem) {
    Trajectory traj;
    const int K = problem.grid.K;
    traj.states.reserve(K + 1);
    traj.states.push_back(initialize(problem));
    traj.trace_history.push_back(trace_of(problem.mesh, traj.states[0]));
    for (int n = 0; n < K; ++n) {
        traj.states.push_back(step(problem, traj, n));
        traj.trace_history.push_back(trace_of(problem.mesh, traj.states[n + 1]));
    }
    traj.diagnostics.resize(K + 1);
    traj.f_dual_norms.assign(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        const std::vector<double>& v = traj.states[k];
        traj.diagnostics[k].trace_l2 =
            std::sqrt(std::max(0.0, problem.trace_mass.quadratic_form(v)));
        traj.diagnostics[k].energy = energy_norm(problem.stiffness, v);
        if (k >= 1) {
            const std::vector<double> load =
                load_vector(problem, problem.grid.node(k));
            bool zero = true;
            for (double x : load)
                if (x != 0.0) zero = false;
            if (!zero) {
                // exact discrete dual norm: ||l||_{V'} = (L' A^{-1} L)^{1/2}
                const std::vector<double> full = embed_trace(problem, load);
                const std::vector<double> sol = problem.stiffness.solve(full);
                double acc = 0.0;
                for (std::size_t i = 0; i < full.size(); ++i)
                    acc += full[i] * sol[i];
                traj.f_dual_norms[k] = std::sqrt(std::max(0.0, acc));
            }
        }
    }
    std::vector<double> h(K + 1), vn(K + 1);
    for (int k = 0; k <= K; ++k) {
        h[k] = traj.diagnostics[k].trace_l2;
        vn[k] = traj.diagnostics[k].energy;
    }
    traj.stability = stability_functional(problem.params.gamma, problem.grid,
                                          h, vn, traj.f_dual_norms);
    return traj;
}

void write_trajectory_csv(std::ostream& os, const DiscreteProblem& problem,
                          const Trajectory& trajectory) {
    os << "step,t,trace_l2,energy,stab_lhs,stab_rhs\n";
    const int K = problem.grid.K;
    char buf[256];
    for (int k = 0; k <= K; ++k) {
        double lhs = 0.0, rhs = 0.0;
        if (k >= 1) {
            const TimeGrid partial{problem.grid.node(k), k, problem.grid.tau};
            std::vector<double> h(k + 1), vn(k + 1), fn(k + 1);
            for (int m = 0; m <= k; ++m) {
                h[m] = trajectory.diagnostics[m].trace_l2;
                vn[m] = trajectory.diagnostics[m].energy;
                fn[m] = trajectory.f_dual_norms[m];
            }
            const StabilityFunctional s = stability_functional(
                problem.params.gamma, partial, h, vn, fn);
            lhs = s.lhs;
            rhs = s.rhs;
        }
        std::snprintf(buf, sizeof(buf),
                      "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", k,
                      problem.grid.node(k), trajectory.diagnostics[k].trace_l2,
                      trajectory.diagnostics[k].energy, lhs, rhs);
        os << buf;
    }
}

}  // namespace fracheat
