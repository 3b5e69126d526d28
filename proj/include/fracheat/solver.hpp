#pragma once

#include "fracheat/assembly.hpp"
#include "fracheat/caputo.hpp"
#include "fracheat/mesh.hpp"
#include "fracheat/spectral.hpp"

#include <iosfwd>
#include <vector>

namespace fracheat {

/// Everything needed to march the fully discrete scheme: the assembled
/// operators, the time grid and L1 weights, and the spectral data that
/// supplies u_0 and the forcing. The step matrix c_gamma*M_tr + A_Y is
/// fixed across steps (uniform tau) and factorized once.
struct DiscreteProblem {
    FractionalParams params;
    GradedTensorMesh mesh;
    TimeGrid grid;
    SpectralData data;
    L1Weights weights;  // empty for gamma = 1
    double c_gamma = 0.0;
    SparseOperator stiffness;
    SparseOperator trace_mass;
    SparseOperator system;
    std::vector<std::vector<double>> load_table;  // per mode, trace DOFs
};

DiscreteProblem make_problem(const FractionalParams& params,
                             const GradedTensorMesh& mesh,
                             const TimeGrid& grid, const SpectralData& data);

struct StepDiagnostics {
    double trace_l2 = 0.0;
    double energy = 0.0;
};

struct Trajectory {
    std::vector<std::vector<double>> states;         // V^0..V^K
    std::vector<std::vector<double>> trace_history;  // trace DOFs per step
    std::vector<StepDiagnostics> diagnostics;
    std::vector<double> f_dual_norms;  // ||f^k||_{V'} for k=0..K ([0] = 0)
    StabilityFunctional stability;
};

/// V^0: discrete a_Y-harmonic extension of the nodal trace values of u_0.
std::vector<double> initialize(const DiscreteProblem& problem);

/// One implicit step: solves (c_gamma M_tr + A_Y) V^{n+1} =
/// c_gamma M_tr H^n + L^{n+1} with the L1 history combination H^n
/// (tr V^n for gamma = 1). The nonlocal sum touches only trace DOFs.
std::vector<double> step(const DiscreteProblem& problem,
                         const Trajectory& trajectory, int n);

/// Full march; fills diagnostics and the stability functional with
/// H = trace L2 norm, V = energy norm, and the exact discrete dual norm
/// of the load.
Trajectory run(const DiscreteProblem& problem);

/// Per-step CSV: step, t, trace L2 norm, energy norm, stability lhs/rhs
/// (the functional evaluated over the first k steps).
void write_trajectory_csv(std::ostream& os, const DiscreteProblem& problem,
                          const Trajectory& trajectory);

}  // namespace fracheat
