#pragma once

#include "fracheat/spectral.hpp"

#include <vector>

namespace fracheat {

/// Graded nodes y_k = (k/M)^mu * Y of the interval [0,Y].
std::vector<double> graded_nodes(int M, double mu, double Y);

/// Grading exponent used by default: strict margin over the threshold
/// 3/(1-alpha), never below 2.
double default_grading(double alpha);

/// Tensor-product mesh of the truncated cylinder (0,ell) x (0,Y):
/// uniform x-partition with Mx intervals, graded y-partition with My
/// intervals. Dirichlet nodes (lateral x in {0,ell} and top y=Y) carry no
/// DOF; the trace nodes at y=0 are free. DOF numbering is trace-first:
/// dof(i,j) = j*(Mx-1) + (i-1) for i=1..Mx-1, j=0..My-1.
struct GradedTensorMesh {
    double ell = 1.0;
    double Y = 1.0;
    double mu = 2.0;
    double alpha = 0.0;
    int Mx = 1;
    int My = 1;
    std::vector<double> x_nodes;
    std::vector<double> y_nodes;
    bool grading_ok = true;

    int free_dofs() const { return (Mx - 1) * My; }
    int trace_dofs() const { return Mx - 1; }
    int dof(int i, int j) const { return j * (Mx - 1) + (i - 1); }
    double hx() const { return ell / Mx; }
    double hy(int j) const { return y_nodes[j + 1] - y_nodes[j]; }
};

/// Builds the mesh; warns (grading_ok=false, message on stderr) when mu
/// fails the grading condition mu > 3/(1-alpha) for the given parameters.
GradedTensorMesh make_graded_mesh(int Mx, int My, double mu, double Y,
                                  const FractionalParams& params);

}  // namespace fracheat
