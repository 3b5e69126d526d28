#include "fracheat/mesh.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace fracheat {

std::vector<double> graded_nodes(int M, double mu, double Y) {
    if (M < 1 || mu < 1.0 || Y <= 0.0)
        throw std::invalid_argument("graded_nodes: need M >= 1, mu >= 1, Y > 0");
    std::vector<double> nodes(M + 1);
    for (int k = 0; k <= M; ++k)
        nodes[k] = std::pow(static_cast<double>(k) / M, mu) * Y;
    nodes[M] = Y;
    return nodes;
}

double default_grading(double alpha) {
    return std::max(3.0 / (1.0 - alpha) + 0.5, 2.0);
}

GradedTensorMesh make_graded_mesh(int Mx, int My, double mu, double Y,
                                  const FractionalParams& params) {
    if (Mx < 2) throw std::invalid_argument("make_graded_mesh: Mx >= 2");
    GradedTensorMesh mesh;
    mesh.ell = params.domain_length;
    mesh.Y = Y;
    mesh.mu = mu;
    mesh.alpha = params.alpha;
    mesh.Mx = Mx;
    mesh.My = My;
    mesh.x_nodes.resize(Mx + 1);
    for (int i = 0; i <= Mx; ++i) mesh.x_nodes[i] = mesh.ell * i / Mx;
    mesh.y_nodes = graded_nodes(My, mu, Y);
    mesh.grading_ok = mu > 3.0 / (1.0 - params.alpha);
    if (!mesh.grading_ok)
        std::cerr << "[fracheat] warning: grading mu = " << mu
                  << " violates mu > 3/(1-alpha) = "
                  << 3.0 / (1.0 - params.alpha) << "\n";
    return mesh;
}

}  // namespace fracheat
