#pragma once

#include "fracheat/mesh.hpp"
#include "fracheat/spectral.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace fracheat {

/// Symmetric sparse operator with a lazily computed direct factorization.
class SparseOperator {
public:
    SparseOperator() = default;
    explicit SparseOperator(Eigen::SparseMatrix<double> m);

    int dimension() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

    std::vector<double> apply(std::span<const double> v) const;
    /// Direct solve; the LDLT factorization is computed on first use and
    /// reused afterwards.
    std::vector<double> solve(std::span<const double> rhs) const;
    double quadratic_form(std::span<const double> v) const;
    bool is_symmetric(double tol = 1e-12) const;

    /// Debug dump: one "row col value" triplet per line.
    void dump_triplets(std::ostream& os) const;

private:
    Eigen::SparseMatrix<double> matrix_;
    mutable std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>
        factorization_;
};

/// Linear combination a*A + b*B.
SparseOperator combine(double a, const SparseOperator& A, double b,
                       const SparseOperator& B);

/// Moments int_a^b y^{exponent+m} dy for m = 0..degree, exact.
std::vector<double> weighted_moments(double exponent, double a, double b,
                                     int degree);

/// Stiffness of the bilinear form a_Y on the tensor-product Q1 space:
///   (1/d_s) int y^alpha (grad W_i . grad W_j + c W_i W_j),
/// assembled exactly: x-integrals are polynomial, y-integrals reduce to
/// weighted monomial moments. Dirichlet DOFs are excluded by numbering.
SparseOperator assemble_stiffness(const GradedTensorMesh& mesh,
                                  const FractionalParams& params);

/// Trace mass matrix: 1D P1 mass on the x-partition embedded on the trace
/// DOFs (y=0 row of the DOF numbering), zero elsewhere.
SparseOperator assemble_trace_mass(const GradedTensorMesh& mesh);

/// Discrete a_Y-harmonic extension: solves for the interior DOFs with the
/// trace DOFs constrained to trace_values. Returns a full state vector.
std::vector<double> harmonic_extension_solve(const GradedTensorMesh& mesh,
                                             const SparseOperator& stiffness,
                                             std::span<const double> trace_values);

/// Pointwise data of an oracle function on the cylinder.
struct PointEval {
    double v = 0.0;
    double gx = 0.0;
    double gy = 0.0;
};
using CylinderFn = std::function<PointEval(double x, double y)>;

/// Tensor quadrature point tables for the weighted cell integrals: plain
/// Gauss points in x; in y the first layer uses a Gauss-Jacobi rule whose
/// weights absorb y^alpha exactly, other layers composite Gauss on
/// geometric subpanels of bounded stretch (the explicit y^alpha factor is
/// folded into wy). Layer j owns points [y_offset[j], y_offset[j+1]).
struct TensorQuadrature {
    int nq = 5;
    std::vector<double> xq, wx;  // size Mx*nq
    std::vector<double> yq, wy;  // wy includes y^alpha
    std::vector<int> y_offset;   // size My+1

    int y_begin(int j) const { return y_offset[j]; }
    int y_end(int j) const { return y_offset[j + 1]; }
};

/// first_layer_levels > 0 refines the singular layer [0, y_1] into that
/// many geometric ratio-2 Gauss subpanels above an innermost Jacobi panel.
/// Needed when integrands carry the y^{-alpha}-type profile of the
/// extension (projector right-hand sides); the plain Jacobi rule is exact
/// for polynomial cofactors and is enough for assembly cross-checks and
/// error measurements.
TensorQuadrature make_tensor_quadrature(const GradedTensorMesh& mesh,
                                        const FractionalParams& params,
                                        int nq, int first_layer_levels = 0);

/// Visits every tensor quadrature point with the combined weight
/// w = wx * wy (wy already carries y^alpha).
/// Callback: (ix_cell, jy_cell, x, y, weight).
void for_each_weighted_quadpoint(
    const GradedTensorMesh& mesh, const FractionalParams& params, int nq,
    const std::function<void(int, int, double, double, double)>& visit,
    int first_layer_levels = 0);

/// Weighted elliptic projector: solves a_Y(G w, W) = a_Y(w, W) for all
/// discrete W, the right-hand side computed by the mixed Gauss/Gauss-Jacobi
/// rule from the target's values and gradient.
std::vector<double> elliptic_project(const GradedTensorMesh& mesh,
                                     const FractionalParams& params,
                                     const SparseOperator& stiffness,
                                     const CylinderFn& target, int nq = 5);

/// Value and gradient of a discrete state at a point inside cell (i,j).
PointEval evaluate_state(const GradedTensorMesh& mesh,
                         std::span<const double> state, int i, int j, double x,
                         double y);

/// Energy norm (vec' A vec)^{1/2}.
double energy_norm(const SparseOperator& stiffness,
                   std::span<const double> vec);

/// Energy error ( (1/d_s) int y^alpha (|grad(V-v)|^2 + c (V-v)^2) )^{1/2}
/// against an oracle function, by the mixed quadrature rule.
double energy_error(const GradedTensorMesh& mesh,
                    const FractionalParams& params,
                    std::span<const double> state, const CylinderFn& exact,
                    int nq = 5, int first_layer_levels = 0);

/// Spectral coefficients of the trace of a state: w_k = int tr(V) phi_k,
/// via exact integration of piecewise linears against the eigenfunctions.
std::vector<double> trace_coefficients(const GradedTensorMesh& mesh,
                                       std::span<const double> state,
                                       const SpectralData& data);

/// Trace errors against the oracle solution at time t in the spectral
/// H^{s_signed} norm over the oracle's modes (s_signed = 0 gives L2).
double trace_hs_error(const GradedTensorMesh& mesh,
                      std::span<const double> state,
                      const SpectralOracle& oracle, double t, double s_signed);
double trace_l2_error(const GradedTensorMesh& mesh,
                      std::span<const double> state,
                      const SpectralOracle& oracle, double t);

/// Full L2(Omega) trace error by per-panel Gauss quadrature. Unlike the
/// coefficient-based error this sees the rough (high-mode) part of the
/// discrete trace, which carries the duality rate of the projector.
double trace_l2_error_full(const GradedTensorMesh& mesh,
                           std::span<const double> state,
                           const SpectralOracle& oracle, double t);

/// Exact integrals S_{k,i} = int sin(k pi x / ell) hat_i(x) dx for the free
/// x-nodes i = 1..Mx-1.
std::vector<double> sine_hat_integrals(const GradedTensorMesh& mesh, int k);

/// Debug dump of mesh nodes (one "i j x y dof" line per free node).
void dump_mesh(std::ostream& os, const GradedTensorMesh& mesh);

}  // namespace fracheat
