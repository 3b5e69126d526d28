#include "fracheat/assembly.hpp"

#include "fracheat/quadrature.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fracheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SparseOperator::SparseOperator(Eigen::SparseMatrix<double> m)
    : matrix_(std::move(m)) {
    matrix_.makeCompressed();
}

std::vector<double> SparseOperator::apply(std::span<const double> v) const {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), v.size());
    Eigen::VectorXd y = matrix_ * x;
    return {y.data(), y.data() + y.size()};
}

std::vector<double> SparseOperator::solve(std::span<const double> rhs) const {
    if (!factorization_) {
        factorization_ = std::make_shared<
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        factorization_->compute(matrix_);
        if (factorization_->info() != Eigen::Success)
            throw std::runtime_error("SparseOperator: factorization failed");
    }
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
    Eigen::VectorXd x = factorization_->solve(b);
    if (factorization_->info() != Eigen::Success)
        throw std::runtime_error("SparseOperator: solve failed");
    return {x.data(), x.data() + x.size()};
}

double SparseOperator::quadratic_form(std::span<const double> v) const {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), v.size());
    return x.dot(matrix_ * x);
}

bool SparseOperator::is_symmetric(double tol) const {
    Eigen::SparseMatrix<double> d = matrix_ - Eigen::SparseMatrix<double>(
                                                  matrix_.transpose());
    for (int k = 0; k < d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
            if (std::abs(it.value()) > tol) return false;
    return true;
}

void SparseOperator::dump_triplets(std::ostream& os) const {
    for (int k = 0; k < matrix_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, k); it;
             ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

SparseOperator combine(double a, const SparseOperator& A, double b,
                       const SparseOperator& B) {
    Eigen::SparseMatrix<double> m = a * A.matrix() + b * B.matrix();
    return SparseOperator(std::move(m));
}

std::vector<double> weighted_moments(double exponent, double a, double b,
                                     int degree) {
    if (exponent <= -1.0)
        throw std::invalid_argument("weighted_moments: exponent must be > -1");
    if (a < 0.0 || b <= a)
        throw std::invalid_argument("weighted_moments: need 0 <= a < b");
    std::vector<double> m(degree + 1);
    for (int p = 0; p <= degree; ++p) {
        const double e = exponent + p + 1.0;
        m[p] = (std::pow(b, e) - std::pow(a, e)) / e;
    }
    return m;
}

namespace {

// Tridiagonal 1D matrices as (diag, off) over the free y-nodes j=0..My-1.
struct Tridiag {
    std::vector<double> diag;
    std::vector<double> off;  // off[j] couples j and j+1
};

// Weighted 1D mass and stiffness against y^alpha from exact moments.
// Per interval [ya,yb]: shapes N0=(yb-y)/h, N1=(y-ya)/h.
void weighted_y_matrices(const GradedTensorMesh& mesh, double alpha,
                         Tridiag& mass, Tridiag& stiff) {
    const int My = mesh.My;
    mass.diag.assign(My, 0.0);
    mass.off.assign(My - 1 > 0 ? My - 1 : 0, 0.0);
    stiff.diag.assign(My, 0.0);
    stiff.off.assign(My - 1 > 0 ? My - 1 : 0, 0.0);
    for (int j = 0; j < My; ++j) {
        const double ya = mesh.y_nodes[j];
        const double yb = mesh.y_nodes[j + 1];
        const double h = yb - ya;
        const std::vector<double> m = weighted_moments(alpha, ya, yb, 2);
        const double m00 = (yb * yb * m[0] - 2.0 * yb * m[1] + m[2]) / (h * h);
        const double m01 =
            (-ya * yb * m[0] + (ya + yb) * m[1] - m[2]) / (h * h);
        const double m11 = (ya * ya * m[0] - 2.0 * ya * m[1] + m[2]) / (h * h);
        const double k_loc = m[0] / (h * h);
        // local node 0 = global j (free), local node 1 = global j+1
        mass.diag[j] += m00;
        stiff.diag[j] += k_loc;
        if (j + 1 < My) {  // node j+1 free unless it is the Dirichlet cap
            mass.diag[j + 1] += m11;
            stiff.diag[j + 1] += k_loc;
            mass.off[j] += m01;
            stiff.off[j] += -k_loc;
        }
    }
}

// Unweighted 1D mass/stiffness on the uniform free x-nodes i=1..Mx-1.
void x_matrices(const GradedTensorMesh& mesh, Tridiag& mass, Tridiag& stiff) {
    const int n = mesh.Mx - 1;
    const double h = mesh.hx();
    mass.diag.assign(n, 2.0 * h / 3.0);
    mass.off.assign(n - 1 > 0 ? n - 1 : 0, h / 6.0);
    stiff.diag.assign(n, 2.0 / h);
    stiff.off.assign(n - 1 > 0 ? n - 1 : 0, -1.0 / h);
}

void kron_add(std::vector<Eigen::Triplet<double>>& trip, const Tridiag& Ymat,
              const Tridiag& Xmat, double scale, int nx) {
    const int ny = static_cast<int>(Ymat.diag.size());
    auto emit = [&](int jy, int jy2, double yv) {
        for (int i = 0; i < nx; ++i) {
            trip.emplace_back(jy * nx + i, jy2 * nx + i,
                              scale * yv * Xmat.diag[i]);
            if (i + 1 < nx) {
                trip.emplace_back(jy * nx + i, jy2 * nx + i + 1,
                                  scale * yv * Xmat.off[i]);
                trip.emplace_back(jy * nx + i + 1, jy2 * nx + i,
                                  scale * yv * Xmat.off[i]);
            }
        }
    };
    for (int j = 0; j < ny; ++j) {
        emit(j, j, Ymat.diag[j]);
        if (j + 1 < ny) {
            emit(j, j + 1, Ymat.off[j]);
            emit(j + 1, j, Ymat.off[j]);
        }
    }
}

}  // namespace

SparseOperator assemble_stiffness(const GradedTensorMesh& mesh,
                                  const FractionalParams& params) {
    const int nx = mesh.Mx - 1;
    const int n = mesh.free_dofs();
    Tridiag my_alpha, sy_alpha, mx, sx;
    weighted_y_matrices(mesh, params.alpha, my_alpha, sy_alpha);
    x_matrices(mesh, mx, sx);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(9) * n);
    const double inv_ds = 1.0 / params.d_s;
    kron_add(trip, my_alpha, sx, inv_ds, nx);  // grad_x . grad_x
    kron_add(trip, sy_alpha, mx, inv_ds, nx);  // grad_y . grad_y
    if (params.c_coeff != 0.0)
        kron_add(trip, my_alpha, mx, inv_ds * params.c_coeff, nx);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(A));
}

SparseOperator assemble_trace_mass(const GradedTensorMesh& mesh) {
    const int nx = mesh.Mx - 1;
    const int n = mesh.free_dofs();
    Tridiag mx, sx;
    x_matrices(mesh, mx, sx);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < nx; ++i) {
        trip.emplace_back(i, i, mx.diag[i]);
        if (i + 1 < nx) {
            trip.emplace_back(i, i + 1, mx.off[i]);
            trip.emplace_back(i + 1, i, mx.off[i]);
        }
    }
    Eigen::SparseMatrix<double> M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(M));
}

std::vector<double> harmonic_extension_solve(
    const GradedTensorMesh& mesh, const SparseOperator& stiffness,
    std::span<const double> trace_values) {
    const int nx = mesh.trace_dofs();
    const int n = mesh.free_dofs();
    if (static_cast<int>(trace_values.size()) != nx)
        throw std::invalid_argument("harmonic_extension_solve: trace size");
    const int ni = n - nx;  // interior DOFs come after the trace block
    if (ni == 0) {
        return std::vector<double>(trace_values.begin(), trace_values.end());
    }
    std::vector<Eigen::Triplet<double>> trip_ii;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    const Eigen::SparseMatrix<double>& A = stiffness.matrix();
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (r >= nx && c >= nx)
                trip_ii.emplace_back(r - nx, c - nx, it.value());
            else if (r >= nx && c < nx)
                rhs(r - nx) -= it.value() * trace_values[c];
        }
    Eigen::SparseMatrix<double> Aii(ni, ni);
    Aii.setFromTriplets(trip_ii.begin(), trip_ii.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Aii);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("harmonic_extension_solve: factorization");
    Eigen::VectorXd vi = ldlt.solve(rhs);
    std::vector<double> out(n);
    for (int i = 0; i < nx; ++i) out[i] = trace_values[i];
    for (int i = 0; i < ni; ++i) out[nx + i] = vi(i);
    return out;
}

TensorQuadrature make_tensor_quadrature(const GradedTensorMesh& mesh,
                                        const FractionalParams& params,
                                        int nq, int first_layer_levels) {
    TensorQuadrature tq;
    tq.nq = nq;
    const QuadratureRule gl = gauss_legendre(nq);
    const QuadratureRule gj = gauss_jacobi(nq, 0.0, params.alpha);
    const double hx = mesh.hx();
    tq.xq.resize(static_cast<std::size_t>(mesh.Mx) * nq);
    tq.wx.resize(tq.xq.size());
    for (int i = 0; i < mesh.Mx; ++i) {
        const double xm = mesh.x_nodes[i] + 0.5 * hx;
        for (int q = 0; q < nq; ++q) {
            tq.xq[i * nq + q] = xm + 0.5 * hx * gl.nodes[q];
            tq.wx[i * nq + q] = 0.5 * hx * gl.weights[q];
        }
    }
    tq.y_offset.assign(mesh.My + 1, 0);
    for (int j = 0; j < mesh.My; ++j) {
        tq.y_offset[j] = static_cast<int>(tq.yq.size());
        const double ya = mesh.y_nodes[j];
        const double yb = mesh.y_nodes[j + 1];
        const double hy = yb - ya;
        if (j == 0) {
            // innermost panel: y = d (1+x)/2, weights absorb y^alpha exactly
            const double d =
                hy * std::pow(0.5, static_cast<double>(first_layer_levels));
            for (int q = 0; q < nq; ++q) {
                tq.yq.push_back(0.5 * d * (1.0 + gj.nodes[q]));
                tq.wy.push_back(gj.weights[q] *
                                std::pow(0.5 * d, params.alpha + 1.0));
            }
            // geometric Gauss panels of ratio sqrt(2) resolve the
            // y^{-alpha}-type algebraic profiles of extension integrands
            double lo = d;
            for (int l = 0; l < 2 * first_layer_levels; ++l) {
                const double hi = std::min(lo * std::sqrt(2.0), hy);
                const double mid = 0.5 * (lo + hi);
                const double half = 0.5 * (hi - lo);
                for (int q = 0; q < nq; ++q) {
                    const double y = mid + half * gl.nodes[q];
                    tq.yq.push_back(y);
                    tq.wy.push_back(half * gl.weights[q] *
                                    std::pow(y, params.alpha));
                }
                lo = hi;
            }
            continue;
        }
        // composite Gauss on geometric subpanels with stretch <= 1.25, so
        // the smooth weight y^alpha is resolved to near machine precision
        // even on strongly graded layers
        int nsub = 1;
        if (params.alpha != 0.0 && yb / ya > 1.25)
            nsub = static_cast<int>(
                std::ceil(std::log(yb / ya) / std::log(1.25)));
        const double rho = std::pow(yb / ya, 1.0 / nsub);
        double lo = ya;
        for (int p = 0; p < nsub; ++p) {
            const double hi = (p + 1 == nsub) ? yb : lo * rho;
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (int q = 0; q < nq; ++q) {
                const double y = mid + half * gl.nodes[q];
                tq.yq.push_back(y);
                tq.wy.push_back(half * gl.weights[q] *
                                std::pow(y, params.alpha));
            }
            lo = hi;
        }
    }
    tq.y_offset[mesh.My] = static_cast<int>(tq.yq.size());
    return tq;
}

void for_each_weighted_quadpoint(
    const GradedTensorMesh& mesh, const FractionalParams& params, int nq,
    const std::function<void(int, int, double, double, double)>& visit,
    int first_layer_levels) {
    const TensorQuadrature tq =
        make_tensor_quadrature(mesh, params, nq, first_layer_levels);
    for (int j = 0; j < mesh.My; ++j)
        for (int qy = tq.y_begin(j); qy < tq.y_end(j); ++qy) {
            const double y = tq.yq[qy];
            const double wy = tq.wy[qy];
            for (int i = 0; i < mesh.Mx; ++i)
                for (int qx = 0; qx < nq; ++qx)
                    visit(i, j, tq.xq[i * nq + qx], y,
                          tq.wx[i * nq + qx] * wy);
        }
}

PointEval evaluate_state(const GradedTensorMesh& mesh,
                         std::span<const double> state, int i, int j, double x,
                         double y) {
    const double xa = mesh.x_nodes[i];
    const double xb = mesh.x_nodes[i + 1];
    const double ya = mesh.y_nodes[j];
    const double yb = mesh.y_nodes[j + 1];
    const double hx = xb - xa;
    const double hy = yb - ya;
    auto node_value = [&](int ii, int jj) -> double {
        if (ii <= 0 || ii >= mesh.Mx || jj >= mesh.My) return 0.0;
        return state[mesh.dof(ii, jj)];
    };
    const double v00 = node_value(i, j);
    const double v10 = node_value(i + 1, j);
    const double v01 = node_value(i, j + 1);
    const double v11 = node_value(i + 1, j + 1);
    const double tx = (x - xa) / hx;
    const double ty = (y - ya) / hy;
    PointEval out;
    out.v = v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty) +
            v01 * (1 - tx) * ty + v11 * tx * ty;
    out.gx = ((v10 - v00) * (1 - ty) + (v11 - v01) * ty) / hx;
    out.gy = ((v01 - v00) * (1 - tx) + (v11 - v10) * tx) / hy;
    return out;
}

std::vector<double> elliptic_project(const GradedTensorMesh& mesh,
                                     const FractionalParams& params,
                                     const SparseOperator& stiffness,
                                     const CylinderFn& target, int nq) {
    const int n = mesh.free_dofs();
    std::vector<double> rhs(n, 0.0);
    const double inv_ds = 1.0 / params.d_s;
    const double hx = mesh.hx();
    // the singular layer needs the refined rule: smooth targets carry the
    // y^{-alpha}-type conormal profile there
    for_each_weighted_quadpoint(
        mesh, params, nq,
        [&](int i, int j, double x, double y, double w) {
            const PointEval t = target(x, y);
            const double xa = mesh.x_nodes[i];
            const double ya = mesh.y_nodes[j];
            const double hy = mesh.hy(j);
            const double tx = (x - xa) / hx;
            const double ty = (y - ya) / hy;
            // local basis: (ii,jj) corners with tensor hats
            const double shape[4] = {(1 - tx) * (1 - ty), tx * (1 - ty),
                                     (1 - tx) * ty, tx * ty};
            const double dsx[4] = {-(1 - ty) / hx, (1 - ty) / hx, -ty / hx,
                                   ty / hx};
            const double dsy[4] = {-(1 - tx) / hy, -tx / hy, (1 - tx) / hy,
                                   tx / hy};
            const int ii[4] = {i, i + 1, i, i + 1};
            const int jj[4] = {j, j, j + 1, j + 1};
            for (int c = 0; c < 4; ++c) {
                if (ii[c] <= 0 || ii[c] >= mesh.Mx || jj[c] >= mesh.My)
                    continue;
                const double val =
                    t.gx * dsx[c] + t.gy * dsy[c] +
                    params.c_coeff * t.v * shape[c];
                rhs[mesh.dof(ii[c], jj[c])] += w * inv_ds * val;
            }
        },
        45);
    return stiffness.solve(rhs);
}

double energy_norm(const SparseOperator& stiffness,
                   std::span<const double> vec) {
    return std::sqrt(std::max(0.0, stiffness.quadratic_form(vec)));
}

double energy_error(const GradedTensorMesh& mesh,
                    const FractionalParams& params,
                    std::span<const double> state, const CylinderFn& exact,
                    int nq, int first_layer_levels) {
    double acc = 0.0;
    const double inv_ds = 1.0 / params.d_s;
    for_each_weighted_quadpoint(
        mesh, params, nq,
        [&](int i, int j, double x, double y, double w) {
            const PointEval t = exact(x, y);
            const PointEval s = evaluate_state(mesh, state, i, j, x, y);
            const double dx = s.gx - t.gx;
            const double dy = s.gy - t.gy;
            const double dv = s.v - t.v;
            acc += w * inv_ds *
                   (dx * dx + dy * dy + params.c_coeff * dv * dv);
        },
        first_layer_levels);
    return std::sqrt(std::max(0.0, acc));
}

std::vector<double> sine_hat_integrals(const GradedTensorMesh& mesh, int k) {
    const double ell = mesh.ell;
    const double w = k * kPi / ell;
    const int nx = mesh.trace_dofs();
    std::vector<double> out(nx);
    auto up = [&](double xa, double xb) {
        // int_xa^xb (x-xa) sin(w x) dx
        return -(xb - xa) * std::cos(w * xb) / w +
               (std::sin(w * xb) - std::sin(w * xa)) / (w * w);
    };
    auto down = [&](double xa, double xb) {
        // int_xa^xb (xb-x) sin(w x) dx
        return (xb - xa) * std::cos(w * xa) / w -
               (std::sin(w * xb) - std::sin(w * xa)) / (w * w);
    };
    for (int i = 1; i < mesh.Mx; ++i) {
        const double xm = mesh.x_nodes[i];
        const double xl = mesh.x_nodes[i - 1];
        const double xr = mesh.x_nodes[i + 1];
        out[i - 1] = up(xl, xm) / (xm - xl) + down(xm, xr) / (xr - xm);
    }
    return out;
}

std::vector<double> trace_coefficients(const GradedTensorMesh& mesh,
                                       std::span<const double> state,
                                       const SpectralData& data) {
    std::vector<double> coeffs(data.modes.size(), 0.0);
    const double norm = std::sqrt(2.0 / mesh.ell);
    for (std::size_t m = 0; m < data.modes.size(); ++m) {
        const std::vector<double> s =
            sine_hat_integrals(mesh, data.modes[m].k);
        double acc = 0.0;
        for (int i = 0; i < mesh.trace_dofs(); ++i) acc += state[i] * s[i];
        coeffs[m] = norm * acc;
    }
    return coeffs;
}

double trace_hs_error(const GradedTensorMesh& mesh,
                      std::span<const double> state,
                      const SpectralOracle& oracle, double t,
                      double s_signed) {
    const SpectralData& data = oracle.data();
    const std::vector<double> coeffs = trace_coefficients(mesh, state, data);
    double acc = 0.0;
    for (std::size_t m = 0; m < data.modes.size(); ++m) {
        const double d = coeffs[m] - oracle.mode_value(m, t);
        acc += std::pow(data.modes[m].lambda, s_signed) * d * d;
    }
    return std::sqrt(acc);
}

double trace_l2_error(const GradedTensorMesh& mesh,
                      std::span<const double> state,
                      const SpectralOracle& oracle, double t) {
    return trace_hs_error(mesh, state, oracle, t, 0.0);
}

double trace_l2_error_full(const GradedTensorMesh& mesh,
                           std::span<const double> state,
                           const SpectralOracle& oracle, double t) {
    const SpectralData& data = oracle.data();
    std::vector<double> uk(data.modes.size());
    for (std::size_t m = 0; m < uk.size(); ++m)
        uk[m] = oracle.mode_value(m, t);
    const QuadratureRule gl = gauss_legendre(6);
    double acc = 0.0;
    for (int i = 0; i < mesh.Mx; ++i) {
        const double xa = mesh.x_nodes[i];
        const double xb = mesh.x_nodes[i + 1];
        const double va = (i == 0) ? 0.0 : state[mesh.dof(i, 0)];
        const double vb = (i + 1 == mesh.Mx) ? 0.0 : state[mesh.dof(i + 1, 0)];
        acc += integrate_mapped(gl, xa, xb, [&](double x) {
            const double trv = va + (vb - va) * (x - xa) / (xb - xa);
            double ex = 0.0;
            for (std::size_t m = 0; m < uk.size(); ++m)
                ex += uk[m] * eigenfunction_value(data.modes[m].k, x,
                                                  data.params);
            const double d = trv - ex;
            return d * d;
        });
    }
    return std::sqrt(std::max(0.0, acc));
}

void dump_mesh(std::ostream& os, const GradedTensorMesh& mesh) {
    for (int j = 0; j < mesh.My; ++j)
        for (int i = 1; i < mesh.Mx; ++i)
            os << i << " " << j << " " << mesh.x_nodes[i] << " "
               << mesh.y_nodes[j] << " " << mesh.dof(i, j) << "\n";
}

}  // namespace fracheat
