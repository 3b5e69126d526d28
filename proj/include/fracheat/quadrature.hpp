#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracheat {

/// Quadrature rule on the reference interval [-1,1]. For a Jacobi rule with
/// weight (1-x)^a (1+x)^b the weights already absorb the weight function:
/// sum_i w_i f(x_i) approximates the weighted integral of f.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule, exact for polynomials of degree 2n-1 on [-1,1].
QuadratureRule gauss_legendre(int n);

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a,b > -1.
/// Computed by the Golub-Welsch algorithm from the three-term recurrence.
QuadratureRule gauss_jacobi(int n, double a, double b);

/// Integrate f over [lo,hi] with a plain (unweighted) rule mapped affinely.
double integrate_mapped(const QuadratureRule& rule, double lo, double hi,
                        const std::function<double(double)>& f);

/// Integrate y^beta * f(y) over [0,h] exactly in the weight: uses a
/// Gauss-Jacobi rule with b = beta mapped so the singular/degenerate
/// endpoint y=0 corresponds to x=-1.
double integrate_weighted_origin(const QuadratureRule& jacobi_rule, double beta,
                                 double h,
                                 const std::function<double(double)>& f);

/// Integrate (hi-r)^beta * f(r) over [lo,hi]: singular weight at the right
/// endpoint, Gauss-Jacobi with a = beta.
double integrate_weighted_upper(const QuadratureRule& jacobi_rule, double beta,
                                double lo, double hi,
                                const std::function<double(double)>& f);

/// Adaptive composite Gauss-Legendre on [lo,hi]: doubles the number of
/// panels until two successive levels agree to tol. Throws on
/// non-convergence.
double adaptive_gauss(const std::function<double(double)>& f, double lo,
                      double hi, double tol, int max_doublings = 16);

}  // namespace fracheat
