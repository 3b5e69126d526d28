#include "fracheat/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fracheat {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal matrix
// built from the recurrence coefficients, weights are mu0 * v(0)^2.
QuadratureRule golub_welsch(const std::vector<double>& alpha,
                            const std::vector<double>& beta_sq, double mu0) {
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = alpha[i];
        if (i + 1 < n) {
            const double off = std::sqrt(beta_sq[i + 1]);
            J(i, i + 1) = off;
            J(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

QuadratureRule build_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (a <= -1.0 || b <= -1.0)
        throw std::invalid_argument("gauss_jacobi: exponents must be > -1");
    std::vector<double> alpha(n), beta_sq(n, 0.0);
    const double apb = a + b;
    alpha[0] = (b - a) / (apb + 2.0);
    for (int k = 1; k < n; ++k) {
        const double d = 2.0 * k + apb;
        alpha[k] = (b * b - a * a) / (d * (d + 2.0));
        if (k == 1) {
            beta_sq[1] = 4.0 * (1.0 + a) * (1.0 + b) /
                         ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
        } else {
            beta_sq[k] = 4.0 * k * (k + a) * (k + b) * (k + apb) /
                         (d * d * (d + 1.0) * (d - 1.0));
        }
    }
    // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1,b+1)
    const double mu0 =
        std::exp((apb + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                 std::lgamma(b + 1.0) - std::lgamma(apb + 2.0));
    return golub_welsch(alpha, beta_sq, mu0);
}

struct RuleKey {
    int n;
    double a, b;
    bool operator<(const RuleKey& o) const {
        if (n != o.n) return n < o.n;
        if (a != o.a) return a < o.a;
        return b < o.b;
    }
};

const QuadratureRule& cached_rule(int n, double a, double b) {
    static std::map<RuleKey, QuadratureRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = cache.try_emplace(RuleKey{n, a, b});
    if (inserted) it->second = build_jacobi(n, a, b);
    return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n) { return cached_rule(n, 0.0, 0.0); }

QuadratureRule gauss_jacobi(int n, double a, double b) {
    return cached_rule(n, a, b);
}

double integrate_mapped(const QuadratureRule& rule, double lo, double hi,
                        const std::function<double(double)>& f) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

double integrate_weighted_origin(const QuadratureRule& jacobi_rule, double beta,
                                 double h,
                                 const std::function<double(double)>& f) {
    // y = h(1+x)/2, y^beta dy = (h/2)^{beta+1} (1+x)^beta dx
    const double scale = std::pow(0.5 * h, beta + 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < jacobi_rule.size(); ++i)
        acc += jacobi_rule.weights[i] *
               f(0.5 * h * (1.0 + jacobi_rule.nodes[i]));
    return scale * acc;
}

double integrate_weighted_upper(const QuadratureRule& jacobi_rule, double beta,
                                double lo, double hi,
                                const std::function<double(double)>& f) {
    // r = lo + (hi-lo)(1+x)/2, (hi-r)^beta = ((hi-lo)/2)^beta (1-x)^beta
    const double h = hi - lo;
    const double scale = std::pow(0.5 * h, beta + 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < jacobi_rule.size(); ++i)
        acc += jacobi_rule.weights[i] *
               f(lo + 0.5 * h * (1.0 + jacobi_rule.nodes[i]));
    return scale * acc;
}

double adaptive_gauss(const std::function<double(double)>& f, double lo,
                      double hi, double tol, int max_doublings) {
    if (hi <= lo) return 0.0;
    const QuadratureRule& rule = cached_rule(10, 0.0, 0.0);
    double prev = integrate_mapped(rule, lo, hi, f);
    int panels = 2;
    for (int level = 0; level < max_doublings; ++level, panels *= 2) {
        double acc = 0.0;
        const double h = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p)
            acc += integrate_mapped(rule, lo + p * h, lo + (p + 1) * h, f);
        if (std::abs(acc - prev) <= tol * std::max(1.0, std::abs(acc)))
            return acc;
        prev = acc;
    }
    throw std::runtime_error("adaptive_gauss: failed to converge");
}

}  // namespace fracheat
