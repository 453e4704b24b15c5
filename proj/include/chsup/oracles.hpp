#pragma once

// Analytic reference measures on the unit ball with closed-form moments, and
// executable versions of the bounds and inequalities used to verify the
// estimator.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "chsup/christoffel.hpp"
#include "chsup/common.hpp"
#include "chsup/polybasis.hpp"

namespace chsup {

// Measure with density c_r (1 - ||z||^2)^r on the unit ball.  The closed-form
// moment path requires integer r.
struct BallJacobiMeasure {
    int p;
    int r;

    BallJacobiMeasure(int p_, int r_) : p(p_), r(r_) {
        if (p < 1) throw ValidationError("BallJacobiMeasure: p must be >= 1");
        if (r < 0) throw ValidationError("BallJacobiMeasure: integer r must be >= 0");
    }

    std::string id() const {
        std::ostringstream os;
        os << "ball-jacobi(p=" << p << ",r=" << r << ")";
        return os.str();
    }
};

/// Normalized moment  int z^alpha dnu_r.  Zero when any exponent is odd;
/// otherwise
///   Gamma(p/2+r+1) * prod_i Gamma((alpha_i+1)/2)
///   / ( pi^{p/2} * Gamma(|alpha|/2 + p/2 + r + 1) ).
inline double ball_jacobi_moment(const MultiIndex& alpha, const BallJacobiMeasure& measure) {
    if (alpha.dimension() != measure.p)
        throw ValidationError("ball_jacobi_moment: multi-index dimension mismatch");
    int total = 0;
    for (int a : alpha.exponents) {
        if (a % 2 != 0) return 0.0;
        total += a;
    }
    const double p = measure.p, r = measure.r;
    double lg = std::lgamma(p / 2.0 + r + 1.0) - (p / 2.0) * std::log(M_PI) -
                std::lgamma(total / 2.0 + p / 2.0 + r + 1.0);
    for (int a : alpha.exponents) lg += std::lgamma((a + 1) / 2.0);
    return std::exp(lg);
}

inline MomentMatrix analytic_moment_matrix(int p, int d, int r) {
    BallJacobiMeasure measure(p, r);
    MonomialBasis basis(p, d);
    const Eigen::Index s = static_cast<Eigen::Index>(basis.size());
    MomentMatrix M;
    M.m.resize(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            MultiIndex sum = basis[static_cast<std::size_t>(i)];
            for (int k = 0; k < p; ++k)
                sum.exponents[static_cast<std::size_t>(k)] +=
                    basis[static_cast<std::size_t>(j)].exponents[static_cast<std::size_t>(k)];
            M.m(i, j) = M.m(j, i) = ball_jacobi_moment(sum, measure);
        }
    }
    M.provenance = MomentMatrix::Provenance::Analytic;
    M.measure_id = measure.id();
    return M;
}

inline double kappa_analytic(int p, int d, int r, const Vector& x) {
    MomentMatrix M = analytic_moment_matrix(p, d, r);
    Factorization f = factorize(M, JitterPolicy::off());
    MonomialBasis basis(p, d);
    Vector v = basis.eval_monomials(x);
    f.L.triangularView<Eigen::Lower>().solveInPlace(v);
    return v.squaredNorm();
}

inline double christoffel_analytic(int p, int d, int r, const Vector& x) {
    return 1.0 / kappa_analytic(p, d, r, x);
}

/// Boundary value of the CD kernel of nu_r:  2 binom(p+d+2r+1, d) - binom(p+d+2r, d).
inline double gegenbauer_boundary_kernel(int p, int d, int r) {
    return 2.0 * integer_binomial(p + d + 2 * r + 1, d) - integer_binomial(p + d + 2 * r, d);
}

/// Same quantity with the lower index written as p+2r+1 (resp. p+2r); the two
/// spellings coincide and tests assert it.
inline double gegenbauer_boundary_kernel_alt(int p, int d, int r) {
    return 2.0 * integer_binomial(p + d + 2 * r + 1, p + 2 * r + 1) -
           integer_binomial(p + d + 2 * r, p + 2 * r);
}

/// Surface area of the p-dimensional unit sphere as displayed alongside the
/// scheme constants: 2 pi^{(p+1)/2} / Gamma(p/2 + 1).
inline double omega_p(int p) {
    if (p < 1) throw ValidationError("omega_p: p must be >= 1");
    return 2.0 * std::pow(M_PI, (p + 1) / 2.0) / std::tgamma(p / 2.0 + 1.0);
}

/// Textbook surface area of the unit sphere S^p in R^{p+1},
/// 2 pi^{(p+1)/2} / Gamma((p+1)/2).  Kept distinct from omega_p, which is the
/// formula the scheme constants are defined with.
inline double sphere_surface_area(int p) {
    if (p < 1) throw ValidationError("sphere_surface_area: p must be >= 1");
    return 2.0 * std::pow(M_PI, (p + 1) / 2.0) / std::tgamma((p + 1) / 2.0);
}

/// Normalization constant of nu_r: Gamma(p/2+r+1) / (pi^{p/2} Gamma(r+1)).
inline double c_r_constant(int p, double r) {
    if (p < 1) throw ValidationError("c_r_constant: p must be >= 1");
    if (r < 0) throw ValidationError("c_r_constant: r must be >= 0");
    return std::exp(std::lgamma(p / 2.0 + r + 1.0) - (p / 2.0) * std::log(M_PI) -
                    std::lgamma(r + 1.0));
}

/// Upper bound on Lambda at distance >= delta outside the support:
/// 2^{3 - delta*d/(delta + diamS)}.
inline double outside_upper_bound(double delta, double diamS, int d) {
    if (delta <= 0) throw ValidationError("outside_upper_bound: delta must be > 0");
    if (diamS <= 0) throw ValidationError("outside_upper_bound: diamS must be > 0");
    return std::pow(2.0, 3.0 - delta * d / (delta + diamS));
}

/// Lower bound on Lambda at distance >= delta inside the support (d >= 2):
///   C omega_p delta^{p+r} / 2^{p+r} * (1/s(d))
///   * (d+1)(d+2)(d+3) / ((d+p+1)(d+p+2)(2d+p+6)).
inline double inside_lower_bound(double delta, int p, double r, double C, int d) {
    if (d < 2) throw ValidationError("inside_lower_bound: requires d >= 2");
    if (delta <= 0) throw ValidationError("inside_lower_bound: delta must be > 0");
    const double s = static_cast<double>(basis_size(p, d));
    const double ratio = (d + 1.0) * (d + 2.0) * (d + 3.0) /
                         ((d + p + 1.0) * (d + p + 2.0) * (2.0 * d + p + 6.0));
    return C * omega_p(p) * std::pow(delta / 2.0, p + r) / s * ratio;
}

/// Upper bound m(d,p,S,w) on sup_{x in S} kappa(x,x) for a support with
/// rolling radius R and density decay (C, r); d >= 2.
inline double sup_kernel_bound(int d, int p, double r, double C, double R) {
    if (d < 2) throw ValidationError("sup_kernel_bound: requires d >= 2");
    const double s = static_cast<double>(basis_size(p, d));
    const double ratio = (d + p + 1.0) * (d + p + 2.0) * (2.0 * d + p + 6.0) /
                         ((d + 1.0) * (d + 2.0) * (d + 3.0));
    const double interior = std::pow(4.0, p + r) * s / (C * omega_p(p) * std::pow(R, p + r)) * ratio;
    const double boundary =
        std::pow(2.0, p + 2.0 * r) * c_r_constant(p, r) / (C * std::pow(R, p + r)) *
        (2.0 * generalized_binomial(p + d + 2.0 * r + 1.0, d) -
         generalized_binomial(p + d + 2.0 * r, d));
    return interior + boundary;
}

/// max( sqrt(16m/(3n) log(s/alpha)), 16m/(3n) log(s/alpha) ).
inline double concentration_bound(double m, std::size_t n, double s, double alpha) {
    if (m <= 0) throw ValidationError("concentration_bound: m must be > 0");
    if (n < 1) throw ValidationError("concentration_bound: n must be >= 1");
    if (alpha <= 0 || alpha >= 1) throw ValidationError("concentration_bound: alpha in (0,1)");
    const double t = 16.0 * m / (3.0 * static_cast<double>(n)) * std::log(s / alpha);
    return std::max(std::sqrt(t), t);
}

/// Operator norm ||M - I|| for a moment matrix expressed in a basis
/// orthonormal for the population measure.
inline double technical_gap(const MomentMatrix& M) {
    Matrix diff = M.m - Matrix::Identity(M.size(), M.size());
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct BoundReport {
    std::string name;
    std::string inputs;
    double bound = 0.0;
    double measured = 0.0;
    bool satisfied = false;
    double slack = 0.0;
};

/// Grid evaluation of the three inequality lemmas.  Every report must come
/// back satisfied; a violation is an implementation bug.
inline std::vector<BoundReport> inequality_suite() {
    std::vector<BoundReport> reports;
    auto push = [&](const std::string& name, const std::string& inputs, double measured,
                    double bound, bool leq) {
        BoundReport rep;
        rep.name = name;
        rep.inputs = inputs;
        rep.bound = bound;
        rep.measured = measured;
        rep.slack = leq ? bound - measured : measured - bound;
        rep.satisfied = rep.slack >= 0.0;
        reports.push_back(std::move(rep));
    };

    // binom(m+n, m) <= m^n (e/n)^n exp(n^2/m) on m,n in {1..20}
    for (int m = 1; m <= 20; ++m) {
        for (int n = 1; n <= 20; ++n) {
            const double lhs = integer_binomial(m + n, m);
            const double rhs = std::pow(m, n) * std::pow(M_E / n, n) *
                               std::exp(static_cast<double>(n) * n / m);
            std::ostringstream os;
            os << "m=" << m << " n=" << n;
            push("binomial-upper", os.str(), lhs, rhs, true);
        }
    }

    // min_{x>0} [log(2) x - 2q log x] >= 2q(1 - log(3q)), q in {0.1,...,10}
    for (int qi = 1; qi <= 100; ++qi) {
        const double q = 0.1 * qi;
        double grid_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 4000; ++i) {
            const double x = std::pow(10.0, -3.0 + 6.0 * i / 4000.0);
            grid_min = std::min(grid_min, std::log(2.0) * x - 2.0 * q * std::log(x));
        }
        std::ostringstream os;
        os << "q=" << q;
        push("log-min", os.str(), grid_min, 2.0 * q * (1.0 - std::log(3.0 * q)), false);
    }

    // 2^{3-d^eps} <= 8 (3q)^{2q} / (e^{2q} d^{2q eps}),
    // d in {1..100}, eps in {0.1,...,0.9}, q in {0.5,...,10}
    for (int d = 1; d <= 100; ++d) {
        for (int ei = 1; ei <= 9; ++ei) {
            const double eps = 0.1 * ei;
            for (int qi = 1; qi <= 20; ++qi) {
                const double q = 0.5 * qi;
                const double lhs = std::pow(2.0, 3.0 - std::pow(d, eps));
                const double rhs = 8.0 * std::pow(3.0 * q, 2.0 * q) /
                                   (std::exp(2.0 * q) * std::pow(d, 2.0 * q * eps));
                std::ostringstream os;
                os << "d=" << d << " eps=" << eps << " q=" << q;
                push("needle-threshold", os.str(), lhs, rhs, true);
            }
        }
    }
    return reports;
}

}  // namespace chsup
