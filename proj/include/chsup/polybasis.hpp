#pragma once

// Multi-index enumeration and monomial-vector evaluation for p-variate
// polynomials of total degree at most d.

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "chsup/common.hpp"

namespace chsup {

struct MultiIndex {
    std::vector<int> exponents;

    int dimension() const { return static_cast<int>(exponents.size()); }

    int total_degree() const {
        int s = 0;
        for (int e : exponents) s += e;
        return s;
    }

    bool operator==(const MultiIndex& o) const { return exponents == o.exponents; }
};

/// binom(d+p, d) in exact integer arithmetic.  Throws SizeOverflowError if the
/// result does not fit in 64 bits.
inline std::uint64_t basis_size(int p, int d) {
    if (p < 1) throw ValidationError("basis_size: dimension p must be >= 1");
    if (d < 0) throw ValidationError("basis_size: degree d must be >= 0");
    // binom(d+p, min(p,d)) via incremental multiply/divide; each prefix is an
    // exact binomial so the division is exact.
    const int k = std::min(p, d);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(d + p - k + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw SizeOverflowError("basis_size: binom(d+p,d) overflows 64-bit range");
    }
    return static_cast<std::uint64_t>(acc);
}

// Graded monomial basis: total degree non-decreasing; within a fixed degree,
// exponent tuples sorted lexicographically descending on (a_1,...,a_p).  The
// ordering is prefix-stable in d.
class MonomialBasis {
public:
    MonomialBasis(int p, int d) : p_(p), d_(d) {
        const std::uint64_t s = basis_size(p, d);
        if (s > std::numeric_limits<std::int32_t>::max())
            throw SizeOverflowError("MonomialBasis: basis too large to index");
        indices_.reserve(static_cast<std::size_t>(s));
        std::vector<int> current(static_cast<std::size_t>(p), 0);
        for (int deg = 0; deg <= d; ++deg) emit_degree(deg, 0, current);
        build_eval_links();
    }

    int dimension() const { return p_; }
    int degree() const { return d_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }

    /// v_d(x): entry j is x^{alpha_j}, with 0^0 = 1.
    Vector eval_monomials(const Vector& x) const {
        if (x.size() != p_)
            throw ValidationError("eval_monomials: point dimension mismatch");
        Vector v(static_cast<Eigen::Index>(indices_.size()));
        v[0] = 1.0;
        for (std::size_t j = 1; j < indices_.size(); ++j)
            v[static_cast<Eigen::Index>(j)] =
                v[static_cast<Eigen::Index>(parent_[j])] * x[coord_[j]];
        return v;
    }

    /// Columns of the result are v_d of the corresponding row of `points`.
    Matrix eval_monomials_batch(const Matrix& points) const {
        if (points.cols() != p_)
            throw ValidationError("eval_monomials_batch: point dimension mismatch");
        Matrix V(static_cast<Eigen::Index>(indices_.size()), points.rows());
        V.row(0).setOnes();
        for (std::size_t j = 1; j < indices_.size(); ++j)
            V.row(static_cast<Eigen::Index>(j)) =
                V.row(static_cast<Eigen::Index>(parent_[j]))
                    .cwiseProduct(points.col(coord_[j]).transpose());
        return V;
    }

private:
    void emit_degree(int remaining, int pos, std::vector<int>& current) {
        if (pos == p_ - 1) {
            current[static_cast<std::size_t>(pos)] = remaining;
            indices_.push_back(MultiIndex{current});
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[static_cast<std::size_t>(pos)] = e;
            emit_degree(remaining - e, pos + 1, current);
        }
        current[static_cast<std::size_t>(pos)] = 0;
    }

    // Each monomial of positive degree is a coordinate times an earlier one;
    // evaluation is then one multiply per entry.
    void build_eval_links() {
        std::map<std::vector<int>, std::size_t> pos;
        for (std::size_t j = 0; j < indices_.size(); ++j) pos[indices_[j].exponents] = j;
        parent_.assign(indices_.size(), 0);
        coord_.assign(indices_.size(), 0);
        for (std::size_t j = 1; j < indices_.size(); ++j) {
            std::vector<int> e = indices_[j].exponents;
            for (int i = 0; i < p_; ++i) {
                if (e[static_cast<std::size_t>(i)] > 0) {
                    --e[static_cast<std::size_t>(i)];
                    parent_[j] = pos.at(e);
                    coord_[j] = i;
                    break;
                }
            }
        }
    }

    int p_;
    int d_;
    std::vector<MultiIndex> indices_;
    std::vector<std::size_t> parent_;
    std::vector<int> coord_;
};

inline MonomialBasis enumerate_basis(int p, int d) { return MonomialBasis(p, d); }

/// Generalized binomial coefficient a(a-1)...(a-k+1)/k! for real a, integer k.
inline double generalized_binomial(double a, int k) {
    if (k < 0) throw ValidationError("generalized_binomial: k must be >= 0");
    double num = 1.0, den = 1.0;
    for (int i = 0; i < k; ++i) {
        num *= a - i;
        den *= i + 1;
    }
    return num / den;
}

/// Exact integer binomial as a double (callers keep arguments small enough
/// that the value is exactly representable).
inline double integer_binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return static_cast<double>(static_cast<long double>(acc));
}

}  // namespace chsup
