#pragma once

// Empirical moment matrices, Cholesky factorization with an optional jitter
// ladder, and evaluation of the Christoffel-Darboux kernel diagonal and the
// Christoffel function.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "chsup/common.hpp"
#include "chsup/polybasis.hpp"

namespace chsup {

struct MomentMatrix {
    enum class Provenance { Empirical, Analytic };

    Matrix m;
    Provenance provenance = Provenance::Empirical;
    std::size_t sample_size = 0;   // valid when empirical
    std::string measure_id;        // valid when analytic

    Eigen::Index size() const { return m.rows(); }
};

// Invertible affine map x -> linear*x + offset with cached inverse.
class AffineMap {
public:
    AffineMap(Matrix linear, Vector offset)
        : linear_(std::move(linear)), offset_(std::move(offset)) {
        Eigen::FullPivLU<Matrix> lu(linear_);
        if (!lu.isInvertible())
            throw NumericalError("AffineMap: linear part is singular");
        inverse_linear_ = lu.inverse();
    }

    static AffineMap identity(int p) {
        return AffineMap(Matrix::Identity(p, p), Vector::Zero(p));
    }

    int dimension() const { return static_cast<int>(offset_.size()); }
    const Matrix& linear() const { return linear_; }
    const Vector& offset() const { return offset_; }

    Vector apply(const Vector& x) const { return linear_ * x + offset_; }
    Vector apply_inverse(const Vector& y) const { return inverse_linear_ * (y - offset_); }

    /// Rows of `points` are mapped individually.
    Matrix apply_rows(const Matrix& points) const {
        Matrix out = points * linear_.transpose();
        out.rowwise() += offset_.transpose();
        return out;
    }

private:
    Matrix linear_;
    Vector offset_;
    Matrix inverse_linear_;
};

/// Whitening: subtract the sample mean and rescale by the symmetric inverse
/// square root of the sample covariance (1/n normalization).  The returned map
/// sends raw points to the standardized frame.
inline std::pair<AffineMap, Matrix> standardize(const Matrix& sample) {
    const Eigen::Index n = sample.rows(), p = sample.cols();
    if (n < 2) throw ValidationError("standardize: need at least 2 points");
    const Vector mean = sample.colwise().mean();
    Matrix centered = sample.rowwise() - mean.transpose();
    Matrix cov = centered.transpose() * centered / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const Vector evals = es.eigenvalues();
    const double tol = 1e-12 * std::max(evals[p - 1], 0.0);
    if (evals[0] <= tol) {
        std::ostringstream os;
        os << "standardize: degenerate sample, null direction ("
           << es.eigenvectors().col(0).transpose() << ")";
        throw DegenerateSampleError(os.str());
    }
    Matrix w = es.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() *
               es.eigenvectors().transpose();
    AffineMap map(w, -w * mean);
    return {map, map.apply_rows(sample)};
}

/// (1/n) sum_i v_d(X_i) v_d(X_i)^T, accumulated in sample index order.
inline MomentMatrix build_moment_matrix(const Matrix& sample, const MonomialBasis& basis) {
    if (sample.cols() != basis.dimension())
        throw ValidationError("build_moment_matrix: point dimension mismatch");
    const Eigen::Index s = static_cast<Eigen::Index>(basis.size());
    Matrix acc = Matrix::Zero(s, s);
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
        const Vector v = basis.eval_monomials(sample.row(i).transpose());
        acc.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
    }
    acc /= static_cast<double>(sample.rows());
    MomentMatrix M;
    M.m = acc.selfadjointView<Eigen::Lower>();
    M.provenance = MomentMatrix::Provenance::Empirical;
    M.sample_size = static_cast<std::size_t>(sample.rows());
    return M;
}

struct JitterPolicy {
    bool enabled = true;
    int max_tries = 6;

    static JitterPolicy off() { return {false, 0}; }
    static JitterPolicy auto_(int max_tries = 6) { return {true, max_tries}; }
};

struct Factorization {
    Matrix L;       // lower-triangular, strictly positive diagonal
    double jitter;  // total diagonal shift applied, 0 on clean instances
};

/// Cholesky with an escalating diagonal shift.  The starting shift is
/// 1e-12*trace(M)/s, multiplied by 10 per retry.
inline Factorization factorize(const MomentMatrix& M, const JitterPolicy& policy = {}) {
    const Eigen::Index s = M.size();
    auto attempt = [&](double jitter) -> std::optional<Matrix> {
        Matrix shifted = M.m;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() != Eigen::Success) return std::nullopt;
        Matrix L = llt.matrixL();
        if ((L.diagonal().array() <= 0.0).any()) return std::nullopt;
        return L;
    };
    if (auto L = attempt(0.0)) return {*L, 0.0};
    if (policy.enabled) {
        double jitter = 1e-12 * M.m.trace() / static_cast<double>(s);
        for (int t = 0; t < policy.max_tries; ++t, jitter *= 10.0)
            if (auto L = attempt(jitter)) return {*L, jitter};
    }
    throw SingularMomentMatrixError(
        "factorize: moment matrix is numerically singular; use n >= s(d) samples or a lower degree");
}

/// T = L^{-1} for M = L L^T; rows of T are coefficients of orthonormal
/// polynomials in the monomial basis, so T M T^T = I.
inline Matrix orthonormal_transform(const MomentMatrix& M) {
    Factorization f = factorize(M, JitterPolicy::off());
    return f.L.triangularView<Eigen::Lower>().solve(Matrix::Identity(M.size(), M.size()));
}

class ChristoffelModel {
public:
    ChristoffelModel(MonomialBasis basis, AffineMap standardizer, bool standardized,
                     Matrix factor, double jitter, std::size_t n)
        : basis_(std::move(basis)),
          standardizer_(std::move(standardizer)),
          standardized_(standardized),
          factor_(std::move(factor)),
          jitter_(jitter),
          n_(n) {}

    const MonomialBasis& basis() const { return basis_; }
    const AffineMap& standardizer() const { return standardizer_; }
    bool standardized() const { return standardized_; }
    const Matrix& factor() const { return factor_; }
    double jitter() const { return jitter_; }
    std::size_t sample_size() const { return n_; }
    int dimension() const { return basis_.dimension(); }
    int degree() const { return basis_.degree(); }

    /// Rank-deficient regime: fewer samples than basis functions.
    bool rank_warning() const { return n_ < basis_.size(); }

    /// kappa(x,x) = ||L^{-1} v_d(Ax)||^2 via triangular solve.
    double cd_kernel_diag(const Vector& x) const {
        Vector v = basis_.eval_monomials(standardized_ ? standardizer_.apply(x) : x);
        factor_.triangularView<Eigen::Lower>().solveInPlace(v);
        return v.squaredNorm();
    }

    double christoffel(const Vector& x) const { return 1.0 / cd_kernel_diag(x); }

    /// Lambda for every row of `points`.
    Vector christoffel_batch(const Matrix& points) const {
        const Matrix mapped = standardized_ ? standardizer_.apply_rows(points) : points;
        Matrix V = basis_.eval_monomials_batch(mapped);
        factor_.triangularView<Eigen::Lower>().solveInPlace(V);
        return V.colwise().squaredNorm().cwiseInverse().transpose();
    }

private:
    MonomialBasis basis_;
    AffineMap standardizer_;
    bool standardized_;
    Matrix factor_;
    double jitter_;
    std::size_t n_;
};

struct FitOptions {
    bool standardize = true;
    JitterPolicy jitter = {};
};

namespace detail {

/// Cholesky factor of (1/n) V V^T obtained from the QR decomposition of
/// V^T/sqrt(n): if V^T/sqrt(n) = QR then M = R^T R, so L = R^T after fixing
/// row signs.  Working on the data matrix keeps the effective condition number
/// at sqrt(cond(M)), which matters at high degree where forming M squares it
/// past double precision.  Returns nothing when R is numerically singular.
inline std::optional<Matrix> factor_from_data(const Matrix& V) {
    const Eigen::Index s = V.rows(), n = V.cols();
    if (n < s) return std::nullopt;
    Matrix A = V.transpose() / std::sqrt(static_cast<double>(n));
    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix R = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
    const double scale = R.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < s; ++i) {
        const double di = R(i, i);
        if (!(std::abs(di) > 1e-14 * scale)) return std::nullopt;
        if (di < 0.0) R.row(i) = -R.row(i);
    }
    return Matrix(R.transpose());
}

}  // namespace detail

inline ChristoffelModel fit(const Matrix& sample, int d, const FitOptions& options = {}) {
    if (sample.rows() < 1) throw ValidationError("fit: empty sample");
    const int p = static_cast<int>(sample.cols());
    MonomialBasis basis(p, d);
    AffineMap map = AffineMap::identity(p);
    Matrix data = sample;
    if (options.standardize) {
        auto [m, transformed] = standardize(sample);
        map = m;
        data = transformed;
    }
    if (auto L = detail::factor_from_data(basis.eval_monomials_batch(data)))
        return ChristoffelModel(std::move(basis), std::move(map), options.standardize,
                                std::move(*L), 0.0, static_cast<std::size_t>(sample.rows()));
    MomentMatrix M = build_moment_matrix(data, basis);
    Factorization f = factorize(M, options.jitter);
    return ChristoffelModel(std::move(basis), std::move(map), options.standardize,
                            std::move(f.L), f.jitter, static_cast<std::size_t>(sample.rows()));
}

// --- Model container ---------------------------------------------------------
//
// Plain-text, line-oriented, versioned.  Doubles are written as hexfloats so
// round-trips are bit-exact.  Layout:
//
//   chsup-model 1
//   p <int>  d <int>  n <uint>  standardized <0|1>
//   basis graded-desc-lex
//   jitter <hexfloat>
//   affine_linear  <p*p hexfloats, row-major>
//   affine_offset  <p hexfloats>
//   factor <s*(s+1)/2 hexfloats, lower triangle row-major>

inline void save_model(const ChristoffelModel& model, std::ostream& os) {
    os << "chsup-model 1\n";
    os << "p " << model.dimension() << " d " << model.degree() << " n "
       << model.sample_size() << " standardized " << (model.standardized() ? 1 : 0) << "\n";
    os << "basis graded-desc-lex\n";
    os << std::hexfloat;
    os << "jitter " << model.jitter() << "\n";
    os << "affine_linear";
    const Matrix& A = model.standardizer().linear();
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) os << " " << A(i, j);
    os << "\naffine_offset";
    for (Eigen::Index i = 0; i < model.standardizer().offset().size(); ++i)
        os << " " << model.standardizer().offset()[i];
    os << "\nfactor";
    const Matrix& L = model.factor();
    for (Eigen::Index i = 0; i < L.rows(); ++i)
        for (Eigen::Index j = 0; j <= i; ++j) os << " " << L(i, j);
    os << "\n" << std::defaultfloat;
}

inline void save_model(const ChristoffelModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("save_model: cannot open " + path);
    save_model(model, os);
}

namespace detail {
inline double read_double(std::istream& is, const char* field) {
    std::string tok;
    if (!(is >> tok)) throw ValidationError(std::string("load_model: truncated ") + field);
    try {
        return std::strtod(tok.c_str(), nullptr);
    } catch (...) {
        throw ValidationError(std::string("load_model: bad value in ") + field);
    }
}
}  // namespace detail

inline ChristoffelModel load_model(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "chsup-model" || version != 1)
        throw ValidationError("load_model: unrecognized container header");
    std::string key, basis_tag;
    int p = 0, d = 0, standardized = 0;
    std::size_t n = 0;
    is >> key >> p >> key >> d >> key >> n >> key >> standardized;
    is >> key >> basis_tag;
    if (basis_tag != "graded-desc-lex")
        throw ValidationError("load_model: unknown basis order tag " + basis_tag);
    is >> key;
    const double jitter = detail::read_double(is, "jitter");
    is >> key;
    Matrix A(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) A(i, j) = detail::read_double(is, "affine_linear");
    is >> key;
    Vector b(p);
    for (Eigen::Index i = 0; i < p; ++i) b[i] = detail::read_double(is, "affine_offset");
    is >> key;
    MonomialBasis basis(p, d);
    const Eigen::Index s = static_cast<Eigen::Index>(basis.size());
    Matrix L = Matrix::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) L(i, j) = detail::read_double(is, "factor");
    return ChristoffelModel(std::move(basis), AffineMap(std::move(A), std::move(b)),
                            standardized != 0, std::move(L), jitter, n);
}

inline ChristoffelModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("load_model: cannot open " + path);
    return load_model(is);
}

}  // namespace chsup
