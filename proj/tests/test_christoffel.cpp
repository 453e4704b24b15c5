#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "chsup/christoffel.hpp"
#include "oracle_helpers.hpp"

using namespace chsup;

namespace {

Matrix random_sample(int n, int p, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-scale, scale);
    Matrix out(n, p);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = unif(rng);
    return out;
}

Matrix two_point_sample() {
    Matrix s(2, 1);
    s << -1, 1;
    return s;
}

ChristoffelModel raw_fit(const Matrix& sample, int d) {
    FitOptions options;
    options.standardize = false;
    options.jitter = JitterPolicy::off();
    return fit(sample, d, options);
}

}  // namespace

TEST_CASE("standardize whitens and records the map") {
    Matrix s(2, 1);
    s << 0, 2;
    auto [map, out] = standardize(s);
    CHECK(map.linear()(0, 0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(map.offset()[0] == Catch::Approx(-1.0).epsilon(1e-12));
    CHECK(out(0, 0) == Catch::Approx(-1.0).epsilon(1e-12));
    CHECK(out(1, 0) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("standardize is idempotent on whitened data") {
    const Matrix s = random_sample(200, 2, 3);
    auto [map1, out1] = standardize(s);
    auto [map2, out2] = standardize(out1);
    CHECK(map2.offset().cwiseAbs().maxCoeff() < 1e-10);
    CHECK((map2.linear() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize rejects degenerate samples") {
    Matrix collinear(5, 2);
    for (int i = 0; i < 5; ++i) {
        collinear(i, 0) = i;
        collinear(i, 1) = 2.0 * i + 1.0;
    }
    CHECK_THROWS_AS(standardize(collinear), DegenerateSampleError);
    try {
        standardize(collinear);
        FAIL("expected DegenerateSampleError");
    } catch (const DegenerateSampleError& e) {
        CHECK(std::string(e.what()).find("null direction") != std::string::npos);
    }
    CHECK_THROWS_AS(standardize(Matrix::Zero(1, 2)), ValidationError);
}

TEST_CASE("build_moment_matrix spot values") {
    MonomialBasis b11(1, 1);
    const MomentMatrix M = build_moment_matrix(two_point_sample(), b11);
    CHECK((M.m - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(M.provenance == MomentMatrix::Provenance::Empirical);
    CHECK(M.sample_size == 2);

    MonomialBasis b10(1, 0);
    const MomentMatrix M0 = build_moment_matrix(random_sample(7, 1, 5), b10);
    CHECK(M0.m.rows() == 1);
    CHECK(M0.m(0, 0) == Catch::Approx(1.0).epsilon(1e-15));

    Matrix one(1, 2);
    one << 0.5, -0.25;
    MonomialBasis b21(2, 1);
    const MomentMatrix M1 = build_moment_matrix(one, b21);
    const Vector v = b21.eval_monomials(one.row(0).transpose());
    CHECK((M1.m - v * v.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(Eigen::FullPivLU<Matrix>(M1.m).rank() == 1);

    CHECK_THROWS_AS(build_moment_matrix(Matrix::Zero(3, 3), b21), ValidationError);
}

TEST_CASE("moment matrix invariants: symmetric PSD with unit mass") {
    MonomialBasis b(2, 3);
    const MomentMatrix M = build_moment_matrix(random_sample(50, 2, 9), b);
    CHECK((M.m - M.m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * M.m.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M.m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * M.m.trace());
    CHECK(M.m(0, 0) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("factorize handles clean, singular and jittered cases") {
    MomentMatrix eye;
    eye.m = Matrix::Identity(3, 3);
    const Factorization fi = factorize(eye, JitterPolicy::off());
    CHECK((fi.L - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fi.jitter == 0.0);

    MomentMatrix diag;
    diag.m = Matrix::Zero(2, 2);
    diag.m(0, 0) = 1.0;
    diag.m(1, 1) = 1.0 / 3.0;
    const Factorization fd = factorize(diag, JitterPolicy::off());
    CHECK(fd.L(0, 0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(fd.L(1, 1) == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(fd.L(1, 0) == 0.0);

    Matrix one(1, 1);
    one << 0.7;
    MonomialBasis b(1, 2);
    const MomentMatrix rank1 = build_moment_matrix(one, b);
    CHECK_THROWS_AS(factorize(rank1, JitterPolicy::off()), SingularMomentMatrixError);
    const Factorization fj = factorize(rank1, JitterPolicy::auto_());
    CHECK(fj.jitter > 0.0);
    CHECK((fj.L.diagonal().array() > 0.0).all());
}

TEST_CASE("cd_kernel_diag and christoffel spot values") {
    const ChristoffelModel model = raw_fit(two_point_sample(), 1);
    Vector zero = Vector::Zero(1), one = Vector::Ones(1);
    CHECK(model.cd_kernel_diag(zero) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(model.cd_kernel_diag(one) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(model.christoffel(one) == Catch::Approx(0.5).epsilon(1e-12));

    const ChristoffelModel d0 = raw_fit(random_sample(5, 2, 2), 0);
    Vector q(2);
    q << 3.0, -7.0;
    CHECK(d0.cd_kernel_diag(q) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(d0.christoffel(q) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("christoffel decays along rays and lies in (0,1]") {
    const ChristoffelModel model = fit(random_sample(80, 2, 21), 3);
    Vector dir(2);
    dir << 1.0, 0.5;
    double prev = model.christoffel(10.0 * dir);
    CHECK(prev < model.christoffel(2.0 * dir));
    CHECK(model.christoffel(100.0 * dir) < prev);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        Vector x(2);
        x << unif(rng), unif(rng);
        const double lam = model.christoffel(x);
        CHECK(lam > 0.0);
        CHECK(lam <= 1.0 + 1e-12);
    }
}

TEST_CASE("christoffel equals the brute-force variational minimum") {
    const Matrix sample = random_sample(60, 2, 13);
    const ChristoffelModel model = raw_fit(sample, 2);
    MonomialBasis basis(2, 2);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int rep = 0; rep < 10; ++rep) {
        Vector z(2);
        z << unif(rng), unif(rng);
        const double direct = model.christoffel(z);
        const double variational = oracle::variational_lambda_empirical(sample, basis, z);
        CHECK(direct == Catch::Approx(variational).epsilon(1e-9));
    }
}

TEST_CASE("affine invariance of the empirical Christoffel function") {
    const Matrix sample = random_sample(120, 2, 31);
    Matrix A(2, 2);
    A << 2.0, 0.5, -0.3, 1.5;
    Vector b(2);
    b << 0.7, -1.1;
    Matrix pushed = sample * A.transpose();
    pushed.rowwise() += b.transpose();

    const ChristoffelModel m_raw = fit(sample, 3);
    const ChristoffelModel m_pushed = fit(pushed, 3);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        Vector x(2);
        x << unif(rng), unif(rng);
        CHECK(m_raw.christoffel(x) ==
              Catch::Approx(m_pushed.christoffel(A * x + b)).epsilon(1e-8));
    }
}

TEST_CASE("christoffel is monotone non-increasing in the degree") {
    const Matrix sample = random_sample(200, 2, 41);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    std::vector<ChristoffelModel> models;
    for (int d = 0; d <= 3; ++d) models.push_back(raw_fit(sample, d));
    for (int rep = 0; rep < 20; ++rep) {
        Vector x(2);
        x << unif(rng), unif(rng);
        for (int d = 0; d < 3; ++d)
            CHECK(models[static_cast<std::size_t>(d + 1)].christoffel(x) <=
                  models[static_cast<std::size_t>(d)].christoffel(x) * (1.0 + 1e-10));
    }
}

TEST_CASE("orthonormal_transform satisfies T M T^T = I") {
    MonomialBasis b(2, 3);
    MomentMatrix M = build_moment_matrix(random_sample(100, 2, 51), b);
    const Matrix T = orthonormal_transform(M);
    CHECK((T * M.m * T.transpose() - Matrix::Identity(M.size(), M.size()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("rank warning flags n < s(d)") {
    FitOptions options;
    const ChristoffelModel lean = fit(random_sample(4, 2, 61), 2, options);
    CHECK(lean.rank_warning());
    CHECK(lean.jitter() > 0.0);
    const ChristoffelModel fat = fit(random_sample(50, 2, 61), 2, options);
    CHECK_FALSE(fat.rank_warning());
}

TEST_CASE("model serialization round-trips scores within 1e-12") {
    const Matrix sample = random_sample(60, 2, 71);
    const ChristoffelModel model = fit(sample, 3);
    std::stringstream ss;
    save_model(model, ss);
    const ChristoffelModel loaded = load_model(ss);
    CHECK(loaded.dimension() == model.dimension());
    CHECK(loaded.degree() == model.degree());
    CHECK(loaded.sample_size() == model.sample_size());
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        Vector x(2);
        x << unif(rng), unif(rng);
        CHECK(model.christoffel(x) == Catch::Approx(loaded.christoffel(x)).epsilon(1e-12));
    }
}

TEST_CASE("model loading rejects malformed containers") {
    {
        std::stringstream ss("wrong-magic 1\n");
        CHECK_THROWS_AS(load_model(ss), ValidationError);
    }
    {
        std::stringstream ss("chsup-model 99\n");
        CHECK_THROWS_AS(load_model(ss), ValidationError);
    }
    {
        const ChristoffelModel model = fit(random_sample(30, 1, 81), 2);
        std::stringstream ss;
        save_model(model, ss);
        std::string text = ss.str();
        const auto pos = text.find("graded-desc-lex");
        text.replace(pos, 15, "mystery-order!!");
        std::stringstream bad(text);
        CHECK_THROWS_AS(load_model(bad), ValidationError);
    }
    {
        const ChristoffelModel model = fit(random_sample(30, 1, 91), 2);
        std::stringstream ss;
        save_model(model, ss);
        std::string text = ss.str();
        std::stringstream truncated(text.substr(0, text.size() - 60));
        CHECK_THROWS_AS(load_model(truncated), ValidationError);
    }
    CHECK_THROWS_AS(load_model(std::string("/nonexistent/dir/model.txt")), ValidationError);
    const ChristoffelModel model = fit(random_sample(30, 1, 95), 2);
    CHECK_THROWS_AS(save_model(model, std::string("/nonexistent/dir/model.txt")),
                    ValidationError);
}

TEST_CASE("affine map applies and inverts consistently") {
    Matrix A(2, 2);
    A << 1.0, 2.0, 3.0, 5.0;
    Vector b(2);
    b << -1.0, 4.0;
    AffineMap map(A, b);
    Vector x(2);
    x << 0.3, -0.7;
    CHECK((map.apply_inverse(map.apply(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(AffineMap(Matrix::Zero(2, 2), b), NumericalError);
}

TEST_CASE("fit rejects an empty sample") {
    CHECK_THROWS_AS(fit(Matrix::Zero(0, 2), 2), ValidationError);
}
