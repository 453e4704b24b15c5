// Acceptance gate: one pass/fail line per criterion, strict tolerances.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "chsup/christoffel.hpp"
#include "chsup/csv.hpp"
#include "chsup/experiments.hpp"
#include "chsup/geometry.hpp"
#include "chsup/oracles.hpp"
#include "chsup/thresholding.hpp"

using namespace chsup;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int k, const std::string& desc, bool ok, double seconds) {
    std::cout << "[acceptance] criterion " << k << " (" << desc << "): "
              << (ok ? "PASS" : "FAIL") << " [" << seconds << " s]" << std::endl;
}

Vector random_unit(int p, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector x(p);
    do {
        for (int i = 0; i < p; ++i) x[i] = gauss(rng);
    } while (x.norm() < 1e-8);
    return x / x.norm();
}

}  // namespace

TEST_CASE("criterion 1: Gegenbauer equivalence") {
    Stopwatch sw;
    std::mt19937_64 rng(101);
    bool ok = true;
    for (int p : {1, 2, 3})
        for (int d = 0; d <= 6; ++d)
            for (int r : {0, 1, 2}) {
                const double m = gegenbauer_boundary_kernel(p, d, r);
                for (int rep = 0; rep < 20; ++rep) {
                    const Vector x = random_unit(p, rng);
                    if (std::abs(m * christoffel_analytic(p, d, r, x) - 1.0) > 1e-8) ok = false;
                }
            }
    report(1, "Gegenbauer boundary-kernel equivalence", ok, sw.seconds());
    CHECK(sw.seconds() < 10.0);
    REQUIRE(ok);
}

TEST_CASE("criterion 2: Legendre spot values") {
    Stopwatch sw;
    Vector zero = Vector::Zero(1), one = Vector::Ones(1);
    const bool ok = std::abs(christoffel_analytic(1, 1, 0, zero) - 1.0) <= 1e-10 &&
                    std::abs(christoffel_analytic(1, 1, 0, one) - 0.25) <= 1e-10 &&
                    std::abs(christoffel_analytic(1, 2, 0, zero) - 4.0 / 9.0) <= 1e-10;
    report(2, "Legendre spot values", ok, sw.seconds());
    REQUIRE(ok);
}

TEST_CASE("criterion 3: bound sandwiches on analytic ball measures") {
    Stopwatch sw;
    std::size_t violations = 0;

    // inside lower bound at the center, delta = 1, C = c_0
    for (int p : {1, 2})
        for (int d = 2; d <= 8; ++d)
            if (inside_lower_bound(1.0, p, 0.0, c_r_constant(p, 0), d) >
                christoffel_analytic(p, d, 0, Vector::Zero(p)) + 1e-12)
                ++violations;

    // outside upper bound at exterior points, diam S = 2
    for (int p : {1, 2})
        for (int r : {0, 1, 2})
            for (int d = 1; d <= 8; ++d)
                for (double delta : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
                    Vector x = Vector::Zero(p);
                    x[0] = 1.0 + delta;
                    if (christoffel_analytic(p, d, r, x) >
                        outside_upper_bound(delta, 2.0, d) + 1e-12)
                        ++violations;
                }

    // sup-kernel bound dominates grid maxima of kappa
    for (int p : {1, 2})
        for (int r : {0, 1, 2})
            for (int d = 2; d <= 8; ++d) {
                const MomentMatrix M = analytic_moment_matrix(p, d, r);
                const Factorization f = factorize(M, JitterPolicy::off());
                MonomialBasis basis(p, d);
                const int per_axis = p == 1 ? 201 : 61;
                double max_kappa = 0.0;
                std::vector<int> idx(static_cast<std::size_t>(p), 0);
                while (true) {
                    Vector x(p);
                    for (int i = 0; i < p; ++i)
                        x[i] = -1.0 + 2.0 * idx[static_cast<std::size_t>(i)] / (per_axis - 1.0);
                    if (x.norm() <= 1.0) {
                        Vector v = basis.eval_monomials(x);
                        f.L.triangularView<Eigen::Lower>().solveInPlace(v);
                        max_kappa = std::max(max_kappa, v.squaredNorm());
                    }
                    int axis = 0;
                    while (axis < p && ++idx[static_cast<std::size_t>(axis)] == per_axis)
                        idx[static_cast<std::size_t>(axis++)] = 0;
                    if (axis == p) break;
                }
                if (sup_kernel_bound(d, p, r, c_r_constant(p, r), 1.0) < max_kappa) ++violations;
            }

    const bool ok = violations == 0;
    report(3, "inside/outside/sup bound sandwiches, zero violations", ok, sw.seconds());
    CHECK(sw.seconds() < 30.0);
    REQUIRE(ok);
}

TEST_CASE("criterion 4: deterministic moment-gap majorant") {
    Stopwatch sw;
    const ConcentrationReport rep = run_concentration_study(2, 0, 3, {10000}, 100, 0.1, 401);
    const bool ok = rep.rows.size() == 1 && rep.rows[0].lemma_violations == 0;
    report(4, "sup relative error <= ||M-I|| + 1e-8, 100 reps", ok, sw.seconds());
    REQUIRE(ok);
}

TEST_CASE("criterion 5: concentration coverage and root-n rate") {
    Stopwatch sw;
    bool coverage_ok = true;
    for (int p : {1, 2})
        for (int d : {2, 3}) {
            const ConcentrationReport rep =
                run_concentration_study(p, 0, d, {1000, 10000}, 200, 0.1, 500 + 10 * p + d);
            for (const ConcentrationRow& row : rep.rows)
                if (row.coverage < 0.9) coverage_ok = false;
        }
    const ConcentrationReport slope_rep =
        run_concentration_study(2, 0, 3, {1000, 10000, 100000}, 50, 0.1, 601);
    const bool slope_ok = std::abs(slope_rep.median_slope + 0.5) <= 0.1;
    const bool ok = coverage_ok && slope_ok;
    std::ostringstream desc;
    desc << "coverage >= 0.9 and median slope " << slope_rep.median_slope << " = -0.5 +- 0.1";
    report(5, desc.str(), ok, sw.seconds());
    CHECK(sw.seconds() < 300.0);
    REQUIRE(ok);
}

TEST_CASE("criterion 6: combinatorial inequality suite") {
    Stopwatch sw;
    const std::vector<BoundReport> reports = inequality_suite();
    std::size_t violations = 0;
    for (const BoundReport& rep : reports)
        if (!rep.satisfied) ++violations;
    const bool ok = violations == 0 && reports.size() == 400 + 100 + 18000;
    report(6, "inequality grids, zero violations", ok, sw.seconds());
    CHECK(sw.seconds() < 5.0);
    REQUIRE(ok);
}

TEST_CASE("criterion 7: convergence study at desk scale") {
    Stopwatch sw;
    ExperimentConfig config;
    config.shape = "disk";
    config.n_grid = {500, 2000, 8000, 32000};
    config.seeds = {1, 2, 3, 4, 5};
    config.resolution = 512;
    const RunReport rep = run_convergence_study(config);
    bool ok = rep.rows.size() == 4;
    for (std::size_t i = 1; ok && i < rep.rows.size(); ++i) {
        if (!(rep.rows[i].hausdorff < rep.rows[i - 1].hausdorff)) ok = false;
        if (!(rep.rows[i].boundary_hausdorff < rep.rows[i - 1].boundary_hausdorff)) ok = false;
        if (!(rep.rows[i].symdiff < rep.rows[i - 1].symdiff)) ok = false;
    }
    if (ok && !(rep.rows[3].symdiff < 0.25 * rep.rows[0].symdiff)) ok = false;
    std::ostringstream desc;
    desc << "medians strictly decrease; final symdiff " << rep.rows.back().symdiff
         << " < 25% of initial " << rep.rows.front().symdiff;
    report(7, desc.str(), ok, sw.seconds());
    CHECK(sw.seconds() < 600.0);
    REQUIRE(ok);
}

TEST_CASE("criterion 8: qualitative topology at n = 32000") {
    Stopwatch sw;
    bool ok = true;

    ExperimentConfig annulus;
    annulus.shape = "annulus";
    annulus.n_grid = {32000};
    annulus.resolution = 256;
    const SyntheticSupportResult ring = run_synthetic_support(annulus);
    if (ring.contours.size() != 2) ok = false;

    ExperimentConfig four;
    four.shape = "four";
    four.n_grid = {32000};
    four.resolution = 256;
    const SyntheticSupportResult comps = run_synthetic_support(four);
    if (comps.contours.size() < 4) ok = false;

    // exact inclusion of every training point under the min-score threshold
    const ShapeSpec shape = make_named_shape("annulus");
    const Matrix sample = sample_shape(shape, 32000, 0.0, annulus.seeds[0]);
    const ChristoffelModel model = fit(sample, practical_degree(32000));
    const double gamma = min_score_threshold(model, sample);
    const Vector scores = model.christoffel_batch(sample);
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (!(scores[i] >= gamma)) ok = false;

    std::ostringstream desc;
    desc << "annulus rings = " << ring.contours.size() << ", four-component rings = "
         << comps.contours.size() << ", all training points inside";
    report(8, desc.str(), ok, sw.seconds());
    REQUIRE(ok);
}

TEST_CASE("criterion 9: outlier benchmark properties") {
    Stopwatch sw;
    const Dataset data = make_separable_benchmark(600, 100, 901);
    const std::vector<OutlierMethod> methods = {
        {OutlierMethod::Kind::Christoffel, 4, 0.5, 1},
        {OutlierMethod::Kind::Random, 0, 0.0, 1},
    };
    const std::vector<OutlierBenchRow> rows = run_outlier_bench(data, methods, 10, 901);
    bool ok = rows[0].median_precision == 1.0 && rows[1].median_precision >= 0.4 &&
              rows[1].median_precision <= 0.6;

    // exact argsort invariance of the Christoffel ranking under a random affine map
    std::mt19937_64 rng(903);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix A(2, 2);
    do {
        for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = unif(rng);
    } while (std::abs(A.determinant()) < 0.1);
    Vector b(2);
    b << unif(rng), unif(rng);
    const Matrix train = data.points.topRows(500);
    const Matrix test = data.points.bottomRows(200);
    Matrix train_t = train * A.transpose();
    train_t.rowwise() += b.transpose();
    Matrix test_t = test * A.transpose();
    test_t.rowwise() += b.transpose();
    const OutlierMethod chr{OutlierMethod::Kind::Christoffel, 4, 0.5, 1};
    const std::vector<double> s1 = outlier_scores(chr, train, test);
    const std::vector<double> s2 = outlier_scores(chr, train_t, test_t);
    std::vector<std::size_t> o1(s1.size()), o2(s2.size());
    for (std::size_t i = 0; i < o1.size(); ++i) o1[i] = o2[i] = i;
    std::stable_sort(o1.begin(), o1.end(),
                     [&](std::size_t x, std::size_t y) { return s1[x] < s1[y]; });
    std::stable_sort(o2.begin(), o2.end(),
                     [&](std::size_t x, std::size_t y) { return s2[x] < s2[y]; });
    if (o1 != o2) ok = false;

    std::ostringstream desc;
    desc << "separable precision " << rows[0].median_precision << ", random baseline "
         << rows[1].median_precision << ", affine-invariant ranking";
    report(9, desc.str(), ok, sw.seconds());
    REQUIRE(ok);
}

TEST_CASE("criterion 10: scheme algebra") {
    Stopwatch sw;
    bool ok = true;

    const SchemeParams params(1, 0.0, 0.5, 1.0, 0.5, 0.5, 2.0);
    for (int d = 2; d <= 40; ++d) {
        const double expo =
            params.p * (2.0 - params.eps) + (1.0 - params.eps) * params.r;
        const double twelve =
            12.0 *
            std::pow((3.0 * params.p * (2.0 - params.eps) +
                      3.0 * (1.0 - params.eps) * params.r) /
                         (2.0 * params.eps * M_E),
                     expo / params.eps) /
            std::pow(d, expo);
        if (std::abs(scheme_gamma_d(params, d, 0.5) / twelve - 1.0) > 1e-12) ok = false;
    }

    int prev = 0;
    for (double n = 1e3; n <= 1e9; n *= 2.0) {
        const SchemeOutputs out = select_scheme(static_cast<std::size_t>(n), params);
        if (out.d_n < prev) ok = false;
        prev = out.d_n;
    }

    for (int p = 1; p <= 4 && ok; ++p)
        for (int r = 0; r <= 3; ++r)
            for (int d = 0; d <= 50; ++d)
                if (gegenbauer_boundary_kernel(p, d, r) !=
                    gegenbauer_boundary_kernel_alt(p, d, r))
                    ok = false;

    report(10, "gamma ratio exact, d_n monotone, binomial spellings identical", ok,
           sw.seconds());
    REQUIRE(ok);
}

TEST_CASE("criterion 11: engineering round-trips, determinism, error cases") {
    Stopwatch sw;
    bool ok = true;

    // CSV round-trip
    Matrix pts(4, 3);
    pts << 0.5, -1.25, 3.0, 2.0, 0.0, -7.5, 1e-3, 4.0, 9.0, -2.5, 6.0, 0.125;
    std::stringstream csv;
    write_csv(pts, csv);
    if ((ingest_csv(csv, false).points - pts).cwiseAbs().maxCoeff() != 0.0) ok = false;

    // model serialization round-trip within 1e-12
    std::mt19937_64 rng(911);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix sample(80, 2);
    for (Eigen::Index i = 0; i < sample.size(); ++i) sample(i / 2, i % 2) = unif(rng);
    const ChristoffelModel model = fit(sample, 4);
    std::stringstream container;
    save_model(model, container);
    const ChristoffelModel loaded = load_model(container);
    for (int rep = 0; rep < 25; ++rep) {
        Vector x(2);
        x << unif(rng), unif(rng);
        const double a = model.christoffel(x), b = loaded.christoffel(x);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) ok = false;
    }

    // deterministic reports under fixed seeds
    std::stringstream r1, r2;
    write_concentration_report(run_concentration_study(1, 0, 2, {500}, 20, 0.1, 7), r1);
    write_concentration_report(run_concentration_study(1, 0, 2, {500}, 20, 0.1, 7), r2);
    if (r1.str() != r2.str()) ok = false;

    // representative error cases from the operations tables
    auto throws = [](auto&& fn) {
        try {
            fn();
            return false;
        } catch (const std::exception&) {
            return true;
        }
    };
    ok = ok && throws([] { basis_size(0, 2); });
    ok = ok && throws([] { basis_size(60, 40); });
    ok = ok && throws([] { MonomialBasis(2, 2).eval_monomials(Vector::Zero(3)); });
    ok = ok && throws([&] { standardize(Matrix::Ones(5, 2)); });
    ok = ok && throws([] {
        Matrix one(1, 1);
        one << 0.3;
        factorize(build_moment_matrix(one, MonomialBasis(1, 2)), JitterPolicy::off());
    });
    ok = ok && throws([] { inside_lower_bound(1.0, 1, 0.0, 0.5, 1); });
    ok = ok && throws([] { sup_kernel_bound(1, 1, 0.0, 0.5, 1.0); });
    ok = ok && throws([] { SchemeParams(1, 0.0, 0.5, 1.0, 1.5, 0.5, 2.0); });
    ok = ok && throws([] { C_pra(40, 0.0, 0.5); });
    ok = ok && throws([] { practical_degree(0); });
    ok = ok && throws([] {
        std::stringstream ss("0,1\n2,nan\n");
        ingest_csv(ss, false);
    });
    ok = ok && throws([] {
        const Raster r = rasterize([](const Vector&) { return false; },
                                   Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), 8);
        boundary_cells(r);
    });
    ok = ok && throws([] {
        sample_shape(ShapeSpec::annulus(Vector::Zero(2), 0.99999, 1.0), 100, 0.0, 1);
    });

    report(11, "round-trips, determinism, error-case coverage", ok, sw.seconds());
    REQUIRE(ok);
}
