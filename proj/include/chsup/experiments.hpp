#pragma once

// Experiment drivers: synthetic support recovery, convergence-rate and
// concentration studies, and the outlier-detection benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chsup/christoffel.hpp"
#include "chsup/common.hpp"
#include "chsup/csv.hpp"
#include "chsup/geometry.hpp"
#include "chsup/kde.hpp"
#include "chsup/oracles.hpp"
#include "chsup/thresholding.hpp"

namespace chsup {

enum class DegreeRule { Theoretical, Practical, Fixed };

struct ExperimentConfig {
    std::string shape = "disk";  // disk | annulus | four
    std::vector<std::size_t> n_grid;
    std::vector<std::uint64_t> seeds = {1};
    DegreeRule degree_rule = DegreeRule::Practical;
    int fixed_degree = 4;
    std::optional<SchemeParams> scheme;  // required for the theoretical rule
    double sampler_r = 0.0;
    int resolution = 256;

    std::string echo() const {
        std::ostringstream os;
        os << "shape=" << shape << " n_grid=";
        for (std::size_t i = 0; i < n_grid.size(); ++i) os << (i ? "," : "") << n_grid[i];
        os << " seeds=";
        for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
        os << " degree_rule="
           << (degree_rule == DegreeRule::Practical
                   ? "practical"
                   : degree_rule == DegreeRule::Fixed ? "fixed" : "theoretical");
        if (degree_rule == DegreeRule::Fixed) os << ":" << fixed_degree;
        os << " sampler_r=" << sampler_r << " resolution=" << resolution;
        return os.str();
    }
};

inline ShapeSpec make_named_shape(const std::string& name) {
    Vector origin = Vector::Zero(2);
    if (name == "interval") return ShapeSpec::ball(Vector::Zero(1), 1.0);
    if (name == "disk") return ShapeSpec::ball(origin, 1.0);
    if (name == "annulus") return ShapeSpec::annulus(origin, 0.5, 1.0);
    if (name == "four") {
        std::vector<Ball> balls;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0}) {
                Vector c(2);
                c << sx, sy;
                balls.push_back({c, 0.45});
            }
        return ShapeSpec::union_of_balls(std::move(balls));
    }
    throw ValidationError("unknown shape name: " + name);
}

struct RunRow {
    std::size_t n = 0;
    int d = 0;
    double gamma = 0.0;
    double hausdorff = 0.0;
    double boundary_hausdorff = 0.0;
    double symdiff = 0.0;
    double wall_seconds = 0.0;
};

struct RunReport {
    std::string config_echo;
    std::string version = kVersionTag;
    std::vector<RunRow> rows;
    double hausdorff_slope = std::numeric_limits<double>::quiet_NaN();
    double symdiff_slope = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> theoretical_delta_n;  // per row; empty unless theoretical rule
    std::vector<bool> theory_applicable;      // n >= n0 per row
};

inline void write_run_report(const RunReport& rep, std::ostream& os) {
    os << "run-report " << rep.version << "\n";
    os << "config " << rep.config_echo << "\n";
    os << "n,d,gamma,hausdorff,boundary_hausdorff,symdiff,wall_seconds\n";
    for (const RunRow& row : rep.rows)
        os << row.n << "," << row.d << "," << row.gamma << "," << row.hausdorff << ","
           << row.boundary_hausdorff << "," << row.symdiff << "," << row.wall_seconds << "\n";
    os << "hausdorff_slope " << rep.hausdorff_slope << "\n";
    os << "symdiff_slope " << rep.symdiff_slope << "\n";
}

namespace detail {

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline int pick_degree(const ExperimentConfig& config, std::size_t n) {
    switch (config.degree_rule) {
        case DegreeRule::Practical:
            return practical_degree(n);
        case DegreeRule::Fixed:
            return config.fixed_degree;
        case DegreeRule::Theoretical: {
            if (!config.scheme)
                throw ValidationError("theoretical degree rule needs scheme params");
            const SchemeOutputs out = select_scheme(n, *config.scheme);
            // Below-theory regime falls back to the practical rule, flagged in
            // the scheme outputs.
            return out.below_theory ? practical_degree(n) : out.d_n;
        }
    }
    return practical_degree(n);
}

}  // namespace detail

struct SyntheticSupportResult {
    RunReport report;
    Raster estimate_raster;     // at the largest n, first seed
    Raster truth_raster;
    std::vector<Polyline> contours;
};

/// Sample, fit, threshold by min-score (or the theoretical gamma), rasterize
/// and compare against the true shape, per n in the grid.
inline SyntheticSupportResult run_synthetic_support(const ExperimentConfig& config) {
    if (config.n_grid.empty()) throw ValidationError("run_synthetic_support: empty n grid");
    const ShapeSpec shape = make_named_shape(config.shape);
    auto [lo, hi] = shape.study_box();
    const Raster truth =
        rasterize([&](const Vector& x) { return shape.contains(x); }, lo, hi, config.resolution);

    SyntheticSupportResult result;
    result.truth_raster = truth;
    result.report.config_echo = config.echo();
    for (std::size_t n : config.n_grid) {
        const auto t0 = std::chrono::steady_clock::now();
        const Matrix sample = sample_shape(shape, n, config.sampler_r, config.seeds[0]);
        const int d = detail::pick_degree(config, n);
        ChristoffelModel model = fit(sample, d);
        double gamma = min_score_threshold(model, sample);
        if (config.degree_rule == DegreeRule::Theoretical && config.scheme) {
            const SchemeOutputs out = select_scheme(n, *config.scheme);
            if (!out.below_theory) gamma = out.gamma_n;
        }
        const Raster est = rasterize_batch(
            [&](const Matrix& pts) { return model.christoffel_batch(pts); }, gamma, lo, hi,
            config.resolution);
        const GeometryReport geo = compare_rasters(est, truth);
        const auto t1 = std::chrono::steady_clock::now();
        RunRow row;
        row.n = n;
        row.d = d;
        row.gamma = gamma;
        row.hausdorff = geo.hausdorff;
        row.boundary_hausdorff = geo.boundary_hausdorff;
        row.symdiff = geo.symdiff;
        row.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        result.report.rows.push_back(row);
        if (n == config.n_grid.back()) {
            result.estimate_raster = est;
            result.contours = contour_polylines(est);
        }
    }
    return result;
}

/// Per-n medians over seeds of the three divergences, with fitted log-log
/// slopes.  With the theoretical rule, delta_n and the n >= n0 flag are
/// reported per row.
inline RunReport run_convergence_study(const ExperimentConfig& config) {
    if (config.n_grid.size() < 2) throw ValidationError("run_convergence_study: need an n grid");
    const ShapeSpec shape = make_named_shape(config.shape);
    auto [lo, hi] = shape.study_box();
    const Raster truth =
        rasterize([&](const Vector& x) { return shape.contains(x); }, lo, hi, config.resolution);

    RunReport report;
    report.config_echo = config.echo();
    std::vector<double> ns, hs, sds;
    for (std::size_t n : config.n_grid) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> h, bh, sd;
        int d_used = 0;
        double gamma_used = 0.0;
        for (std::uint64_t seed : config.seeds) {
            const Matrix sample = sample_shape(shape, n, config.sampler_r, seed);
            const int d = detail::pick_degree(config, n);
            ChristoffelModel model = fit(sample, d);
            double gamma = min_score_threshold(model, sample);
            if (config.degree_rule == DegreeRule::Theoretical && config.scheme) {
                const SchemeOutputs out = select_scheme(n, *config.scheme);
                if (!out.below_theory) gamma = out.gamma_n;
            }
            const Raster est = rasterize_batch(
                [&](const Matrix& pts) { return model.christoffel_batch(pts); }, gamma, lo, hi,
                config.resolution);
            const GeometryReport geo = compare_rasters(est, truth);
            h.push_back(geo.hausdorff);
            bh.push_back(geo.boundary_hausdorff);
            sd.push_back(geo.symdiff);
            d_used = d;
            gamma_used = gamma;
        }
        const auto t1 = std::chrono::steady_clock::now();
        RunRow row;
        row.n = n;
        row.d = d_used;
        row.gamma = gamma_used;
        row.hausdorff = detail::median(h);
        row.boundary_hausdorff = detail::median(bh);
        row.symdiff = detail::median(sd);
        row.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        report.rows.push_back(row);
        ns.push_back(static_cast<double>(n));
        hs.push_back(row.hausdorff);
        sds.push_back(row.symdiff);
        if (config.degree_rule == DegreeRule::Theoretical && config.scheme) {
            const SchemeOutputs out = select_scheme(n, *config.scheme);
            report.theoretical_delta_n.push_back(out.below_theory
                                                     ? std::numeric_limits<double>::quiet_NaN()
                                                     : out.delta_n);
            report.theory_applicable.push_back(out.n_ge_n0);
        }
    }
    report.hausdorff_slope = detail::loglog_slope(ns, hs);
    report.symdiff_slope = detail::loglog_slope(ns, sds);
    return report;
}

// --- Concentration study -----------------------------------------------------

struct ConcentrationRow {
    std::size_t n = 0;
    double coverage = 0.0;        // fraction of reps with sup-rel-error <= bound
    double median_sup_rel = 0.0;
    double bound = 0.0;           // concentration bound with the Gegenbauer m
    std::size_t lemma_violations = 0;  // sup-rel-error > ||M-I|| + 1e-8
};

struct ConcentrationReport {
    std::string config_echo;
    std::string version = kVersionTag;
    std::vector<ConcentrationRow> rows;
    double median_slope = std::numeric_limits<double>::quiet_NaN();
};

/// Draw exact nu_r samples by rejection: uniform in the ball, thinned with
/// acceptance probability (1 - ||z||^2)^r.
inline Matrix sample_ball_jacobi(int p, int r, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
    Matrix out(static_cast<Eigen::Index>(n), p);
    Vector x(p);
    std::size_t k = 0;
    while (k < n) {
        for (int i = 0; i < p; ++i) x[i] = sym(rng);
        const double q = x.squaredNorm();
        if (q > 1.0) continue;
        if (r > 0 && unit(rng) > std::pow(1.0 - q, r)) continue;
        out.row(static_cast<Eigen::Index>(k++)) = x.transpose();
    }
    return out;
}

/// Evaluation grid: 50 points per axis over the ball of radius 0.95.
inline Matrix concentration_grid(int p) {
    const int per_axis = 50;
    std::vector<Vector> pts;
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    while (true) {
        Vector x(p);
        for (int i = 0; i < p; ++i)
            x[i] = -0.95 + 1.9 * idx[static_cast<std::size_t>(i)] / (per_axis - 1.0);
        if (x.norm() <= 0.95) pts.push_back(x);
        int axis = 0;
        while (axis < p && ++idx[static_cast<std::size_t>(axis)] == per_axis)
            idx[static_cast<std::size_t>(axis++)] = 0;
        if (axis == p) break;
    }
    Matrix grid(static_cast<Eigen::Index>(pts.size()), p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        grid.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
    return grid;
}

inline ConcentrationReport run_concentration_study(int p, int r, int d,
                                                   const std::vector<std::size_t>& n_grid,
                                                   int reps, double alpha,
                                                   std::uint64_t seed = 1) {
    if (reps < 1) throw ValidationError("run_concentration_study: reps must be >= 1");
    MonomialBasis basis(p, d);
    const double s = static_cast<double>(basis.size());
    const MomentMatrix pop = analytic_moment_matrix(p, d, r);
    const Matrix T = orthonormal_transform(pop);
    const Factorization pop_factor = factorize(pop, JitterPolicy::off());
    const Matrix grid = concentration_grid(p);

    // population Lambda on the grid
    Matrix V = basis.eval_monomials_batch(grid);
    Matrix W = V;
    pop_factor.L.triangularView<Eigen::Lower>().solveInPlace(W);
    const Vector lambda_pop = W.colwise().squaredNorm().cwiseInverse().transpose();

    const double m = gegenbauer_boundary_kernel(p, d, r);

    ConcentrationReport report;
    {
        std::ostringstream os;
        os << "p=" << p << " r=" << r << " d=" << d << " reps=" << reps << " alpha=" << alpha
           << " seed=" << seed;
        report.config_echo = os.str();
    }
    std::vector<double> ns, medians;
    for (std::size_t n : n_grid) {
        const double bound = concentration_bound(m, n, s, alpha);
        std::vector<double> sup_rels;
        std::size_t covered = 0, lemma_violations = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const std::uint64_t rep_seed = seed * 1000003ULL + n * 7919ULL + static_cast<std::uint64_t>(rep);
            const Matrix sample = sample_ball_jacobi(p, r, n, rep_seed);
            const MomentMatrix M = build_moment_matrix(sample, basis);
            MomentMatrix M_orth;
            M_orth.m = T * M.m * T.transpose();
            const double gap = technical_gap(M_orth);
            const Factorization f = factorize(M);
            Matrix W_emp = V;
            f.L.triangularView<Eigen::Lower>().solveInPlace(W_emp);
            const Vector lambda_emp = W_emp.colwise().squaredNorm().cwiseInverse().transpose();
            const double sup_rel =
                ((lambda_emp - lambda_pop).cwiseAbs().cwiseQuotient(lambda_pop)).maxCoeff();
            sup_rels.push_back(sup_rel);
            if (sup_rel <= bound) ++covered;
            if (sup_rel > gap + 1e-8) ++lemma_violations;
        }
        ConcentrationRow row;
        row.n = n;
        row.coverage = static_cast<double>(covered) / reps;
        row.median_sup_rel = detail::median(sup_rels);
        row.bound = bound;
        row.lemma_violations = lemma_violations;
        report.rows.push_back(row);
        ns.push_back(static_cast<double>(n));
        medians.push_back(row.median_sup_rel);
    }
    if (ns.size() >= 2) report.median_slope = detail::loglog_slope(ns, medians);
    return report;
}

inline void write_concentration_report(const ConcentrationReport& rep, std::ostream& os) {
    os << "concentration-report " << rep.version << "\n";
    os << "config " << rep.config_echo << "\n";
    os << "n,coverage,median_sup_rel,bound,lemma_violations\n";
    for (const ConcentrationRow& row : rep.rows)
        os << row.n << "," << row.coverage << "," << row.median_sup_rel << "," << row.bound << ","
           << row.lemma_violations << "\n";
    os << "median_slope " << rep.median_slope << "\n";
}

// --- Outlier benchmark -------------------------------------------------------

struct OutlierMethod {
    enum class Kind { Christoffel, KdeGaussian, KdeLaplace, Random } kind;
    int degree = 4;      // Christoffel
    double bandwidth = 0.5;  // KDE, as a multiple of the mean per-axis std
    std::uint64_t seed = 1;  // Random

    std::string name() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::Christoffel: os << "christoffel(d=" << degree << ")"; break;
            case Kind::KdeGaussian: os << "kde-gaussian(h=" << bandwidth << ")"; break;
            case Kind::KdeLaplace: os << "kde-laplace(h=" << bandwidth << ")"; break;
            case Kind::Random: os << "random"; break;
        }
        return os.str();
    }
};

/// Normality scores for the test set; higher means more normal.
inline std::vector<double> outlier_scores(const OutlierMethod& method, const Matrix& train,
                                          const Matrix& test) {
    std::vector<double> scores(static_cast<std::size_t>(test.rows()));
    switch (method.kind) {
        case OutlierMethod::Kind::Christoffel: {
            ChristoffelModel model = fit(train, method.degree);
            const Vector lam = model.christoffel_batch(test);
            for (Eigen::Index i = 0; i < test.rows(); ++i)
                scores[static_cast<std::size_t>(i)] = lam[i];
            break;
        }
        case OutlierMethod::Kind::KdeGaussian:
        case OutlierMethod::Kind::KdeLaplace: {
            const double std_scale =
                std::sqrt((train.rowwise() - train.colwise().mean()).array().square().colwise().mean().mean());
            const double h = method.bandwidth * std::max(std_scale, 1e-12);
            const KdeKernel kernel = method.kind == OutlierMethod::Kind::KdeGaussian
                                         ? KdeKernel::Gaussian
                                         : KdeKernel::Laplace;
            for (Eigen::Index i = 0; i < test.rows(); ++i)
                scores[static_cast<std::size_t>(i)] = kde_score(train, test.row(i).transpose(), kernel, h);
            break;
        }
        case OutlierMethod::Kind::Random: {
            std::mt19937_64 rng(method.seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (double& v : scores) v = unit(rng);
            break;
        }
    }
    return scores;
}

/// Precision at half: the half of the test set with the lowest scores is
/// predicted outlying; precision is the fraction of those that are labeled
/// outliers.  Only the ranking of scores matters.
inline double precision_at_half(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw ValidationError("precision_at_half: scores/labels mismatch");
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    const std::size_t k = scores.size() / 2;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]] == 1 ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

struct OutlierBenchRow {
    std::string method;
    double median_precision = 0.0;
    double q25 = 0.0, q75 = 0.0;
};

/// One labeled dataset, several random train/test splits: train on a random
/// subset of normals, test on the held-out normals plus all outliers.
inline std::vector<OutlierBenchRow> run_outlier_bench(const Dataset& data,
                                                      const std::vector<OutlierMethod>& methods,
                                                      int n_splits, std::uint64_t seed) {
    if (!data.has_labels()) throw ValidationError("run_outlier_bench: dataset has no labels");
    std::vector<std::size_t> normals, outliers;
    for (std::size_t i = 0; i < data.size(); ++i)
        (data.labels[i] == 1 ? outliers : normals).push_back(i);
    if (normals.empty() || outliers.empty())
        throw ValidationError("run_outlier_bench: need both labels present");

    std::vector<std::vector<double>> precisions(methods.size());
    for (int split = 0; split < n_splits; ++split) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(split));
        std::vector<std::size_t> shuffled = normals;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        // match the outlier count with held-out normals so the test is half/half
        const std::size_t held = std::min(outliers.size(), shuffled.size() / 2);
        const std::size_t n_train = shuffled.size() - held;
        Matrix train(static_cast<Eigen::Index>(n_train), data.dimension());
        for (std::size_t i = 0; i < n_train; ++i)
            train.row(static_cast<Eigen::Index>(i)) =
                data.points.row(static_cast<Eigen::Index>(shuffled[i]));
        const std::size_t n_test = held + outliers.size();
        Matrix test(static_cast<Eigen::Index>(n_test), data.dimension());
        std::vector<int> labels(n_test);
        for (std::size_t i = 0; i < held; ++i) {
            test.row(static_cast<Eigen::Index>(i)) =
                data.points.row(static_cast<Eigen::Index>(shuffled[n_train + i]));
            labels[i] = 0;
        }
        for (std::size_t i = 0; i < outliers.size(); ++i) {
            test.row(static_cast<Eigen::Index>(held + i)) =
                data.points.row(static_cast<Eigen::Index>(outliers[i]));
            labels[held + i] = 1;
        }
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            OutlierMethod method = methods[mi];
            if (method.kind == OutlierMethod::Kind::Random)
                method.seed = seed * 31 + static_cast<std::uint64_t>(split);
            precisions[mi].push_back(precision_at_half(outlier_scores(method, train, test), labels));
        }
    }
    std::vector<OutlierBenchRow> rows;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        std::vector<double> v = precisions[mi];
        std::sort(v.begin(), v.end());
        OutlierBenchRow row;
        row.method = methods[mi].name();
        row.median_precision = detail::median(v);
        row.q25 = v[v.size() / 4];
        row.q75 = v[(3 * v.size()) / 4];
        rows.push_back(row);
    }
    return rows;
}

inline void write_outlier_report(const std::vector<OutlierBenchRow>& rows, std::ostream& os) {
    os << "outlier-report " << kVersionTag << "\n";
    os << "method,median_precision,q25,q75\n";
    for (const OutlierBenchRow& row : rows)
        os << row.method << "," << row.median_precision << "," << row.q25 << "," << row.q75 << "\n";
}

// --- Synthetic benchmark generators ------------------------------------------

/// Separable benchmark: normals uniform on the unit disk, outliers on a ring
/// at distance >= 3.
inline Dataset make_separable_benchmark(std::size_t n_normal, std::size_t n_outlier,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
    Dataset ds;
    ds.points.resize(static_cast<Eigen::Index>(n_normal + n_outlier), 2);
    std::size_t k = 0;
    while (k < n_normal) {
        const double x = sym(rng), y = sym(rng);
        if (x * x + y * y > 1.0) continue;
        ds.points(static_cast<Eigen::Index>(k), 0) = x;
        ds.points(static_cast<Eigen::Index>(k), 1) = y;
        ds.labels.push_back(0);
        ++k;
    }
    for (std::size_t i = 0; i < n_outlier; ++i) {
        const double theta = 2.0 * M_PI * unit(rng);
        const double rad = 3.0 + unit(rng);
        ds.points(static_cast<Eigen::Index>(k), 0) = rad * std::cos(theta);
        ds.points(static_cast<Eigen::Index>(k), 1) = rad * std::sin(theta);
        ds.labels.push_back(1);
        ++k;
    }
    return ds;
}

/// Synthetic surrogate for a labeled 6-dimensional benchmark with ~2.5%
/// outliers: normals standard Gaussian, outliers on a distant shell.
inline Dataset make_labeled_surrogate(std::size_t n, int p, double outlier_fraction,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n_out = static_cast<std::size_t>(std::llround(outlier_fraction * n));
    Dataset ds;
    ds.points.resize(static_cast<Eigen::Index>(n), p);
    for (std::size_t i = 0; i < n; ++i) {
        Vector x(p);
        for (int j = 0; j < p; ++j) x[j] = gauss(rng);
        if (i < n - n_out) {
            ds.labels.push_back(0);
        } else {
            x *= (6.0 + 2.0 * unit(rng)) / std::max(x.norm(), 1e-12);
            ds.labels.push_back(1);
        }
        ds.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
    return ds;
}

}  // namespace chsup
