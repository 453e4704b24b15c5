// Command-line front end: fit/score/estimate plus the bound-verification and
// study drivers.  Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chsup/christoffel.hpp"
#include "chsup/csv.hpp"
#include "chsup/experiments.hpp"
#include "chsup/geometry.hpp"
#include "chsup/oracles.hpp"
#include "chsup/thresholding.hpp"

namespace {

using namespace chsup;

std::string default_out_dir() {
    const char* env = std::getenv("CHSUP_OUT_DIR");
    return env && *env ? env : ".";
}

std::string join_out(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open output file " + path);
    return os;
}

SchemeParams load_scheme(const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is) throw ValidationError("cannot open scheme config " + config_path);
    return parse_scheme_params(is);
}

int cmd_fit(const std::string& input, bool header, int degree, bool no_standardize,
            const std::string& out) {
    const Dataset data = ingest_csv(input, header);
    FitOptions options;
    options.standardize = !no_standardize;
    const ChristoffelModel model = fit(data.points, degree, options);
    std::ofstream os = open_out(out);
    save_model(model, os);
    std::cout << "fit: n=" << data.size() << " p=" << data.dimension() << " d=" << degree
              << " s=" << model.basis().size() << " jitter=" << model.jitter() << " -> " << out
              << "\n";
    if (model.rank_warning())
        std::cout << "warning: n < s(d), moment matrix is rank deficient; jitter was applied\n";
    return 0;
}

int cmd_score(const std::string& model_path, const std::string& input, bool header,
              const std::string& out) {
    std::ifstream ms(model_path);
    if (!ms) throw ValidationError("cannot open model file " + model_path);
    const ChristoffelModel model = load_model(ms);
    const Dataset data = ingest_csv(input, header);
    const Vector lambda = model.christoffel_batch(data.points);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file = open_out(out);
        os = &file;
    }
    (*os) << "lambda\n";
    for (Eigen::Index i = 0; i < lambda.size(); ++i) (*os) << lambda[i] << "\n";
    return 0;
}

int cmd_estimate(const std::string& model_path, const std::string& gamma_spec,
                 const std::string& train_path, bool header, const std::string& box_spec,
                 int res, const std::string& contours_out, const std::string& raster_out) {
    std::ifstream ms(model_path);
    if (!ms) throw ValidationError("cannot open model file " + model_path);
    const ChristoffelModel model = load_model(ms);
    if (model.basis().dimension() != 2)
        throw ValidationError("estimate: contour extraction needs 2-D data");

    Dataset train;
    const bool have_train = !train_path.empty();
    if (have_train) train = ingest_csv(train_path, header);

    double gamma = 0.0;
    if (gamma_spec == "auto") {
        if (!have_train)
            throw ValidationError("estimate: --gamma auto needs --train with the fitting sample");
        gamma = min_score_threshold(model, train.points);
    } else {
        try {
            gamma = std::stod(gamma_spec);
        } catch (...) {
            throw ValidationError("estimate: --gamma must be a number or 'auto'");
        }
        if (gamma <= 0) throw ValidationError("estimate: gamma must be > 0");
    }

    Vector lo(2), hi(2);
    if (box_spec == "auto") {
        if (!have_train)
            throw ValidationError("estimate: --box auto needs --train with the fitting sample");
        const Vector mn = train.points.colwise().minCoeff().transpose();
        const Vector mx = train.points.colwise().maxCoeff().transpose();
        const Vector pad = 0.5 * (mx - mn).cwiseMax(1e-6);
        lo = mn - pad;
        hi = mx + pad;
    } else {
        std::stringstream ss(box_spec);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 4)
            throw ValidationError("estimate: --box expects xmin,ymin,xmax,ymax or 'auto'");
        lo << vals[0], vals[1];
        hi << vals[2], vals[3];
    }

    const Raster raster = rasterize_batch(
        [&](const Matrix& pts) { return model.christoffel_batch(pts); }, gamma, lo, hi, res);
    const std::vector<Polyline> rings = contour_polylines(raster);
    if (!contours_out.empty()) {
        std::ofstream os = open_out(contours_out);
        write_polylines_csv(rings, os);
    }
    if (!raster_out.empty()) {
        std::ofstream os = open_out(raster_out);
        write_occupied_centers_csv(raster, os);
    }
    std::cout << "estimate: gamma=" << gamma << " occupied_cells=" << raster.occupied_count()
              << " rings=" << rings.size() << "\n";
    return 0;
}

int cmd_verify_bounds(const std::string& out_dir) {
    const std::vector<BoundReport> reports = inequality_suite();
    std::size_t failures = 0;
    std::ofstream os = open_out(join_out(out_dir, "bound_report.csv"));
    os << "name,inputs,measured,bound,satisfied,slack\n";
    for (const BoundReport& rep : reports) {
        os << rep.name << "," << rep.inputs << "," << rep.measured << "," << rep.bound << ","
           << (rep.satisfied ? 1 : 0) << "," << rep.slack << "\n";
        if (!rep.satisfied) {
            ++failures;
            std::cout << "FAIL " << rep.name << " " << rep.inputs << "\n";
        }
    }
    std::cout << "verify-bounds: " << reports.size() - failures << "/" << reports.size()
              << " satisfied\n";
    return failures == 0 ? 0 : 2;
}

ExperimentConfig build_config(const std::string& shape, const std::vector<std::size_t>& n_grid,
                              const std::vector<std::uint64_t>& seeds, const std::string& rule,
                              int fixed_d, const std::string& scheme_config, int res) {
    ExperimentConfig config;
    config.shape = shape;
    config.n_grid = n_grid;
    if (!seeds.empty()) config.seeds = seeds;
    config.resolution = res;
    if (rule == "practical") {
        config.degree_rule = DegreeRule::Practical;
    } else if (rule == "fixed") {
        config.degree_rule = DegreeRule::Fixed;
        config.fixed_degree = fixed_d;
    } else if (rule == "theoretical") {
        config.degree_rule = DegreeRule::Theoretical;
        if (scheme_config.empty())
            throw ValidationError("theoretical degree rule needs --scheme-config");
        config.scheme = load_scheme(scheme_config);
    } else {
        throw ValidationError("unknown degree rule: " + rule);
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Support estimation via Christoffel function sublevel sets"};
    app.require_subcommand(1);

    std::string out_dir = default_out_dir();
    app.add_option("--out-dir", out_dir, "output directory (default: $CHSUP_OUT_DIR or .)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a model from a CSV sample");
    std::string fit_input, fit_out = "model.txt";
    bool fit_header = false, fit_no_std = false;
    int fit_degree = 4;
    fit_cmd->add_option("--input", fit_input, "input CSV")->required();
    fit_cmd->add_flag("--header", fit_header, "input has a header row");
    fit_cmd->add_option("--degree", fit_degree, "polynomial degree")->check(CLI::NonNegativeNumber);
    fit_cmd->add_flag("--no-standardize", fit_no_std, "skip whitening");
    fit_cmd->add_option("--out", fit_out, "model output file");

    // score
    auto* score_cmd = app.add_subcommand("score", "evaluate a model on query points");
    std::string score_model, score_input, score_out;
    bool score_header = false;
    score_cmd->add_option("--model", score_model, "model file")->required();
    score_cmd->add_option("--input", score_input, "query CSV")->required();
    score_cmd->add_flag("--header", score_header, "input has a header row");
    score_cmd->add_option("--out", score_out, "write scores here instead of stdout");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "rasterize a sublevel-set estimate (2-D)");
    std::string est_model, est_gamma = "auto", est_train, est_box = "auto", est_contours,
                est_raster;
    bool est_header = false;
    int est_res = 256;
    est_cmd->add_option("--model", est_model, "model file")->required();
    est_cmd->add_option("--gamma", est_gamma, "threshold value or 'auto' (min training score)");
    est_cmd->add_option("--train", est_train, "training CSV (needed for auto gamma/box)");
    est_cmd->add_flag("--header", est_header, "training CSV has a header row");
    est_cmd->add_option("--box", est_box, "xmin,ymin,xmax,ymax or 'auto'");
    est_cmd->add_option("--res", est_res, "raster resolution per axis")->check(CLI::PositiveNumber);
    est_cmd->add_option("--contours", est_contours, "contour CSV output (x,y,ring)");
    est_cmd->add_option("--raster", est_raster, "occupied-cell-centers CSV output");

    // verify-bounds
    app.add_subcommand("verify-bounds", "run the deterministic inequality suite");

    // convergence-study
    auto* conv_cmd = app.add_subcommand("convergence-study", "divergences vs n with slopes");
    std::string conv_shape = "disk", conv_rule = "practical", conv_scheme;
    std::vector<std::size_t> conv_n = {500, 2000, 8000, 32000};
    std::vector<std::uint64_t> conv_seeds = {1, 2, 3, 4, 5};
    int conv_fixed = 4, conv_res = 256;
    conv_cmd->add_option("--shape", conv_shape, "disk | annulus | four");
    conv_cmd->add_option("--n", conv_n, "sample-size grid");
    conv_cmd->add_option("--seeds", conv_seeds, "seeds (median across them)");
    conv_cmd->add_option("--degree-rule", conv_rule, "practical | fixed | theoretical");
    conv_cmd->add_option("--fixed-degree", conv_fixed, "degree for the fixed rule");
    conv_cmd->add_option("--scheme-config", conv_scheme, "key=value file for theoretical rule");
    conv_cmd->add_option("--res", conv_res, "raster resolution")->check(CLI::PositiveNumber);

    // concentration-study
    auto* conc_cmd = app.add_subcommand("concentration-study", "Monte-Carlo coverage study");
    int conc_p = 2, conc_r = 0, conc_d = 3, conc_reps = 100;
    double conc_alpha = 0.1;
    std::vector<std::size_t> conc_n = {1000, 10000};
    std::uint64_t conc_seed = 1;
    conc_cmd->add_option("--p", conc_p, "dimension")->check(CLI::PositiveNumber);
    conc_cmd->add_option("--r", conc_r, "density-decay exponent")->check(CLI::NonNegativeNumber);
    conc_cmd->add_option("--d", conc_d, "degree")->check(CLI::NonNegativeNumber);
    conc_cmd->add_option("--n", conc_n, "sample-size grid");
    conc_cmd->add_option("--reps", conc_reps, "replicates per n")->check(CLI::PositiveNumber);
    conc_cmd->add_option("--alpha", conc_alpha, "risk level");
    conc_cmd->add_option("--seed", conc_seed, "master seed");

    // outlier-bench
    auto* out_cmd = app.add_subcommand("outlier-bench", "precision-at-half benchmark");
    std::string bench_input, bench_kind = "separable";
    bool bench_header = false;
    int bench_splits = 10, bench_degree = 4;
    std::uint64_t bench_seed = 1;
    out_cmd->add_option("--input", bench_input,
                        "labeled CSV (last column 0/1); omit to use a generated benchmark");
    out_cmd->add_flag("--header", bench_header, "input has a header row");
    out_cmd->add_option("--benchmark", bench_kind, "separable | surrogate (when no --input)");
    out_cmd->add_option("--splits", bench_splits, "train/test splits")->check(CLI::PositiveNumber);
    out_cmd->add_option("--degree", bench_degree, "Christoffel degree");
    out_cmd->add_option("--seed", bench_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_input, fit_header, fit_degree, fit_no_std,
                                              fit_out);
        if (score_cmd->parsed())
            return cmd_score(score_model, score_input, score_header, score_out);
        if (est_cmd->parsed())
            return cmd_estimate(est_model, est_gamma, est_train, est_header, est_box, est_res,
                                est_contours, est_raster);
        if (app.get_subcommand("verify-bounds")->parsed()) return cmd_verify_bounds(out_dir);
        if (conv_cmd->parsed()) {
            const ExperimentConfig config = build_config(conv_shape, conv_n, conv_seeds,
                                                         conv_rule, conv_fixed, conv_scheme,
                                                         conv_res);
            const RunReport report = run_convergence_study(config);
            std::ofstream os = open_out(join_out(out_dir, "convergence_report.txt"));
            write_run_report(report, os);
            write_run_report(report, std::cout);
            return 0;
        }
        if (conc_cmd->parsed()) {
            const ConcentrationReport report = run_concentration_study(
                conc_p, conc_r, conc_d, conc_n, conc_reps, conc_alpha, conc_seed);
            std::ofstream os = open_out(join_out(out_dir, "concentration_report.txt"));
            write_concentration_report(report, os);
            write_concentration_report(report, std::cout);
            return 0;
        }
        if (out_cmd->parsed()) {
            Dataset data;
            if (!bench_input.empty()) {
                data = ingest_csv(bench_input, bench_header, true);
            } else if (bench_kind == "separable") {
                data = make_separable_benchmark(600, 100, bench_seed);
            } else if (bench_kind == "surrogate") {
                data = make_labeled_surrogate(3772, 6, 0.025, bench_seed);
            } else {
                throw ValidationError("unknown benchmark kind: " + bench_kind);
            }
            std::vector<OutlierMethod> methods = {
                {OutlierMethod::Kind::Christoffel, bench_degree, 0.5, bench_seed},
                {OutlierMethod::Kind::KdeGaussian, 0, 0.2, bench_seed},
                {OutlierMethod::Kind::KdeLaplace, 0, 0.2, bench_seed},
                {OutlierMethod::Kind::Random, 0, 0.0, bench_seed},
            };
            const std::vector<OutlierBenchRow> rows =
                run_outlier_bench(data, methods, bench_splits, bench_seed);
            std::ofstream os = open_out(join_out(out_dir, "outlier_report.csv"));
            write_outlier_report(rows, os);
            write_outlier_report(rows, std::cout);
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
