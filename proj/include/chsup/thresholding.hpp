#pragma once

// Scheme constants and the (d_n, gamma_n) selection rule, plus support
// estimates as Christoffel sublevel sets.

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "chsup/christoffel.hpp"
#include "chsup/common.hpp"
#include "chsup/oracles.hpp"

namespace chsup {

// Geometry and density constants driving the selection rule.
struct SchemeParams {
    int p;          // ambient dimension
    double r;       // density-decay exponent, >= 0
    double C;       // density-decay constant, > 0
    double R;       // rolling-ball radius, > 0
    double eps;     // rate slack, in (0,1)
    double alpha;   // risk level, in (0,1)
    double diamS;   // diameter of the support, > 0

    SchemeParams(int p_, double r_, double C_, double R_, double eps_, double alpha_,
                 double diamS_)
        : p(p_), r(r_), C(C_), R(R_), eps(eps_), alpha(alpha_), diamS(diamS_) {
        if (p < 1) throw ValidationError("SchemeParams: p must be >= 1");
        if (r < 0) throw ValidationError("SchemeParams: r must be >= 0");
        if (C <= 0) throw ValidationError("SchemeParams: C must be > 0");
        if (R <= 0) throw ValidationError("SchemeParams: R must be > 0");
        if (eps <= 0 || eps >= 1) throw ValidationError("SchemeParams: eps must be in (0,1)");
        if (alpha <= 0 || alpha >= 1)
            throw ValidationError("SchemeParams: alpha must be in (0,1)");
        if (diamS <= 0) throw ValidationError("SchemeParams: diamS must be > 0");
    }
};

/// The two-bracket constant C_{p,r,alpha}.  Throws on floating overflow; the
/// exp((p+2r+1)^2) term makes the value astronomically large well before that.
inline double C_pra(int p, double r, double alpha) {
    if (alpha <= 0 || alpha >= 1) throw ValidationError("C_pra: alpha must be in (0,1)");
    const double k = p + 2.0 * r + 1.0;
    const double term1 =
        std::pow(2.0, p + 1.0) * c_r_constant(p, r) * std::pow(M_E / k, k) * std::exp(k * k);
    const double term2 = std::pow(4.0, p) * (p + 2.0) * (p + 3.0) * (p + 8.0) /
                         (24.0 * omega_p(p)) * std::pow(M_E / p, p) *
                         std::exp(static_cast<double>(p) * p);
    const double tail = p + p * (1.0 - std::log(static_cast<double>(p))) +
                        static_cast<double>(p) * p - std::log(alpha);
    const double value = std::pow(4.0, r + 2.0) / 3.0 * (term1 + term2) * tail;
    if (!std::isfinite(value)) throw ValidationError("C_pra: value overflows double range");
    return value;
}

/// The bounded, d-decreasing factor E_{p,r,eps}(d, beta) of the inside radius.
inline double scheme_E(const SchemeParams& params, int d, double beta) {
    const double p = params.p, r = params.r, eps = params.eps;
    const double a = std::pow((1.0 + beta) * (p + 2.0) * (p + 3.0) * (p + 8.0) /
                                  (3.0 * params.C * (1.0 - beta) * omega_p(params.p)),
                              1.0 / (p + r));
    const double b = std::pow((3.0 * p * (2.0 - eps) + 3.0 * (1.0 - eps) * r) / (2.0 * eps * M_E),
                              (p * (2.0 - eps) + (1.0 - eps) * r) / (eps * (p + r)));
    const double c = std::pow(std::exp(1.0 + p / static_cast<double>(d)) / p, p / (p + r));
    return a * b * c;
}

inline double scheme_delta1(const SchemeParams& params, int d) {
    return params.diamS / (std::pow(d, 1.0 - params.eps) - 1.0);
}

inline double scheme_delta2(const SchemeParams& params, int d, double beta) {
    return 2.0 / std::pow(d, 1.0 - params.eps) * scheme_E(params, d, beta);
}

/// gamma_d of the fixed-degree scheme, 8(1+beta) (.)^(.) / d^(.).
inline double scheme_gamma_d(const SchemeParams& params, int d, double beta) {
    const double p = params.p, r = params.r, eps = params.eps;
    const double expo = p * (2.0 - eps) + (1.0 - eps) * r;
    return 8.0 * (1.0 + beta) *
           std::pow((3.0 * p * (2.0 - eps) + 3.0 * (1.0 - eps) * r) / (2.0 * eps * M_E),
                    expo / eps) /
           std::pow(d, expo);
}

struct SchemeOutputs {
    int d_n = 0;
    double gamma_n = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta_n = 0.0;
    double n0 = 0.0;
    double n1 = 0.0;
    double C_pra = 0.0;
    double m_bound = 0.0;  // sup-kernel bound at d_n, NaN below theory
    bool below_theory = false;
    bool n_ge_n0 = false;
    bool n_ge_n1 = false;
};

inline SchemeOutputs select_scheme(std::size_t n, const SchemeParams& params) {
    if (n < 1) throw ValidationError("select_scheme: n must be >= 1");
    SchemeOutputs out;
    out.C_pra = C_pra(params.p, params.r, params.alpha);
    const double scale = params.C * std::pow(params.R, params.p + params.r) / (4.0 * out.C_pra);
    const double expo = 1.0 / (params.p + 2.0 * params.r + 2.0);
    out.d_n = static_cast<int>(std::floor(std::pow(scale * static_cast<double>(n), expo)));

    const double E1 = scheme_E(params, 1, 0.5);
    const double D = std::max({2.0, std::pow(params.diamS / params.R + 1.0, 1.0 / (1.0 - params.eps)),
                               std::pow(2.0 / params.R * E1, 1.0 / (1.0 - params.eps))});
    out.n0 = std::pow(D + 1.0, params.p + 2.0 * params.r + 2.0) / scale;
    out.n1 = std::pow(2.0, params.p + 2.0 * params.r + 2.0) / scale;
    out.n_ge_n0 = static_cast<double>(n) >= out.n0;
    out.n_ge_n1 = static_cast<double>(n) >= out.n1;

    if (out.d_n <= 1) {
        out.below_theory = true;
        out.gamma_n = std::numeric_limits<double>::quiet_NaN();
        out.delta1 = out.delta2 = out.delta_n = std::numeric_limits<double>::quiet_NaN();
        out.m_bound = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    // gamma_n = gamma_d at beta = 1/2, i.e. the leading 12 = 8 * 3/2.
    out.gamma_n = scheme_gamma_d(params, out.d_n, 0.5);
    out.delta1 = scheme_delta1(params, out.d_n);
    out.delta2 = scheme_delta2(params, out.d_n, 0.5);
    out.delta_n = std::max(out.delta1, out.delta2);
    out.m_bound = sup_kernel_bound(out.d_n, params.p, params.r, params.C, params.R);
    return out;
}

/// Practical degree rule: largest d with d^4 <= 16 n, i.e. floor(2 n^{1/4})
/// computed exactly in integer arithmetic.
inline int practical_degree(std::size_t n) {
    if (n < 1) throw ValidationError("practical_degree: n must be >= 1");
    int d = static_cast<int>(std::floor(2.0 * std::pow(static_cast<double>(n), 0.25)));
    auto fits = [n](int k) {
        return k >= 0 && static_cast<unsigned __int128>(k) * k * k * k <=
                             static_cast<unsigned __int128>(16) * n;
    };
    while (!fits(d)) --d;
    while (fits(d + 1)) ++d;
    return d;
}

/// min_i Lambda(X_i): thresholding at this value keeps every sample point in
/// the estimate.
inline double min_score_threshold(const ChristoffelModel& model, const Matrix& sample) {
    if (sample.rows() < 1) throw ValidationError("min_score_threshold: empty sample");
    return model.christoffel_batch(sample).minCoeff();
}

// Closed sublevel-set estimate {x : Lambda(x) >= gamma}.
class SupportEstimate {
public:
    SupportEstimate(ChristoffelModel model, double gamma)
        : model_(std::move(model)), gamma_(gamma) {
        if (gamma_ <= 0) throw ValidationError("SupportEstimate: gamma must be > 0");
    }

    const ChristoffelModel& model() const { return model_; }
    double gamma() const { return gamma_; }

    bool contains(const Vector& x) const { return model_.christoffel(x) >= gamma_; }

private:
    ChristoffelModel model_;
    double gamma_;
};

inline SupportEstimate estimate_support(ChristoffelModel model, double gamma) {
    return SupportEstimate(std::move(model), gamma);
}

// --- Config-file and report I/O ---------------------------------------------

/// Parse "key = value" lines (# comments, blank lines allowed) into
/// SchemeParams.  Keys: p, r, C, R, eps, alpha, diamS.
inline SchemeParams parse_scheme_params(std::istream& is) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ValidationError("scheme config: expected key=value at line " +
                                      std::to_string(lineno));
            continue;
        }
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        try {
            kv[key] = std::stod(line.substr(eq + 1));
        } catch (...) {
            throw ValidationError("scheme config: bad numeric value at line " +
                                  std::to_string(lineno));
        }
    }
    for (const char* req : {"p", "r", "C", "R", "eps", "alpha", "diamS"})
        if (!kv.count(req))
            throw ValidationError(std::string("scheme config: missing key ") + req);
    return SchemeParams(static_cast<int>(kv["p"]), kv["r"], kv["C"], kv["R"], kv["eps"],
                        kv["alpha"], kv["diamS"]);
}

inline void write_scheme_report(const SchemeOutputs& out, std::size_t n, std::ostream& os) {
    os << "scheme-report " << kVersionTag << "\n";
    os << "n " << n << "\n";
    os << "d_n " << out.d_n << "\n";
    os << "gamma_n " << out.gamma_n << "\n";
    os << "delta1 " << out.delta1 << "\n";
    os << "delta2 " << out.delta2 << "\n";
    os << "delta_n " << out.delta_n << "\n";
    os << "n0 " << out.n0 << "\n";
    os << "n1 " << out.n1 << "\n";
    os << "C_pra " << out.C_pra << "\n";
    os << "m_bound " << out.m_bound << "\n";
    os << "below_theory " << (out.below_theory ? 1 : 0) << "\n";
    os << "n_ge_n0 " << (out.n_ge_n0 ? 1 : 0) << "\n";
    os << "n_ge_n1 " << (out.n_ge_n1 ? 1 : 0) << "\n";
}

}  // namespace chsup
