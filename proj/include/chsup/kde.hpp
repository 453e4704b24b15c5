#pragma once

// Kernel density baseline for the outlier benchmark.

#include <cmath>

#include "chsup/common.hpp"

namespace chsup {

enum class KdeKernel { Gaussian, Laplace };

/// (1/n) sum_i K_h(x - X_i) with
///   gaussian: (2 pi h^2)^{-p/2} exp(-||u||^2 / (2 h^2))
///   laplace:  (2h)^{-p} exp(-||u||_1 / h)
inline double kde_score(const Matrix& train, const Vector& x, KdeKernel kernel, double h) {
    if (h <= 0) throw ValidationError("kde_score: bandwidth must be > 0");
    if (train.cols() != x.size()) throw ValidationError("kde_score: dimension mismatch");
    const double p = static_cast<double>(train.cols());
    double acc = 0.0;
    if (kernel == KdeKernel::Gaussian) {
        const double norm = std::pow(2.0 * M_PI * h * h, -p / 2.0);
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            const double d2 = (train.row(i).transpose() - x).squaredNorm();
            acc += norm * std::exp(-d2 / (2.0 * h * h));
        }
    } else {
        const double norm = std::pow(2.0 * h, -p);
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            const double d1 = (train.row(i).transpose() - x).cwiseAbs().sum();
            acc += norm * std::exp(-d1 / h);
        }
    }
    return acc / static_cast<double>(train.rows());
}

}  // namespace chsup
