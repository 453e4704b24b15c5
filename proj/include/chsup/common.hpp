#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace chsup {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersionTag = "chsup-0.1.0";

// Validation failures: bad arguments, malformed files, range violations.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failures at runtime: singular matrices, degenerate samples.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class SizeOverflowError : public ValidationError {
public:
    explicit SizeOverflowError(const std::string& what) : ValidationError(what) {}
};

class DegenerateSampleError : public NumericalError {
public:
    explicit DegenerateSampleError(const std::string& what) : NumericalError(what) {}
};

class SingularMomentMatrixError : public NumericalError {
public:
    explicit SingularMomentMatrixError(const std::string& what) : NumericalError(what) {}
};

}  // namespace chsup
