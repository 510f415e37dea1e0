#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace omtnet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Bad or inconsistent user input (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parameters outside the physical operating regime: instability,
/// multistability, adiabaticity violations (CLI exit code 3).
struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular matrix, non-convergence, truncation leak
/// (CLI exit code 4).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-fatal diagnostics (validity-regime warnings). The sink is
/// thread-local so concurrent sweep workers do not interleave.
inline thread_local std::function<void(const std::string&)> warning_sink;

inline void warn(const std::string& msg) {
    if (warning_sink) warning_sink(msg);
}

inline void require_finite(const CMatrix& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

}  // namespace omtnet
