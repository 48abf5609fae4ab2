#ifndef POTKERN_CORE_HPP
#define POTKERN_CORE_HPP

/**
 * @file core.hpp
 * @brief Scalar/matrix aliases and the error hierarchy shared by every potkern module.
 */

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace potkern {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Complex samples of a function on the full boundary grid, indexed by global node.
using BoundaryFunction = CVector;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Exit-code class of an error, as reported by the CLI.
enum class ErrorClass { input = 2, numeric = 1 };

/**
 * @brief Base error. Carries a short machine-readable code (e.g. "curves-intersect")
 *        and optionally the index of the curve it concerns.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& what, std::optional<int> curve = {})
        : std::runtime_error(what), class_(cls), code_(std::move(code)), curve_(curve) {}

    ErrorClass error_class() const noexcept { return class_; }
    const std::string& code() const noexcept { return code_; }
    std::optional<int> curve() const noexcept { return curve_; }

private:
    ErrorClass class_;
    std::string code_;
    std::optional<int> curve_;
};

/// Invalid domain geometry or a point in the wrong place (outside, on the boundary).
class GeometryError : public Error {
public:
    GeometryError(std::string code, const std::string& what, std::optional<int> curve = {})
        : Error(ErrorClass::input, std::move(code), what, curve) {}
};

/// Malformed input files or arguments.
class InputError : public Error {
public:
    InputError(std::string code, const std::string& what)
        : Error(ErrorClass::input, std::move(code), what) {}
};

/// Singular systems, failed zero localisation, conditioning failures.
class NumericError : public Error {
public:
    NumericError(std::string code, const std::string& what)
        : Error(ErrorClass::numeric, std::move(code), what) {}
};

inline double max_abs(const CVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace potkern

#endif // POTKERN_CORE_HPP
