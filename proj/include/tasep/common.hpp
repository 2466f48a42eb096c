#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tasep {

using cplx = std::complex<double>;

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Error hierarchy. Callers that need to distinguish numerical failures from
// bad input catch the concrete types; everything derives from Error.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class ConvergenceError : public Error {
  public:
    using Error::Error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

// Shared tolerance policy.
namespace tol {
inline constexpr double spectral = 1e-8;
inline constexpr double semigroup = 1e-12;
inline constexpr double poisson_tail = 1e-14;
inline constexpr double bethe_residual = 1e-10;
inline constexpr double imag_leak = 1e-8;
} // namespace tol

inline bool near_equal(cplx a, cplx b, double rel) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= rel * scale;
}

// Integer power by squaring; negative exponents invert the result.
template <typename T> T ipow(T base, long long e) {
    if (e < 0) {
        return T{1} / ipow(base, -e);
    }
    T result{1};
    while (e > 0) {
        if (e & 1) {
            result *= base;
        }
        base *= base;
        e >>= 1;
    }
    return result;
}

} // namespace tasep
