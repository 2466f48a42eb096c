#pragma once

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "tasep/common.hpp"

namespace tasep {

/// A complex number held as log|z| and a unit phase, so long products of
/// small or large factors do not over- or underflow before they are combined.
struct LogValue {
    double log_abs = 0.0;
    cplx phase{1.0, 0.0};

    static LogValue of(cplx z) {
        const double mag = std::abs(z);
        if (mag == 0.0) {
            return {-std::numeric_limits<double>::infinity(), cplx{0.0, 0.0}};
        }
        return {std::log(mag), z / mag};
    }

    LogValue &operator*=(const LogValue &o) {
        log_abs += o.log_abs;
        phase *= o.phase;
        return *this;
    }
    LogValue &operator/=(const LogValue &o) {
        log_abs -= o.log_abs;
        phase /= o.phase;
        return *this;
    }
    LogValue &operator*=(cplx z) { return *this *= of(z); }
    LogValue &operator/=(cplx z) { return *this /= of(z); }

    friend LogValue operator*(LogValue a, const LogValue &b) { return a *= b; }
    friend LogValue operator/(LogValue a, const LogValue &b) { return a /= b; }

    cplx value() const {
        if (phase == cplx{0.0, 0.0}) {
            return {0.0, 0.0};
        }
        return std::exp(log_abs) * phase;
    }
};

struct Determinant {
    LogValue det;
    double rcond = 1.0; // reciprocal condition estimate; 0 for a singular matrix

    // Rough bound on the relative error of det.
    double relative_error_estimate(Eigen::Index n) const {
        if (rcond <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return static_cast<double>(n) * std::numeric_limits<double>::epsilon() / rcond;
    }
};

/// Determinant by LU with partial pivoting. The empty matrix has determinant one.
inline Determinant lu_determinant(const ComplexMatrix &a) {
    Determinant result;
    if (a.rows() != a.cols()) {
        throw DomainError("lu_determinant: matrix is not square");
    }
    if (a.rows() == 0) {
        return result;
    }
    const Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const auto &packed = lu.matrixLU();
    for (Eigen::Index i = 0; i < packed.rows(); ++i) {
        result.det *= packed(i, i);
    }
    if (lu.permutationP().determinant() < 0) {
        result.det.phase = -result.det.phase;
    }
    result.rcond = result.det.phase == cplx{0.0, 0.0} ? 0.0 : lu.rcond();
    return result;
}

} // namespace tasep
