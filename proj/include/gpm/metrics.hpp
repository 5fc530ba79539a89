#pragma once

#include "gpm/error.hpp"
#include "gpm/linalg.hpp"
#include "gpm/snapshots.hpp"

#include <string>
#include <vector>

namespace gpm {

/// Relative errors of an approximate snapshot matrix against a reference.
struct ErrorSeries {
    std::vector<double> per_snapshot;  ///< ||u~_i - u_i|| / ||u_i|| per time column
    double frobenius = 0.0;            ///< ||S~ - S||_F / ||S||_F
};

inline constexpr double kMinReferenceNorm = 1e-300;

namespace detail {

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ParameterError(std::string(who) + ": shape mismatch (" + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()) + ")");
    }
}

}  // namespace detail

inline std::vector<double> l2_error_series(const Matrix& approx, const Matrix& reference) {
    detail::require_same_shape(approx, reference, "l2_error_series");
    std::vector<double> out(static_cast<std::size_t>(reference.cols()));
    for (Eigen::Index k = 0; k < reference.cols(); ++k) {
        const double denom = reference.col(k).norm();
        if (!(denom > kMinReferenceNorm)) {
            throw DivisionDomainError("l2_error_series: reference column " + std::to_string(k) +
                                          " has zero norm",
                                      k);
        }
        out[static_cast<std::size_t>(k)] = (approx.col(k) - reference.col(k)).norm() / denom;
    }
    return out;
}

inline std::vector<double> l2_error_series(const SnapshotMatrix& approx, const SnapshotMatrix& reference) {
    return l2_error_series(approx.data(), reference.data());
}

inline double frobenius_error(const Matrix& approx, const Matrix& reference) {
    detail::require_same_shape(approx, reference, "frobenius_error");
    const double denom = reference.norm();
    if (!(denom > kMinReferenceNorm)) {
        throw DivisionDomainError("frobenius_error: reference matrix has zero norm", -1);
    }
    return (approx - reference).norm() / denom;
}

inline double frobenius_error(const SnapshotMatrix& approx, const SnapshotMatrix& reference) {
    return frobenius_error(approx.data(), reference.data());
}

inline ErrorSeries error_series(const Matrix& approx, const Matrix& reference) {
    return {l2_error_series(approx, reference), frobenius_error(approx, reference)};
}

}  // namespace gpm
