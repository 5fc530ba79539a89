#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace gpm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD M = U diag(s) V^T with s non-increasing.
///
/// Each left singular vector is sign-normalized so that its entry of largest
/// magnitude (lowest row index on ties) is positive; the matching right
/// singular vector is flipped with it, so U diag(s) V^T is unchanged.
struct ThinSvd {
    Matrix u;
    Vector s;
    Matrix v;
};

namespace detail {

inline void normalize_signs(Matrix& u, Matrix& v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        const double top = u.col(j).cwiseAbs().maxCoeff();
        // entries equal up to rounding count as a tie
        Eigen::Index best = 0;
        while (std::abs(u(best, j)) < top * (1.0 - 1e-12)) ++best;
        if (u(best, j) < 0.0) {
            u.col(j) = -u.col(j);
            if (j < v.cols()) v.col(j) = -v.col(j);
        }
    }
}

// Below this many columns (or rows) one-sided Jacobi is both fast and the
// most accurate choice; above it, divide and conquer.
inline constexpr Eigen::Index kJacobiLimit = 48;

}  // namespace detail

/// With `with_v = false` only U and s are computed (v is left empty).
inline ThinSvd thin_svd(const Matrix& m, bool with_v = true) {
    ThinSvd out;
    const unsigned options = with_v ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : Eigen::ComputeThinU;
    if (std::min(m.rows(), m.cols()) <= detail::kJacobiLimit) {
        Eigen::JacobiSVD<Matrix> svd(m, options);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        if (with_v) out.v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(m, options);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        if (with_v) out.v = svd.matrixV();
    }
    detail::normalize_signs(out.u, out.v);
    return out;
}

inline Vector singular_values(const Matrix& m) {
    if (std::min(m.rows(), m.cols()) <= detail::kJacobiLimit) {
        return Eigen::JacobiSVD<Matrix>(m).singularValues();
    }
    return Eigen::BDCSVD<Matrix>(m).singularValues();
}

/// max |(F^T F - I)_ij|
inline double orthonormality_deviation(const Matrix& f) {
    const Matrix g = f.transpose() * f;
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// Orthonormal basis of the column span of a full-rank matrix, by Householder
/// QR with the signs fixed so R has a non-negative diagonal (Q ~ M when M is
/// already close to orthonormal).
inline Matrix orthonormalize(const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace gpm
