#pragma once

#include "oracles.hpp"

#include <gpm/gpm.hpp>

#include <cmath>
#include <vector>

namespace support {

using gpm::Matrix;
using gpm::Vector;

/// Horizontal lift at `base` with prescribed singular values (the angles of
/// the geodesic it generates): Z = U diag(theta) V^T with U orthogonal to base.
inline Matrix lift_with_angles(oracle::Rng& rng, const gpm::GrassmannPoint& base, const std::vector<double>& theta) {
    const long n = base.n();
    const long p = base.p();
    Matrix g = rng.matrix(n, p);
    g -= base.frame() * (base.frame().transpose() * g);
    const Matrix u = oracle::gram_schmidt(g);
    const Matrix v = rng.frame(p, p);
    Matrix d = Matrix::Zero(p, p);
    for (long k = 0; k < p && k < static_cast<long>(theta.size()); ++k) d(k, k) = theta[static_cast<std::size_t>(k)];
    return u * d * v.transpose();
}

inline Matrix unit(long n, std::initializer_list<long> cols) {
    Matrix m = Matrix::Zero(n, static_cast<long>(cols.size()));
    long j = 0;
    for (long c : cols) m(c, j++) = 1.0;
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace support
