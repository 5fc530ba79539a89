#pragma once

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gpm {

/// n x N_t space-time samples of one parametric solution; column k is the
/// field at time step k. The parameter value travels with the data.
class SnapshotMatrix {
public:
    SnapshotMatrix(Matrix data, double param) : data_(std::move(data)), param_(param) {
        if (data_.rows() < 1 || data_.cols() < 1) {
            throw ParameterError("SnapshotMatrix: need n >= 1 and n_t >= 1");
        }
        if (!data_.allFinite()) {
            throw DataError("SnapshotMatrix: non-finite entries (NaN/Inf) in snapshot data");
        }
        if (!std::isfinite(param_)) throw DataError("SnapshotMatrix: non-finite parameter");
    }

    const Matrix& data() const noexcept { return data_; }
    double param() const noexcept { return param_; }
    Eigen::Index n() const noexcept { return data_.rows(); }
    Eigen::Index n_t() const noexcept { return data_.cols(); }

private:
    Matrix data_;
    double param_;
};

/// Truncated POD: the p leading left singular vectors plus the full spectrum.
struct PodResult {
    GrassmannPoint basis;
    std::vector<double> singular_values;  ///< length min(n, n_t), non-increasing
    Eigen::Index mode = 0;
    bool uniqueness_flag = true;          ///< sigma_p > sigma_{p+1} at tolerance
    std::vector<std::string> warnings;
};

/// Relative gap below which sigma_p and sigma_{p+1} are treated as equal.
inline constexpr double kUniquenessGap = 1e-10;

/// Full non-increasing singular value list of s.
inline std::vector<double> singular_spectrum(const SnapshotMatrix& s) {
    const Vector sv = singular_values(s.data());
    return {sv.data(), sv.data() + sv.size()};
}

namespace detail {

inline void require_mode_in_range(const SnapshotMatrix& s, Eigen::Index p) {
    const Eigen::Index q = std::min(s.n(), s.n_t());
    if (p < 1 || p > q) {
        throw ParameterError("compute_pod: mode p = " + std::to_string(p) +
                             " out of range; need 1 <= p <= min(n, n_t) = " + std::to_string(q));
    }
}

inline PodResult truncate_pod(const SnapshotMatrix& s, const ThinSvd& svd, Eigen::Index p) {
    const Eigen::Index q = std::min(s.n(), s.n_t());
    const Vector& sig = svd.s;

    // Numerical rank at the usual max(n, n_t) * eps * sigma_1 cutoff.
    const double rank_tol = static_cast<double>(std::max(s.n(), s.n_t())) *
                            std::numeric_limits<double>::epsilon() * sig(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sig.size(); ++i) {
        if (sig(i) > rank_tol) ++rank;
    }
    if (rank < static_cast<std::size_t>(p)) {
        throw DegenerateRankError("compute_pod: snapshot matrix has numerical rank " +
                                      std::to_string(rank) + " < requested mode p = " +
                                      std::to_string(p),
                                  rank);
    }

    PodResult out{GrassmannPoint(svd.u.leftCols(p)), {sig.data(), sig.data() + sig.size()}, p, true, {}};
    if (p < q) {
        const double gap = sig(p - 1) - sig(p);
        out.uniqueness_flag = gap > kUniquenessGap * sig(0);
        if (!out.uniqueness_flag) {
            out.warnings.push_back("sigma_" + std::to_string(p) + " == sigma_" +
                                   std::to_string(p + 1) +
                                   " at tolerance; the POD subspace of this mode is not unique");
        }
    }
    return out;
}

}  // namespace detail

/// POD of mode p: span of the p leading left singular vectors, the minimizer
/// of sum_k ||u_k - pi_p(u_k)||^2 over G(p, n).
inline PodResult compute_pod(const SnapshotMatrix& s, Eigen::Index p) {
    detail::require_mode_in_range(s, p);
    return detail::truncate_pod(s, thin_svd(s.data(), /*with_v=*/false), p);
}

/// POD at several modes from one SVD.
inline std::vector<PodResult> compute_pods(const SnapshotMatrix& s, const std::vector<Eigen::Index>& modes) {
    for (auto p : modes) detail::require_mode_in_range(s, p);
    std::vector<PodResult> out;
    if (modes.empty()) return out;
    const ThinSvd svd = thin_svd(s.data(), /*with_v=*/false);
    out.reserve(modes.size());
    for (auto p : modes) out.push_back(detail::truncate_pod(s, svd, p));
    return out;
}

/// Reduced model S_p = Phi Phi^T S.
inline Matrix reduced_model(const SnapshotMatrix& s, const GrassmannPoint& basis) {
    if (basis.n() != s.n()) {
        throw ParameterError("reduced_model: basis has " + std::to_string(basis.n()) +
                             " rows but snapshots have n = " + std::to_string(s.n()));
    }
    const Matrix& phi = basis.frame();
    return phi * (phi.transpose() * s.data());
}

}  // namespace gpm
