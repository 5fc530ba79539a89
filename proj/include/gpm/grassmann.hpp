#pragma once

// Riemannian geometry of the Grassmann manifold G(p, n): points stored as
// orthonormal n x p frames, tangent vectors as horizontal lifts, closed-form
// exponential/logarithm maps, geodesics, principal angles, distances and the
// cut-locus / injectivity-radius predicates.

#include "gpm/error.hpp"
#include "gpm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace gpm {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// A p-dimensional subspace of R^n, represented by an n x p frame with
/// orthonormal columns. Any frame Y P with P in O(p) denotes the same point.
class GrassmannPoint {
public:
    /// Frames drifting from orthonormality by more than this are re-orthonormalized.
    static constexpr double kDriftTolerance = 1e-12;
    /// Frames drifting by more than this are rejected.
    static constexpr double kRejectTolerance = 1e-6;

    explicit GrassmannPoint(Matrix frame) : frame_(std::move(frame)) {
        if (frame_.rows() < 1 || frame_.cols() < 1) {
            throw ParameterError("GrassmannPoint: frame must be at least 1 x 1");
        }
        if (frame_.cols() > frame_.rows()) {
            throw ParameterError("GrassmannPoint: p = " + std::to_string(frame_.cols()) +
                                 " exceeds n = " + std::to_string(frame_.rows()));
        }
        if (!frame_.allFinite()) {
            throw DataError("GrassmannPoint: frame has non-finite entries");
        }
        const double dev = orthonormality_deviation(frame_);
        if (dev > kRejectTolerance) {
            throw DataError("GrassmannPoint: frame is not orthonormal (max |F^T F - I| = " +
                            std::to_string(dev) + ")");
        }
        if (dev > kDriftTolerance) frame_ = orthonormalize(frame_);
    }

    /// The point spanned by the columns of an arbitrary full-column-rank matrix.
    static GrassmannPoint span_of(const Matrix& m) {
        if (m.cols() > m.rows() || m.cols() < 1) {
            throw ParameterError("GrassmannPoint::span_of: need 1 <= cols <= rows");
        }
        if (!m.allFinite()) throw DataError("GrassmannPoint::span_of: non-finite entries");
        const Vector s = singular_values(m);
        if (s(s.size() - 1) <= 1e-12 * s(0)) {
            throw ParameterError("GrassmannPoint::span_of: matrix is rank deficient");
        }
        return GrassmannPoint(orthonormalize(m));
    }

    const Matrix& frame() const noexcept { return frame_; }
    Eigen::Index n() const noexcept { return frame_.rows(); }
    Eigen::Index p() const noexcept { return frame_.cols(); }

private:
    Matrix frame_;
};

/// Tangent vector at a base point, stored as its horizontal lift Z (Z^T Y = 0).
class TangentVector {
public:
    static constexpr double kHorizontalTolerance = 1e-10;

    TangentVector(GrassmannPoint base, Matrix lift)
        : base_(std::move(base)), lift_(std::move(lift)) {
        if (lift_.rows() != base_.n() || lift_.cols() != base_.p()) {
            throw ParameterError("TangentVector: lift shape does not match base frame");
        }
        if (!lift_.allFinite()) throw DataError("TangentVector: lift has non-finite entries");
        const double defect = horizontality_defect(base_, lift_);
        const double scale = std::max(1.0, lift_.cwiseAbs().maxCoeff());
        if (defect > kHorizontalTolerance * scale) {
            throw DomainError("TangentVector: lift is not horizontal (max |Z^T Y| = " +
                              std::to_string(defect) + ")");
        }
    }

    static TangentVector zero(const GrassmannPoint& base) {
        return TangentVector(base, Matrix::Zero(base.n(), base.p()));
    }

    /// Projects an arbitrary n x p matrix onto the horizontal space at base.
    static TangentVector project(const GrassmannPoint& base, const Matrix& m) {
        const Matrix& y = base.frame();
        return TangentVector(base, m - y * (y.transpose() * m));
    }

    static double horizontality_defect(const GrassmannPoint& base, const Matrix& lift) {
        return (lift.transpose() * base.frame()).cwiseAbs().maxCoeff();
    }

    const GrassmannPoint& base() const noexcept { return base_; }
    const Matrix& lift() const noexcept { return lift_; }

    /// Singular values theta_1 >= ... >= theta_p of the lift.
    Vector angles() const { return singular_values(lift_); }

    /// ||v|| = sqrt(sum theta_i^2).
    double norm() const { return angles().norm(); }

private:
    GrassmannPoint base_;
    Matrix lift_;
};

/// Jordan principal angles, non-increasing, each in [0, pi/2].
struct PrincipalAngles {
    std::vector<double> angles;

    double largest() const { return angles.empty() ? 0.0 : angles.front(); }

    double root_sum_square() const {
        double acc = 0.0;
        for (double t : angles) acc += t * t;
        return std::sqrt(acc);
    }
};

namespace detail {

inline void require_same_n(const GrassmannPoint& a, const GrassmannPoint& b, const char* who) {
    if (a.n() != b.n()) {
        throw ParameterError(std::string(who) + ": ambient dimensions differ (" +
                             std::to_string(a.n()) + " vs " + std::to_string(b.n()) + ")");
    }
}

inline void require_half_dimension(const GrassmannPoint& y, const char* who) {
    if (2 * y.p() > y.n()) {
        throw ParameterError(std::string(who) + ": requires 2p <= n (p = " +
                             std::to_string(y.p()) + ", n = " + std::to_string(y.n()) + ")");
    }
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace detail

/// Principal angles between span(a) and span(b); p and p' may differ, in which
/// case min(p, p') angles are returned.
///
/// The cosines are the singular values of a^T b. Angles whose cosine exceeds
/// 1/sqrt(2) are taken from the matching sines (singular values of the
/// component of the smaller frame orthogonal to the larger one), which keeps
/// small angles accurate to machine precision instead of sqrt(eps).
inline PrincipalAngles principal_angles(const GrassmannPoint& a, const GrassmannPoint& b) {
    detail::require_same_n(a, b, "principal_angles");
    const Matrix& small = a.p() <= b.p() ? a.frame() : b.frame();
    const Matrix& large = a.p() <= b.p() ? b.frame() : a.frame();
    const Eigen::Index k = small.cols();

    const Vector cosines = singular_values(small.transpose() * large);
    const Matrix residual = small - large * (large.transpose() * small);
    const Vector sines = singular_values(residual);

    PrincipalAngles out;
    out.angles.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        // cosines(i) descending pairs with sines(k-1-i) ascending.
        const double c = detail::clamp_unit(cosines(i));
        const double theta = c * c <= 0.5 ? std::acos(c)
                                          : std::asin(detail::clamp_unit(sines(k - 1 - i)));
        out.angles[static_cast<std::size_t>(k - 1 - i)] = theta;
    }
    std::sort(out.angles.begin(), out.angles.end(), std::greater<>());
    return out;
}

/// Geodesic distance sqrt(sum theta_i^2) between points of the same G(p, n).
inline double riemannian_distance(const GrassmannPoint& a, const GrassmannPoint& b) {
    detail::require_same_n(a, b, "riemannian_distance");
    if (a.p() != b.p()) {
        throw ParameterError("riemannian_distance: subspace dimensions differ (" +
                             std::to_string(a.p()) + " vs " + std::to_string(b.p()) +
                             "); use geometric_distance");
    }
    return principal_angles(a, b).root_sum_square();
}

/// Distance between subspaces of possibly different dimension; zero exactly
/// when the smaller subspace lies inside the larger one.
inline double geometric_distance(const GrassmannPoint& a, const GrassmannPoint& b) {
    detail::require_same_n(a, b, "geometric_distance");
    return principal_angles(a, b).root_sum_square();
}

inline constexpr double kInclusionAngleTolerance = 1e-8;

/// True when the smaller of the two subspaces is contained in the larger.
inline bool is_included(const GrassmannPoint& a, const GrassmannPoint& b,
                        double angle_tolerance = kInclusionAngleTolerance) {
    return principal_angles(a, b).largest() < angle_tolerance;
}

/// Diameter sqrt(min(p, n - p)) pi/2 of G(p, n).
inline double diameter(Eigen::Index p, Eigen::Index n) {
    if (p < 0 || p > n) throw ParameterError("diameter: need 0 <= p <= n");
    return std::sqrt(static_cast<double>(std::min(p, n - p))) * kHalfPi;
}

/// Point at time t on the geodesic through base with initial velocity v:
/// Y V cos(t Theta) + U sin(t Theta), where Z = U Theta V^T.
inline GrassmannPoint geodesic(const GrassmannPoint& base, const TangentVector& v, double t) {
    detail::require_same_n(base, v.base(), "geodesic");
    detail::require_half_dimension(base, "geodesic");
    if (v.lift().cols() != base.p()) throw ParameterError("geodesic: p mismatch");
    const double defect = TangentVector::horizontality_defect(base, v.lift());
    if (defect > TangentVector::kHorizontalTolerance * std::max(1.0, v.lift().cwiseAbs().maxCoeff())) {
        throw DomainError("geodesic: velocity is not horizontal at the base point (max |Z^T Y| = " +
                          std::to_string(defect) + ")");
    }
    const ThinSvd svd = thin_svd(v.lift());
    const Vector scaled = t * svd.s;
    const Vector c = scaled.array().cos();
    const Vector s = scaled.array().sin();
    Matrix frame = base.frame() * svd.v * c.asDiagonal();
    frame.noalias() += svd.u * s.asDiagonal();
    return GrassmannPoint(std::move(frame));
}

inline GrassmannPoint exp_map(const GrassmannPoint& base, const TangentVector& v) {
    return geodesic(base, v, 1.0);
}

inline GrassmannPoint exp_map(const TangentVector& v) { return geodesic(v.base(), v, 1.0); }

/// Smallest-to-largest singular value test used for invertibility of Y^T Y'.
inline constexpr double kSingularityTolerance = 1e-12;

struct OverlapCondition {
    double min_singular_value = 0.0;
    double max_singular_value = 0.0;
    bool invertible = false;

    double condition_number() const {
        return min_singular_value > 0.0 ? max_singular_value / min_singular_value
                                        : std::numeric_limits<double>::infinity();
    }
};

/// Invertibility of Y^T Y' at the library tolerance.
inline OverlapCondition overlap_condition(const GrassmannPoint& base, const GrassmannPoint& target) {
    const Vector s = singular_values(base.frame().transpose() * target.frame());
    OverlapCondition out;
    out.max_singular_value = s.size() ? s(0) : 0.0;
    out.min_singular_value = s.size() ? s(s.size() - 1) : 0.0;
    out.invertible = out.max_singular_value > 0.0 &&
                     out.min_singular_value >= kSingularityTolerance * out.max_singular_value;
    return out;
}

/// Logarithm map at base. Requires Y^T Y' invertible (target off the cut locus).
inline TangentVector log_map(const GrassmannPoint& base, const GrassmannPoint& target) {
    detail::require_same_n(base, target, "log_map");
    if (base.p() != target.p()) throw ParameterError("log_map: subspace dimensions differ");
    detail::require_half_dimension(base, "log_map");

    const Matrix& y = base.frame();
    const Matrix& yt = target.frame();
    const Matrix overlap = y.transpose() * yt;
    const OverlapCondition cond = overlap_condition(base, target);
    if (!cond.invertible) {
        throw LogDomainError("log_map: Y0^T Y is singular (condition number " +
                                 std::to_string(cond.condition_number()) +
                                 "); target lies on the cut locus of the base point",
                             cond.condition_number());
    }
    // M = Y' (Y^T Y')^{-1} - Y, solved as (Y^T Y')^T M'^T = Y'^T.
    Matrix m = overlap.transpose().partialPivLu().solve(yt.transpose()).transpose();
    m -= y;
    // M is horizontal in exact arithmetic; remove the rounding residue.
    m -= y * (y.transpose() * m);

    const ThinSvd svd = thin_svd(m);
    const Vector atans = svd.s.array().atan();
    Matrix z = svd.u * atans.asDiagonal() * svd.v.transpose();
    return TangentVector(base, std::move(z));
}

/// Cut time rho(v) = pi / (2 theta_1): the geodesic t -> geodesic(base, v, t)
/// is length-minimizing exactly on [0, rho(v)].
inline double cut_time(const TangentVector& v) {
    const Vector a = v.angles();
    const double theta1 = a.size() ? a(0) : 0.0;
    if (!(theta1 > 0.0)) {
        throw UndefinedCutTimeError("cut_time: zero tangent vector (constant geodesic)");
    }
    return kHalfPi / theta1;
}

struct InjectivityStatus {
    bool cut_locus_ok = true;  ///< theta_1 < pi/2
    bool radius_ok = true;     ///< ||v|| < pi/2 (injectivity-radius disk)
    double theta1 = 0.0;
    double norm = 0.0;
};

/// Membership of v in the cut-locus domain {theta_1 < pi/2} and in the
/// strictly smaller injectivity-radius disk {||v|| < pi/2}.
inline InjectivityStatus in_injectivity_domain(const TangentVector& v) {
    const Vector a = v.angles();
    InjectivityStatus out;
    out.theta1 = a.size() ? a(0) : 0.0;
    out.norm = a.norm();
    out.cut_locus_ok = out.theta1 < kHalfPi;
    out.radius_ok = out.norm < kHalfPi;
    return out;
}

}  // namespace gpm
