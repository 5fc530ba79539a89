#pragma once

// Lagrange interpolation of subspaces on G(p, n) in the normal chart of a
// reference node, with the log-map domain gate (C1: every overlap Y0^T Yi
// invertible) and the injectivity gate (C2: theta_1 of the interpolated lift
// below pi/2).

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/linalg.hpp"
#include "gpm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gpm {

/// Training nodes (lambda_i, omega_i) sharing one G(p, n), plus an optional
/// reference index. Without one, each target uses the nearest node.
class TrainingSet {
public:
    TrainingSet(std::vector<double> params, std::vector<GrassmannPoint> points,
                std::optional<std::size_t> reference = std::nullopt)
        : params_(std::move(params)), points_(std::move(points)), reference_(reference) {
        if (params_.empty()) throw ParameterError("TrainingSet: no training nodes");
        if (params_.size() != points_.size()) {
            throw ParameterError("TrainingSet: " + std::to_string(params_.size()) +
                                 " parameters for " + std::to_string(points_.size()) + " points");
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (!std::isfinite(params_[i])) throw ParameterError("TrainingSet: non-finite parameter");
            for (std::size_t j = 0; j < i; ++j) {
                if (params_[i] == params_[j]) {
                    throw ParameterError("TrainingSet: duplicate parameter value " +
                                         std::to_string(params_[i]));
                }
            }
        }
        const auto n = points_.front().n();
        const auto p = points_.front().p();
        for (const auto& pt : points_) {
            if (pt.n() != n || pt.p() != p) {
                throw ParameterError("TrainingSet: all points must share n and p");
            }
        }
        if (2 * p > n) {
            throw ParameterError("TrainingSet: requires 2p <= n (p = " + std::to_string(p) +
                                 ", n = " + std::to_string(n) + ")");
        }
        if (reference_ && *reference_ >= params_.size()) {
            throw ParameterError("TrainingSet: reference index " + std::to_string(*reference_) +
                                 " out of range");
        }
    }

    const std::vector<double>& params() const noexcept { return params_; }
    const std::vector<GrassmannPoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return params_.size(); }
    Eigen::Index n() const { return points_.front().n(); }
    Eigen::Index p() const { return points_.front().p(); }
    std::optional<std::size_t> reference() const noexcept { return reference_; }

    /// Node nearest to target in |lambda| (lowest index on ties).
    std::size_t nearest_node(double target) const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < params_.size(); ++i) {
            if (std::abs(params_[i] - target) < std::abs(params_[best] - target)) best = i;
        }
        return best;
    }

    std::size_t resolve_reference(double target) const {
        return reference_ ? *reference_ : nearest_node(target);
    }

    bool is_extrapolation(double target) const {
        const auto [lo, hi] = std::minmax_element(params_.begin(), params_.end());
        return target < *lo || target > *hi;
    }

private:
    std::vector<double> params_;
    std::vector<GrassmannPoint> points_;
    std::optional<std::size_t> reference_;
};

/// Lagrange basis values prod_{j != i} (target - lambda_j) / (lambda_i - lambda_j).
inline std::vector<double> lagrange_weights(std::span<const double> params, double target) {
    const std::size_t count = params.size();
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (params[i] == params[j]) {
                throw ParameterError("lagrange_weights: duplicate node " + std::to_string(params[i]));
            }
        }
    }
    std::vector<double> w(count, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            if (j != i) w[i] *= (target - params[j]) / (params[i] - params[j]);
        }
    }
    return w;
}

/// Outcome of the log-map domain check against one reference node.
struct C1Record {
    bool ok = true;
    std::size_t reference_index = 0;
    std::vector<std::size_t> failing_indices;
    std::vector<double> min_singular_values;  ///< of Y0^T Yi, per node
};

inline C1Record c1_gate(const TrainingSet& ts, std::size_t reference) {
    if (reference >= ts.size()) throw ParameterError("c1_gate: reference index out of range");
    C1Record rec;
    rec.reference_index = reference;
    const auto& base = ts.points()[reference];
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const OverlapCondition cond = overlap_condition(base, ts.points()[i]);
        rec.min_singular_values.push_back(cond.min_singular_value);
        if (!cond.invertible) rec.failing_indices.push_back(i);
    }
    rec.ok = rec.failing_indices.empty();
    return rec;
}

/// Threshold for the injectivity gate: stable iff theta_1 < pi/2 - margin.
inline constexpr double kC2Margin = 1e-12;

inline bool c2_stable(double theta_max) { return theta_max < kHalfPi - kC2Margin; }

/// The training nodes pulled back to the tangent space at the reference node.
/// Lifts are computed once; velocity(target) is then a weighted sum.
class TangentModel {
public:
    TangentModel(const TrainingSet& ts, std::size_t reference)
        : params_(ts.params()), base_(ts.points().at(reference)), c1_(c1_gate(ts, reference)) {
        if (!c1_.ok) return;
        lifts_.reserve(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i == reference) {
                lifts_.push_back(Matrix::Zero(base_.n(), base_.p()));
            } else {
                lifts_.push_back(log_map(base_, ts.points()[i]).lift());
            }
        }
    }

    const C1Record& c1() const noexcept { return c1_; }
    const GrassmannPoint& base() const noexcept { return base_; }
    const std::vector<Matrix>& lifts() const noexcept { return lifts_; }

    /// Interpolated horizontal lift sum_i w_i(target) Z_i. Requires c1().ok.
    Matrix velocity(double target) const {
        if (!c1_.ok) throw LogDomainError("TangentModel: C1 failed; no chart available",
                                          std::numeric_limits<double>::infinity());
        const std::vector<double> w = lagrange_weights(params_, target);
        Matrix z = Matrix::Zero(base_.n(), base_.p());
        for (std::size_t i = 0; i < w.size(); ++i) z.noalias() += w[i] * lifts_[i];
        return z;
    }

private:
    std::vector<double> params_;
    GrassmannPoint base_;
    C1Record c1_;
    std::vector<Matrix> lifts_;
};

struct InterpolationResult {
    double target_param = 0.0;
    std::size_t reference_index = 0;
    bool c1_ok = false;
    bool c2_ok = false;
    bool extrapolated = false;
    C1Record c1;
    double theta_max = std::numeric_limits<double>::quiet_NaN();
    std::optional<TangentVector> velocity;
    std::optional<GrassmannPoint> frame;  ///< present iff c1_ok && c2_ok

    bool stable() const noexcept { return c1_ok && c2_ok; }
};

namespace detail {

inline InterpolationResult finish_interpolation(const TangentModel& model, double target,
                                                bool extrapolated) {
    InterpolationResult out;
    out.target_param = target;
    out.reference_index = model.c1().reference_index;
    out.extrapolated = extrapolated;
    out.c1 = model.c1();
    out.c1_ok = model.c1().ok;
    if (!out.c1_ok) return out;

    TangentVector v(model.base(), model.velocity(target));
    const ThinSvd svd = thin_svd(v.lift());
    out.theta_max = svd.s.size() ? svd.s(0) : 0.0;
    out.c2_ok = c2_stable(out.theta_max);
    if (out.c2_ok) {
        const Vector c = svd.s.array().cos();
        const Vector s = svd.s.array().sin();
        Matrix frame = model.base().frame() * svd.v * c.asDiagonal();
        frame.noalias() += svd.u * s.asDiagonal();
        out.frame.emplace(std::move(frame));
    }
    out.velocity.emplace(std::move(v));
    return out;
}

}  // namespace detail

/// Interpolated subspace at target. Stability failures are reported in the
/// result (c1_ok / c2_ok) rather than thrown.
inline InterpolationResult interpolate(const TrainingSet& ts, double target) {
    const std::size_t ref = ts.resolve_reference(target);
    const TangentModel model(ts, ref);
    return detail::finish_interpolation(model, target, ts.is_extrapolation(target));
}

struct SweepSample {
    double param = 0.0;
    double theta_max = std::numeric_limits<double>::quiet_NaN();
    bool c2_ok = false;
    bool valid = false;  ///< false when the C1 gate failed
};

struct SweepResult {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    std::size_t reference_index = 0;
    C1Record c1;
    std::vector<SweepSample> samples;

    double step() const { return count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0; }

    /// Maximal runs of consecutive valid, C2-unstable samples as closed ranges.
    std::vector<std::pair<double, double>> unstable_intervals() const {
        std::vector<std::pair<double, double>> out;
        bool open = false;
        for (const auto& s : samples) {
            const bool bad = s.valid && !s.c2_ok;
            if (bad && !open) {
                out.emplace_back(s.param, s.param);
                open = true;
            } else if (bad) {
                out.back().second = s.param;
            } else {
                open = false;
            }
        }
        return out;
    }

    bool all_stable() const {
        return std::all_of(samples.begin(), samples.end(),
                           [](const SweepSample& s) { return s.valid && s.c2_ok; });
    }
};

/// Uniform grid of `count` points over [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    if (count < 2) throw ParameterError("uniform_grid: need at least 2 samples");
    if (!(lo < hi)) throw ParameterError("uniform_grid: need lo < hi");
    std::vector<double> g(count);
    const double span = hi - lo;
    const double denom = static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        g[k] = lo + static_cast<double>(k) * span / denom;
    }
    g.back() = hi;
    return g;
}

/// theta_1 of the interpolated lift over a uniform parameter grid, for a fixed
/// reference node (the set's reference, or the node nearest the grid midpoint).
inline SweepResult c2_sweep(const TrainingSet& ts, double lo, double hi, std::size_t samples,
                            unsigned threads = 1) {
    const std::vector<double> grid = uniform_grid(lo, hi, samples);
    SweepResult out;
    out.lo = lo;
    out.hi = hi;
    out.count = samples;
    out.reference_index = ts.resolve_reference(0.5 * (lo + hi));
    const TangentModel model(ts, out.reference_index);
    out.c1 = model.c1();
    out.samples.resize(samples);
    parallel_for(samples, threads, [&](std::size_t k) {
        SweepSample& s = out.samples[k];
        s.param = grid[k];
        if (!model.c1().ok) return;
        s.valid = true;
        const Vector theta = singular_values(model.velocity(grid[k]));
        s.theta_max = theta.size() ? theta(0) : 0.0;
        s.c2_ok = c2_stable(s.theta_max);
    });
    return out;
}

}  // namespace gpm
