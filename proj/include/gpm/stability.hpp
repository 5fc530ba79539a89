#pragma once

// Auditable verdicts for the three stability conditions:
//   C1  every training overlap Y0^T Yi is non-singular
//   C2  the interpolated lift has theta_1 < pi/2
//   C3  interpolants for different mode counts nearly nest, measured by the
//       spread eps = (d_max - d_min) / d_min of their geometric distances

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/interpolation.hpp"
#include "gpm/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gpm {

inline constexpr double kDefaultC3Threshold = 100.0;

struct C2Record {
    bool ok = true;
    double theta_max = 0.0;
};

/// Symmetric table of geometric distances between interpolants, indexed by
/// mode count in the order given.
struct DistanceTable {
    std::vector<Eigen::Index> modes;
    Matrix values;
};

struct C3Record {
    double epsilon = 0.0;
    double threshold = kDefaultC3Threshold;
    bool ok = true;
    double delta_min = 0.0;
    double delta_max = 0.0;
    DistanceTable table;
};

struct StabilityReport {
    C1Record c1;
    std::optional<C2Record> c2;
    std::optional<C3Record> c3;
};

inline C1Record check_c1(const TrainingSet& ts, std::size_t reference) { return c1_gate(ts, reference); }

inline C1Record check_c1(const TrainingSet& ts) {
    return c1_gate(ts, ts.reference().value_or(0));
}

inline C2Record check_c2(const TangentVector& v) {
    const Vector a = v.angles();
    C2Record rec;
    rec.theta_max = a.size() ? a(0) : 0.0;
    rec.ok = c2_stable(rec.theta_max);
    return rec;
}

inline DistanceTable c3_distance_table(const std::vector<std::pair<Eigen::Index, GrassmannPoint>>& results,
                                       unsigned threads = 1) {
    if (results.empty()) throw ParameterError("c3_distance_table: empty mode list");
    const auto n = results.front().second.n();
    DistanceTable t;
    for (const auto& [mode, frame] : results) {
        if (frame.n() != n) throw ParameterError("c3_distance_table: frames differ in n");
        if (std::find(t.modes.begin(), t.modes.end(), mode) != t.modes.end()) {
            throw ParameterError("c3_distance_table: duplicate mode " + std::to_string(mode));
        }
        t.modes.push_back(mode);
    }
    const std::size_t k = results.size();
    t.values = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    }
    std::vector<double> d(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t idx) {
        const auto [i, j] = pairs[idx];
        d[idx] = geometric_distance(results[i].second, results[j].second);
    });
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        const auto i = static_cast<Eigen::Index>(pairs[idx].first);
        const auto j = static_cast<Eigen::Index>(pairs[idx].second);
        t.values(i, j) = d[idx];
        t.values(j, i) = d[idx];
    }
    return t;
}

/// Relative spread of the off-diagonal distances against the threshold.
///
/// Entries below the inclusion tolerance count as exact inclusion (zero).
/// An all-zero table is the ideal nested case (eps = 0, ok); a zero minimum
/// with a nonzero maximum makes the spread unbounded (eps = +inf, not ok).
inline C3Record check_c3(const DistanceTable& table, double threshold = kDefaultC3Threshold) {
    const Eigen::Index k = table.values.rows();
    if (k < 2 || table.values.cols() != k) {
        throw ParameterError("check_c3: need a square table over at least 2 modes");
    }
    C3Record rec;
    rec.threshold = threshold;
    rec.table = table;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j) continue;
            double d = table.values(i, j);
            if (d < kInclusionAngleTolerance) d = 0.0;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    rec.delta_min = lo;
    rec.delta_max = hi;
    if (hi == 0.0) {
        rec.epsilon = 0.0;
    } else if (lo == 0.0) {
        rec.epsilon = std::numeric_limits<double>::infinity();
    } else {
        rec.epsilon = (hi - lo) / lo;
    }
    rec.ok = rec.epsilon < threshold;
    return rec;
}

/// Verdict for a known epsilon (e.g. a published value).
inline C3Record check_c3_epsilon(double epsilon, double threshold = kDefaultC3Threshold) {
    C3Record rec;
    rec.epsilon = epsilon;
    rec.threshold = threshold;
    rec.ok = epsilon < threshold;
    return rec;
}

/// dim G(p, n) = p (n - p).
inline std::int64_t grassmann_dimension(std::int64_t p, std::int64_t n) {
    if (p < 0 || n < 1) throw ParameterError("grassmann_dimension: need p >= 0 and n >= 1");
    if (p > n) {
        throw ParameterError("grassmann_dimension: p = " + std::to_string(p) + " exceeds n = " +
                             std::to_string(n));
    }
    return p * (n - p);
}

}  // namespace gpm
