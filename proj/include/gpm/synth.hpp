#pragma once

// Synthetic parametric snapshot families with analytically known POD
// subspaces. They stand in for high-fidelity solver output and reproduce each
// stability regime on demand.
//
// Construction, for mode_count P and seeded orthonormal directions
// q_1..q_2P (in R^n) and w_1..w_P (in R^n_t):
//
//   S(lambda) = sum_k sigma_k u_k(lambda) w_k^T + E(lambda),   sigma_k = 10 / 2^(k-1)
//
//   rotation, crossing  u_k = cos a(lambda) q_k + sin a(lambda) q_{P+k}
//   nested              u_k = cos a_k(lambda) q_k + sin a_k(lambda) q_{P+k}
//   non_nested          u_k = cos a_k(lambda) q_k + sin a_k(lambda) h_k
//
// with a(lambda) = rate (lambda - center) - curvature (lambda - center)^2
// (curvature only for crossing), a_k growing with k, and h_k seeded unit
// vectors in span(q_{P+1}..q_{2P}) that are shared between modes, so the
// per-mode rotations interfere. E is Gaussian noise with spectral norm about
// 1e-6, projected off the designed row and column spaces so it only adds a
// trailing spectrum.
//
// Random numbers come from SplitMix64 (64-bit state) with Box-Muller normals,
// so files reproduce bit-for-bit for a given seed.

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/linalg.hpp"
#include "gpm/snapshots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpm {

/// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
public:
    static constexpr std::string_view kName = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1].
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (spare_) {
            const double s = *spare_;
            spare_.reset();
            return s;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        return r * std::cos(phi);
    }

    Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
        }
        return m;
    }

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

enum class FamilyKind { rotation, crossing, nested, non_nested };

inline std::string_view to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::rotation: return "rotation";
        case FamilyKind::crossing: return "crossing";
        case FamilyKind::nested: return "nested";
        case FamilyKind::non_nested: return "non_nested";
    }
    return "unknown";
}

inline FamilyKind family_kind_from_string(std::string_view s) {
    if (s == "rotation") return FamilyKind::rotation;
    if (s == "crossing") return FamilyKind::crossing;
    if (s == "nested") return FamilyKind::nested;
    if (s == "non_nested" || s == "non-nested") return FamilyKind::non_nested;
    throw ParameterError("unknown family kind '" + std::string(s) + "'");
}

struct FamilySpec {
    Eigen::Index n = 0;
    Eigen::Index n_t = 0;
    Eigen::Index mode_count = 1;
    FamilyKind kind = FamilyKind::rotation;
    double rate = 0.0;        ///< radians per unit lambda
    std::uint64_t seed = 0;
    std::vector<double> params;
    double center = 0.0;      ///< lambda at which the designed frame is [q_1..q_P]
    double curvature = 0.0;   ///< crossing only: quadratic term of the angle

    void validate() const {
        if (mode_count < 1) throw ParameterError("FamilySpec: mode_count must be >= 1");
        if (2 * mode_count > n) throw ParameterError("FamilySpec: requires 2 * mode_count <= n");
        if (n_t < mode_count) throw ParameterError("FamilySpec: requires n_t >= mode_count");
        if (!(rate >= 0.0) || !std::isfinite(rate)) throw ParameterError("FamilySpec: rate must be >= 0");
        if (!std::isfinite(center) || !std::isfinite(curvature)) {
            throw ParameterError("FamilySpec: center and curvature must be finite");
        }
        if (curvature != 0.0 && kind != FamilyKind::crossing) {
            throw ParameterError("FamilySpec: curvature is only meaningful for crossing families");
        }
        if (params.empty()) throw ParameterError("FamilySpec: no parameter values");
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!std::isfinite(params[i])) throw ParameterError("FamilySpec: non-finite parameter");
            for (std::size_t j = 0; j < i; ++j) {
                if (params[i] == params[j]) throw ParameterError("FamilySpec: duplicate parameter");
            }
        }
    }
};

/// Snapshots plus the analytic ground truth they were built from.
struct SynthFamily {
    FamilySpec spec;                                  ///< params sorted ascending
    std::vector<SnapshotMatrix> snapshots;            ///< one per param, same order
    std::vector<std::vector<double>> angles;          ///< a_k(lambda_i), k = 1..P
    std::vector<double> singular_ladder;              ///< sigma_1..sigma_P
    std::vector<double> crossing_points;              ///< where theta_1 reaches pi/2
    std::vector<std::string> warnings;
    Matrix directions;                                ///< q_1..q_2P (n x 2P)
    Matrix coupled;                                   ///< h_1..h_P (non_nested only)

    /// Designed (unnormalized for non_nested) mode directions at node i.
    Matrix designed_directions(std::size_t i) const {
        const Eigen::Index p = spec.mode_count;
        Matrix u(spec.n, p);
        for (Eigen::Index k = 0; k < p; ++k) {
            const double a = angles[i][static_cast<std::size_t>(k)];
            const Vector partner = spec.kind == FamilyKind::non_nested ? Vector(coupled.col(k))
                                                                       : Vector(directions.col(p + k));
            u.col(k) = std::cos(a) * directions.col(k) + std::sin(a) * partner;
        }
        return u;
    }

    /// Span of the first p designed directions at node i.
    GrassmannPoint designed_subspace(std::size_t i, Eigen::Index p) const {
        return GrassmannPoint::span_of(designed_directions(i).leftCols(p));
    }
};

namespace detail {

inline double mode_angle(const FamilySpec& spec, Eigen::Index k, double lambda) {
    const double x = lambda - spec.center;
    const double P = static_cast<double>(spec.mode_count);
    switch (spec.kind) {
        case FamilyKind::rotation: return spec.rate * x;
        case FamilyKind::crossing: return spec.rate * x - spec.curvature * x * x;
        case FamilyKind::nested: return spec.rate * (1.0 + static_cast<double>(k) / P) * x;
        case FamilyKind::non_nested: return spec.rate * static_cast<double>(k + 1) * x;
    }
    return 0.0;
}

/// Real solutions of |rate x - curvature x^2| = pi/2, shifted by center.
inline std::vector<double> crossing_points(const FamilySpec& spec) {
    std::vector<double> out;
    const double h = kHalfPi;
    const double r = spec.rate;
    const double c = spec.curvature;
    if (c == 0.0) {
        if (r > 0.0) {
            out.push_back(spec.center - h / r);
            out.push_back(spec.center + h / r);
        }
        return out;
    }
    // c x^2 - r x + s = 0 for s = +h and s = -h
    for (double s : {h, -h}) {
        const double disc = r * r - 4.0 * c * s;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        out.push_back(spec.center + (r - sq) / (2.0 * c));
        if (sq > 0.0) out.push_back(spec.center + (r + sq) / (2.0 * c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline SynthFamily generate_family(FamilySpec spec) {
    spec.validate();
    std::sort(spec.params.begin(), spec.params.end());
    const Eigen::Index n = spec.n;
    const Eigen::Index nt = spec.n_t;
    const Eigen::Index P = spec.mode_count;

    SplitMix64 rng(spec.seed);
    SynthFamily fam;
    fam.directions = orthonormalize(rng.normal_matrix(n, 2 * P));
    const Matrix w = orthonormalize(rng.normal_matrix(nt, P));
    if (spec.kind == FamilyKind::non_nested) {
        const Matrix mix = rng.normal_matrix(P, P);
        fam.coupled = fam.directions.rightCols(P) * mix;
        fam.coupled.colwise().normalize();
    }
    for (Eigen::Index k = 0; k < P; ++k) {
        fam.singular_ladder.push_back(10.0 / std::ldexp(1.0, static_cast<int>(k)));
    }
    const Vector sigma = Eigen::Map<const Vector>(fam.singular_ladder.data(), P);
    const double noise_scale = 1e-6 / (std::sqrt(static_cast<double>(n)) + std::sqrt(static_cast<double>(nt)));

    fam.spec = spec;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        std::vector<double> a(static_cast<std::size_t>(P));
        for (Eigen::Index k = 0; k < P; ++k) a[static_cast<std::size_t>(k)] = detail::mode_angle(spec, k, spec.params[i]);
        fam.angles.push_back(std::move(a));

        Matrix s = fam.designed_directions(i) * sigma.asDiagonal() * w.transpose();
        Matrix e = noise_scale * rng.normal_matrix(n, nt);
        e -= fam.directions * (fam.directions.transpose() * e);
        e -= (e * w) * w.transpose();
        s += e;
        fam.snapshots.emplace_back(std::move(s), spec.params[i]);
    }

    if (spec.kind == FamilyKind::crossing) fam.crossing_points = detail::crossing_points(spec);
    if (spec.kind == FamilyKind::rotation) {
        const double spread = spec.params.back() - spec.params.front();
        if (spec.rate * spread >= kHalfPi) {
            fam.warnings.push_back("rotation family: rate * parameter spread >= pi/2; some node pairs "
                                   "lie on or beyond each other's cut locus");
        }
    }
    return fam;
}

namespace detail {
inline SynthFamily generate_checked(FamilySpec spec, FamilyKind kind, const char* who) {
    if (spec.kind != kind) throw ParameterError(std::string(who) + ": spec.kind mismatch");
    return generate_family(std::move(spec));
}
}  // namespace detail

inline SynthFamily gen_rotation_family(FamilySpec spec) {
    return detail::generate_checked(std::move(spec), FamilyKind::rotation, "gen_rotation_family");
}
inline SynthFamily gen_crossing_family(FamilySpec spec) {
    return detail::generate_checked(std::move(spec), FamilyKind::crossing, "gen_crossing_family");
}
inline SynthFamily gen_nested_family(FamilySpec spec) {
    return detail::generate_checked(std::move(spec), FamilyKind::nested, "gen_nested_family");
}
inline SynthFamily gen_non_nested_family(FamilySpec spec) {
    return detail::generate_checked(std::move(spec), FamilyKind::non_nested, "gen_non_nested_family");
}

}  // namespace gpm
