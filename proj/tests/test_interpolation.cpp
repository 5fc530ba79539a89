#include "support.hpp"

#include <gpm/interpolation.hpp>
#include <gpm/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using gpm::GrassmannPoint;
using gpm::Matrix;
using gpm::TrainingSet;

namespace {

TrainingSet random_set(oracle::Rng& rng, long n, long p, std::size_t count, double spread) {
    const GrassmannPoint center(rng.frame(n, p));
    std::vector<double> params;
    std::vector<GrassmannPoint> pts;
    for (std::size_t i = 0; i < count; ++i) {
        params.push_back(static_cast<double>(i) + rng.uniform(0.0, 0.5));
        const gpm::TangentVector v = gpm::TangentVector::project(center, spread * rng.matrix(n, p));
        pts.push_back(gpm::exp_map(center, v));
    }
    return TrainingSet(params, pts);
}

GrassmannPoint line(double a) {
    Matrix y = Matrix::Zero(3, 1);
    y(0, 0) = std::cos(a);
    y(1, 0) = std::sin(a);
    return GrassmannPoint(y);
}

}  // namespace

TEST(LagrangeWeights, NodeGivesUnitVector) {
    const std::vector<double> x{0.0, 1.5, 2.0, 4.0};
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto w = gpm::lagrange_weights(x, x[k]);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(w[i], i == k ? 1.0 : 0.0);
    }
}

TEST(LagrangeWeights, LinearMidpoint) {
    const auto w = gpm::lagrange_weights(std::vector<double>{0.0, 1.0}, 0.5);
    EXPECT_DOUBLE_EQ(w[0], 0.5);
    EXPECT_DOUBLE_EQ(w[1], 0.5);
}

TEST(LagrangeWeights, BenchmarkNodesAgainstBarycentric) {
    const std::vector<double> x{50.0, 60.0, 85.0, 90.0};
    const auto w = gpm::lagrange_weights(x, 75.0);
    const auto b = oracle::barycentric_weights(x, 75.0);
    // frozen from the barycentric oracle: -9/56, 1/2, 9/7, -5/8
    const std::vector<double> frozen{-9.0 / 56.0, 0.5, 9.0 / 7.0, -5.0 / 8.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(w[i], b[i], 1e-12);
        EXPECT_NEAR(w[i], frozen[i], 1e-12);
    }
}

TEST(LagrangeWeights, PartitionOfUnity) {
    oracle::Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x;
        const long count = rng.integer(1, 7);
        for (long i = 0; i < count; ++i) x.push_back(static_cast<double>(i) + rng.uniform(0.0, 0.9));
        const double t = rng.uniform(-0.5, static_cast<double>(count));
        const auto w = gpm::lagrange_weights(x, t);
        EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
        const auto b = oracle::barycentric_weights(x, t);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(w[i], b[i], 1e-10 * std::max(1.0, std::abs(b[i])));
    }
}

TEST(LagrangeWeights, DuplicateNodesRejected) {
    EXPECT_THROW(gpm::lagrange_weights(std::vector<double>{1.0, 2.0, 1.0}, 0.0), gpm::ParameterError);
}

TEST(TrainingSet, Validation) {
    const GrassmannPoint a(support::unit(4, {0}));
    const GrassmannPoint b(support::unit(4, {0, 1}));
    EXPECT_THROW(TrainingSet({}, {}), gpm::ParameterError);
    EXPECT_THROW(TrainingSet({0.0}, {a, a}), gpm::ParameterError);
    EXPECT_THROW(TrainingSet({0.0, 0.0}, {a, a}), gpm::ParameterError);
    EXPECT_THROW(TrainingSet({0.0, 1.0}, {a, b}), gpm::ParameterError);
    EXPECT_THROW(TrainingSet({0.0, 1.0}, {a, a}, 2), gpm::ParameterError);
    EXPECT_THROW(TrainingSet({0.0}, {GrassmannPoint(Matrix::Identity(3, 2))}), gpm::ParameterError);
}

TEST(TrainingSet, ReferenceDefaultsToNearest) {
    const GrassmannPoint a(support::unit(4, {0}));
    const TrainingSet ts({50.0, 60.0, 85.0, 90.0}, {a, a, a, a});
    EXPECT_EQ(ts.resolve_reference(75.0), 2u);  // |75-85| < |75-60|
    EXPECT_EQ(ts.resolve_reference(55.0), 0u);  // tie -> lowest index
    EXPECT_TRUE(ts.is_extrapolation(95.0));
    EXPECT_FALSE(ts.is_extrapolation(50.0));
    const TrainingSet fixed({50.0, 60.0, 85.0, 90.0}, {a, a, a, a}, 1);
    EXPECT_EQ(fixed.resolve_reference(88.0), 1u);
}

TEST(Interpolate, NodeReproduction) {
    oracle::Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const TrainingSet ts = random_set(rng, 12, 3, 4, 0.2);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto r = gpm::interpolate(ts, ts.params()[i]);
            ASSERT_TRUE(r.stable());
            EXPECT_LT(gpm::riemannian_distance(*r.frame, ts.points()[i]), 1e-9);
            EXPECT_LE(gpm::orthonormality_deviation(r.frame->frame()), 1e-10);
        }
    }
}

TEST(Interpolate, SingleNodeIsConstant) {
    oracle::Rng rng(3);
    const GrassmannPoint y(rng.frame(6, 2));
    const TrainingSet ts({1.0}, {y});
    for (double t : {-3.0, 1.0, 7.5}) {
        const auto r = gpm::interpolate(ts, t);
        ASSERT_TRUE(r.stable());
        EXPECT_LT(gpm::riemannian_distance(*r.frame, y), 1e-15);
        EXPECT_EQ(r.theta_max, 0.0);
    }
}

TEST(Interpolate, RotationFamilyIsExact) {
    gpm::FamilySpec spec;
    spec.n = 30;
    spec.n_t = 12;
    spec.mode_count = 1;
    spec.kind = gpm::FamilyKind::rotation;
    spec.rate = 1.0;  // parameter equals angle in radians
    spec.seed = 42;
    spec.params = {0.0, 0.2, 0.4};
    const gpm::SynthFamily fam = gpm::generate_family(spec);
    std::vector<GrassmannPoint> pts;
    for (const auto& s : fam.snapshots) pts.push_back(gpm::compute_pod(s, 1).basis);
    const TrainingSet ts(spec.params, pts);
    const auto r = gpm::interpolate(ts, 0.3);
    ASSERT_TRUE(r.stable());
    const Matrix expected = std::cos(0.3) * fam.directions.col(0) + std::sin(0.3) * fam.directions.col(1);
    EXPECT_LT(gpm::riemannian_distance(*r.frame, GrassmannPoint::span_of(expected)), 1e-8);
}

TEST(Interpolate, LinearLiftInsideHullIsExact) {
    // nodes on one geodesic through the reference: the lift is linear in lambda
    oracle::Rng rng(4);
    const GrassmannPoint base(rng.frame(10, 2));
    const gpm::TangentVector v(base, support::lift_with_angles(rng, base, {0.6, 0.25}));
    const std::vector<double> params{-1.0, -0.3, 0.0, 0.5, 1.2};
    std::vector<GrassmannPoint> pts;
    for (double l : params) pts.push_back(gpm::geodesic(base, v, l));
    const TrainingSet ts(params, pts, 2);
    for (double t = -1.0; t <= 1.2; t += 0.05) {
        const auto r = gpm::interpolate(ts, t);
        ASSERT_TRUE(r.stable());
        EXPECT_LT(gpm::riemannian_distance(*r.frame, gpm::geodesic(base, v, t)), 1e-8) << t;
        EXPECT_LT(gpm::TangentVector::horizontality_defect(base, r.velocity->lift()), 1e-10);
    }
}

TEST(Interpolate, C1FailureIsReported) {
    const TrainingSet ts({0.0, 1.0}, {GrassmannPoint(support::unit(2, {0})), GrassmannPoint(support::unit(2, {1}))}, 0);
    const auto r = gpm::interpolate(ts, 0.5);
    EXPECT_FALSE(r.c1_ok);
    EXPECT_FALSE(r.stable());
    EXPECT_FALSE(r.frame.has_value());
    ASSERT_EQ(r.c1.failing_indices.size(), 1u);
    EXPECT_EQ(r.c1.failing_indices[0], 1u);
    EXPECT_TRUE(std::isnan(r.theta_max));
}

TEST(Interpolate, C2FailureOnExtrapolation) {
    const TrainingSet ts({0.0, 1.0}, {line(0.0), line(1.0)}, 0);
    const auto ok = gpm::interpolate(ts, 1.5);
    EXPECT_TRUE(ok.stable());
    EXPECT_TRUE(ok.extrapolated);
    EXPECT_NEAR(ok.theta_max, 1.5, 1e-14);
    const auto bad = gpm::interpolate(ts, 1.7);
    EXPECT_TRUE(bad.c1_ok);
    EXPECT_FALSE(bad.c2_ok);
    EXPECT_GE(bad.theta_max, gpm::kHalfPi);
    EXPECT_FALSE(bad.frame.has_value());
}

TEST(C2Gate, Margin) {
    EXPECT_TRUE(gpm::c2_stable(1.5707));
    EXPECT_FALSE(gpm::c2_stable(gpm::kHalfPi));
    EXPECT_FALSE(gpm::c2_stable(gpm::kHalfPi - 1e-13));
    EXPECT_FALSE(gpm::c2_stable(1.58));
}

TEST(UniformGrid, Spacing) {
    const auto g = gpm::uniform_grid(50.0, 90.0, 401);
    ASSERT_EQ(g.size(), 401u);
    EXPECT_EQ(g.front(), 50.0);
    EXPECT_EQ(g.back(), 90.0);
    for (std::size_t k = 1; k < g.size(); ++k) EXPECT_NEAR(g[k] - g[k - 1], 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(g[250], 75.0);
    const auto h = gpm::uniform_grid(15.0, 30.0, 151);
    for (std::size_t k = 1; k < h.size(); ++k) EXPECT_NEAR(h[k] - h[k - 1], 0.1, 1e-12);
    EXPECT_THROW(gpm::uniform_grid(1.0, 1.0, 5), gpm::ParameterError);
    EXPECT_THROW(gpm::uniform_grid(0.0, 1.0, 1), gpm::ParameterError);
}

TEST(C2Sweep, ConstantFamilyIsFlat) {
    oracle::Rng rng(5);
    const GrassmannPoint y(rng.frame(8, 2));
    const TrainingSet ts({0.0, 1.0, 2.0}, {y, y, y});
    const auto s = gpm::c2_sweep(ts, -1.0, 3.0, 41);
    for (const auto& x : s.samples) {
        EXPECT_TRUE(x.valid);
        EXPECT_LE(x.theta_max, 1e-14);
    }
    EXPECT_TRUE(s.all_stable());
    EXPECT_TRUE(s.unstable_intervals().empty());
}

TEST(C2Sweep, ZeroAtReferenceNode) {
    oracle::Rng rng(6);
    const TrainingSet ts = random_set(rng, 10, 2, 3, 0.3);
    const TrainingSet fixed(ts.params(), ts.points(), 1);
    const double lo = ts.params()[0];
    const double hi = ts.params()[1];
    const auto s = gpm::c2_sweep(fixed, lo - (hi - lo), hi, 3);
    EXPECT_EQ(s.samples[2].param, hi);
    EXPECT_EQ(s.samples[2].theta_max, 0.0);
}

TEST(C2Sweep, LineCrossingInterval) {
    // theta(lambda) = |lambda| along a great circle; unstable where |lambda| >= pi/2
    const std::vector<double> params{-1.0, 0.0, 1.0};
    std::vector<GrassmannPoint> pts;
    for (double l : params) pts.push_back(line(l));
    const TrainingSet ts(params, pts, 1);
    const auto s = gpm::c2_sweep(ts, -2.0, 2.0, 401, 3);
    const auto iv = s.unstable_intervals();
    ASSERT_EQ(iv.size(), 2u);
    const double step = s.step();
    EXPECT_NEAR(iv[0].first, -2.0, 1e-15);
    EXPECT_NEAR(iv[0].second, -gpm::kHalfPi, step);
    EXPECT_NEAR(iv[1].first, gpm::kHalfPi, step);
    EXPECT_NEAR(iv[1].second, 2.0, 1e-15);
}

TEST(C2Sweep, ThreadCountDoesNotChangeResults) {
    oracle::Rng rng(7);
    const TrainingSet ts = random_set(rng, 10, 2, 4, 0.4);
    const auto a = gpm::c2_sweep(ts, 0.0, 3.5, 101, 1);
    const auto b = gpm::c2_sweep(ts, 0.0, 3.5, 101, 4);
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        EXPECT_EQ(a.samples[k].theta_max, b.samples[k].theta_max);
        EXPECT_EQ(a.samples[k].c2_ok, b.samples[k].c2_ok);
    }
}

TEST(C2Sweep, C1FailureMarksSamplesInvalid) {
    const TrainingSet ts({0.0, 1.0}, {GrassmannPoint(support::unit(2, {0})), GrassmannPoint(support::unit(2, {1}))}, 0);
    const auto s = gpm::c2_sweep(ts, 0.0, 1.0, 5);
    EXPECT_FALSE(s.c1.ok);
    for (const auto& x : s.samples) EXPECT_FALSE(x.valid);
    EXPECT_FALSE(s.all_stable());
    EXPECT_TRUE(s.unstable_intervals().empty());
}

TEST(C2Sweep, GridPointMatchesDirectInterpolation) {
    oracle::Rng rng(8);
    const TrainingSet base = random_set(rng, 10, 2, 4, 0.4);
    const TrainingSet ts(base.params(), base.points(), 2);
    const auto s = gpm::c2_sweep(ts, 0.0, 3.0, 31);
    for (std::size_t k = 0; k < s.samples.size(); k += 5) {
        const auto r = gpm::interpolate(ts, s.samples[k].param);
        EXPECT_NEAR(r.theta_max, s.samples[k].theta_max, 1e-15);
    }
}

TEST(Parallel, VisitsEachIndexOnceAndRethrows) {
    std::vector<int> hits(1000, 0);
    gpm::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(gpm::parallel_for(10, 3,
                                   [](std::size_t i) {
                                       if (i == 7) throw gpm::DataError("boom");
                                   }),
                 gpm::DataError);
}
