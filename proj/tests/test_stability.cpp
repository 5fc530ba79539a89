#include "support.hpp"

#include <gpm/stability.hpp>
#include <gpm/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using gpm::GrassmannPoint;
using gpm::Matrix;

namespace {

gpm::DistanceTable table3(double d01, double d02, double d12) {
    gpm::DistanceTable t;
    t.modes = {1, 2, 3};
    t.values = Matrix::Zero(3, 3);
    t.values(0, 1) = t.values(1, 0) = d01;
    t.values(0, 2) = t.values(2, 0) = d02;
    t.values(1, 2) = t.values(2, 1) = d12;
    return t;
}

}  // namespace

TEST(CheckC1, IdenticalPoints) {
    oracle::Rng rng(1);
    const GrassmannPoint y(rng.frame(6, 2));
    const gpm::TrainingSet ts({0.0, 1.0, 2.0}, {y, y, y});
    const gpm::C1Record r = gpm::check_c1(ts);
    EXPECT_TRUE(r.ok);
    for (double s : r.min_singular_values) EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(CheckC1, OrthogonalNodeFails) {
    const gpm::TrainingSet ts({0.0, 1.0, 2.0},
                              {GrassmannPoint(support::unit(3, {0})), GrassmannPoint(support::unit(3, {1})),
                               GrassmannPoint(support::unit(3, {0}))});
    const gpm::C1Record r = gpm::check_c1(ts, 0);
    EXPECT_FALSE(r.ok);
    ASSERT_EQ(r.failing_indices.size(), 1u);
    EXPECT_EQ(r.failing_indices[0], 1u);
    EXPECT_EQ(r.min_singular_values[1], 0.0);
}

TEST(CheckC1, NestedFamilyAcrossModes) {
    gpm::FamilySpec spec;
    spec.n = 60;
    spec.n_t = 25;
    spec.mode_count = 5;
    spec.kind = gpm::FamilyKind::nested;
    spec.rate = 0.01;
    spec.seed = 17;
    spec.params = {50.0, 60.0, 85.0, 90.0};
    spec.center = 70.0;
    const gpm::SynthFamily fam = gpm::generate_family(spec);
    for (Eigen::Index p : {1, 2, 5}) {
        std::vector<GrassmannPoint> pts;
        for (const auto& s : fam.snapshots) pts.push_back(gpm::compute_pod(s, p).basis);
        const gpm::TrainingSet ts(spec.params, pts);
        EXPECT_TRUE(gpm::check_c1(ts, 2).ok) << "p = " << p;
    }
}

TEST(CheckC2, Examples) {
    const GrassmannPoint base(support::unit(2, {0}));
    const auto zero = gpm::check_c2(gpm::TangentVector::zero(base));
    EXPECT_TRUE(zero.ok);
    EXPECT_EQ(zero.theta_max, 0.0);
    Matrix z(2, 1);
    z << 0.0, 1.5707;
    EXPECT_TRUE(gpm::check_c2(gpm::TangentVector(base, z)).ok);
    z(1, 0) = 1.58;
    const auto bad = gpm::check_c2(gpm::TangentVector(base, z));
    EXPECT_FALSE(bad.ok);
    EXPECT_NEAR(bad.theta_max, 1.58, 1e-15);
}

TEST(DistanceTable, ExactNestedFramesAreZero) {
    oracle::Rng rng(2);
    const Matrix q = rng.frame(10, 5);
    std::vector<std::pair<Eigen::Index, GrassmannPoint>> frames;
    for (Eigen::Index p : {1, 2, 5}) frames.emplace_back(p, GrassmannPoint(q.leftCols(p)));
    const gpm::DistanceTable t = gpm::c3_distance_table(frames);
    EXPECT_LT(t.values.cwiseAbs().maxCoeff(), 1e-15);
    const gpm::C3Record r = gpm::check_c3(t);
    EXPECT_EQ(r.epsilon, 0.0);
    EXPECT_TRUE(r.ok);
}

TEST(DistanceTable, RotatedFirstColumn) {
    Matrix y1 = Matrix::Zero(4, 1);
    y1(0, 0) = 1.0;
    Matrix y2 = Matrix::Zero(4, 2);
    y2(0, 0) = std::cos(0.3);
    y2(2, 0) = std::sin(0.3);
    y2(1, 1) = 1.0;  // orthogonal to Y_1
    const gpm::DistanceTable t =
        gpm::c3_distance_table({{1, GrassmannPoint(y1)}, {2, GrassmannPoint(y2)}});
    EXPECT_NEAR(t.values(0, 1), 0.3, 1e-12);
    EXPECT_EQ(t.values(0, 1), t.values(1, 0));
    EXPECT_EQ(t.values(0, 0), 0.0);
}

TEST(DistanceTable, SingleModeIsTrivial) {
    oracle::Rng rng(3);
    const gpm::DistanceTable t = gpm::c3_distance_table({{3, GrassmannPoint(rng.frame(8, 3))}});
    ASSERT_EQ(t.values.rows(), 1);
    EXPECT_EQ(t.values(0, 0), 0.0);
    EXPECT_THROW(gpm::check_c3(t), gpm::ParameterError);
}

TEST(DistanceTable, SymmetricAndParallelInvariant) {
    oracle::Rng rng(4);
    std::vector<std::pair<Eigen::Index, GrassmannPoint>> frames;
    for (Eigen::Index p : {1, 2, 3, 4}) frames.emplace_back(p, GrassmannPoint(rng.frame(12, p)));
    const gpm::DistanceTable a = gpm::c3_distance_table(frames, 1);
    const gpm::DistanceTable b = gpm::c3_distance_table(frames, 3);
    EXPECT_EQ(a.values, b.values);
    EXPECT_LT((a.values - a.values.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(a.values(i, i), 0.0);
    EXPECT_THROW(gpm::c3_distance_table({{1, frames[0].second}, {1, frames[1].second}}), gpm::ParameterError);
}

TEST(DistanceTable, EqualModesReduceToRiemannian) {
    oracle::Rng rng(5);
    const GrassmannPoint a(rng.frame(9, 3)), b(rng.frame(9, 3));
    // two entries of the same dimension (labels differ only to keep them distinct)
    const gpm::DistanceTable t = gpm::c3_distance_table({{3, a}, {30, b}});
    EXPECT_NEAR(t.values(0, 1), gpm::riemannian_distance(a, b), 1e-12);
}

TEST(CheckC3, PublishedVerdicts) {
    const gpm::C3Record unstable = gpm::check_c3_epsilon(554.03, 100.0);
    EXPECT_FALSE(unstable.ok);
    const gpm::C3Record stable = gpm::check_c3_epsilon(73.60, 100.0);
    EXPECT_TRUE(stable.ok);
    EXPECT_EQ(gpm::kDefaultC3Threshold, 100.0);
}

TEST(CheckC3, InjectedEpsilonTable) {
    const gpm::C3Record r = gpm::check_c3(table3(1.0, 555.03, 300.0));
    EXPECT_NEAR(r.epsilon, 554.03, 1e-10);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.delta_min, 1.0);
    EXPECT_EQ(r.delta_max, 555.03);
}

TEST(CheckC3, EqualEntriesGiveZero) {
    const gpm::C3Record r = gpm::check_c3(table3(0.4, 0.4, 0.4));
    EXPECT_EQ(r.epsilon, 0.0);
    EXPECT_TRUE(r.ok);
}

TEST(CheckC3, ZeroConventions) {
    const gpm::C3Record all_zero = gpm::check_c3(table3(0.0, 1e-12, 0.0));
    EXPECT_EQ(all_zero.epsilon, 0.0);
    EXPECT_TRUE(all_zero.ok);
    const gpm::C3Record partial = gpm::check_c3(table3(0.0, 0.2, 0.1));
    EXPECT_TRUE(std::isinf(partial.epsilon));
    EXPECT_FALSE(partial.ok);
}

TEST(CheckC3, ThresholdIsStrict) {
    const gpm::C3Record r = gpm::check_c3(table3(1.0, 101.0, 50.0), 100.0);
    EXPECT_DOUBLE_EQ(r.epsilon, 100.0);
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(gpm::check_c3(table3(1.0, 101.0, 50.0), 100.5).ok);
}

TEST(CheckC3, ScaleInvariant) {
    oracle::Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const gpm::DistanceTable t = table3(rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0));
        gpm::DistanceTable scaled = t;
        scaled.values *= 10.0;
        EXPECT_NEAR(gpm::check_c3(t).epsilon, gpm::check_c3(scaled).epsilon, 1e-12 * std::max(1.0, gpm::check_c3(t).epsilon));
    }
}

TEST(CheckC3, ExactPodBasesNest) {
    oracle::Rng rng(7);
    const gpm::SnapshotMatrix s(rng.matrix(40, 20), 0.0);
    const std::vector<Eigen::Index> modes{1, 2, 5, 10};
    const auto pods = gpm::compute_pods(s, modes);
    std::vector<std::pair<Eigen::Index, GrassmannPoint>> frames;
    for (const auto& r : pods) frames.emplace_back(r.mode, r.basis);
    EXPECT_LT(gpm::c3_distance_table(frames).values.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GrassmannDimension, Tables) {
    EXPECT_EQ(gpm::grassmann_dimension(20, 1728), 34160);
    EXPECT_EQ(gpm::grassmann_dimension(10, 726), 7160);
    EXPECT_EQ(gpm::grassmann_dimension(7, 7), 0);
    EXPECT_THROW(gpm::grassmann_dimension(8, 7), gpm::ParameterError);
}
