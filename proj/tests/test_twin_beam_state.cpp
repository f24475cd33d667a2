#include <cmath>

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "twinbeam/twin_beam_state.hpp"

using namespace twinbeam;

namespace {

TwinBeamCovariance reference_like() { return {1.815, 1.815, 1.92, 1.92, 1.185, -1.08}; }

}  // namespace

TEST(Combine, CoherentBeams) {
    const auto s = combine(TwinBeamCovariance::identity());
    EXPECT_EQ(s.sp_plus, 1.0);
    EXPECT_EQ(s.sp_minus, 1.0);
    EXPECT_EQ(s.sq_plus, 1.0);
    EXPECT_EQ(s.sq_minus, 1.0);
}

TEST(Combine, SymmetricConstruction) {
    const auto s = combine(reference_like());
    EXPECT_NEAR(s.sp_minus, 0.63, 1e-12);
    EXPECT_NEAR(s.sp_plus, 3.0, 1e-12);
    EXPECT_NEAR(s.sq_plus, 0.84, 1e-12);
    EXPECT_NEAR(s.sq_minus, 3.0, 1e-12);
}

TEST(Combine, SqueezedDifferenceNeedsPositiveCorrelation) {
    // Anti-correlated amplitudes squeeze the sum, not the difference.
    auto c = reference_like();
    c.cp = -c.cp;
    const auto s = combine(c);
    EXPECT_NEAR(s.sp_plus, 0.63, 1e-12);
    EXPECT_NEAR(s.sp_minus, 3.0, 1e-12);
}

TEST(Combine, SymmetricFactoryInverts) {
    const CombinedQuadratures want{3.0, 0.63, 0.84, 3.0};
    const auto cov = TwinBeamCovariance::symmetric(want);
    EXPECT_NEAR(cov.vp1, 1.815, 1e-12);
    EXPECT_NEAR(cov.cp, 1.185, 1e-12);
    EXPECT_NEAR(cov.vq1, 1.92, 1e-12);
    EXPECT_NEAR(cov.cq, -1.08, 1e-12);
    const auto got = combine(cov);
    EXPECT_NEAR(got.sp_minus, 0.63, 1e-12);
    EXPECT_NEAR(got.sq_plus, 0.84, 1e-12);
}

TEST(Combine, PerfectCorrelation) {
    const auto s = combine({2.0, 2.0, 1.0, 1.0, 2.0, 0.0});
    EXPECT_EQ(s.sp_minus, 0.0);
    EXPECT_EQ(s.sp_plus, 4.0);
}

TEST(ApplyLoss, Examples) {
    EXPECT_EQ(apply_loss(1.0, 0.3), 1.0);
    EXPECT_NEAR(apply_loss(0.4861111111111111, 0.72), 0.63, 1e-12);
    EXPECT_NEAR(apply_loss(5.0, 0.5), 3.0, 1e-15);
    EXPECT_THROW((void)apply_loss(0.0, 0.5), InvalidInput);
    EXPECT_THROW((void)apply_loss(1.0, 0.0), InvalidInput);
    EXPECT_THROW((void)apply_loss(1.0, 1.1), InvalidInput);
}

TEST(CorrectLoss, Examples) {
    EXPECT_NEAR(correct_loss(0.63, 0.72), 0.48611, 1e-5);
    EXPECT_NEAR(correct_loss(0.84, 0.72), 0.77778, 1e-5);
    EXPECT_NEAR(correct_loss(0.63, 0.72) + correct_loss(0.84, 0.72), 1.264, 1e-3);
    EXPECT_EQ(correct_loss(1.0, 0.4), 1.0);
}

TEST(CorrectLoss, RejectsInconsistentEfficiency) {
    EXPECT_THROW((void)correct_loss(0.63, 0.2), UnphysicalInput);
    EXPECT_THROW((void)correct_loss(0.8, 0.2), UnphysicalInput);
    EXPECT_NO_THROW((void)correct_loss(0.81, 0.2));
}

TEST(CorrectLoss, Covariance) {
    const auto c = correct_loss(apply_loss(reference_like(), 0.72), 0.72);
    const auto p = reference_like();
    EXPECT_NEAR(c.vp1, p.vp1, 1e-12);
    EXPECT_NEAR(c.vq2, p.vq2, 1e-12);
    EXPECT_NEAR(c.cp, p.cp, 1e-12);
    EXPECT_NEAR(c.cq, p.cq, 1e-12);
    // Combined variances transform by the scalar map.
    const auto s = combine(apply_loss(p, 0.6));
    EXPECT_NEAR(s.sp_plus, apply_loss(combine(p).sp_plus, 0.6), 1e-12);
    EXPECT_NEAR(s.sq_plus, apply_loss(combine(p).sq_plus, 0.6), 1e-12);
}

TEST(Physicality, Identity) { EXPECT_TRUE(validate_physicality(TwinBeamCovariance::identity()).empty()); }

TEST(Physicality, HeisenbergViolation) {
    TwinBeamCovariance c;
    c.vp1 = 0.5;
    c.vq1 = 0.5;
    const auto v = validate_physicality(c);
    ASSERT_FALSE(v.empty());
    bool found = false;
    for (const auto& x : v) {
        if (x.constraint == "vp1*vq1 >= 1") {
            found = true;
            EXPECT_NEAR(x.margin, 0.75, 1e-15);
        }
    }
    EXPECT_TRUE(found);
    EXPECT_THROW(require_physical(c), UnphysicalInput);
}

TEST(Physicality, SymmetricConstruction) { EXPECT_TRUE(validate_physicality(reference_like()).empty()); }

TEST(Physicality, CauchySchwarzAndPositivity) {
    auto v = validate_physicality({1.0, 1.0, 1.0, 1.0, 1.5, 0.0});
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v.front().constraint, "|cp| <= sqrt(vp1*vp2)");
    v = validate_physicality({-1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v.front().constraint, "vp1 > 0");
}

// Properties

TEST(StateProperties, CombineIsLinear) {
    gen::Source g(21);
    for (int i = 0; i < 1000; ++i) {
        const auto c1 = g.covariance();
        const auto c2 = g.covariance();
        const double a = g.uniform(0.0, 3.0);
        const double b = g.uniform(0.0, 3.0);
        const auto lhs = combine(a * c1 + b * c2);
        const auto s1 = combine(c1);
        const auto s2 = combine(c2);
        EXPECT_NEAR(lhs.sp_plus, a * s1.sp_plus + b * s2.sp_plus, 1e-12);
        EXPECT_NEAR(lhs.sp_minus, a * s1.sp_minus + b * s2.sp_minus, 1e-12);
        EXPECT_NEAR(lhs.sq_plus, a * s1.sq_plus + b * s2.sq_plus, 1e-12);
        EXPECT_NEAR(lhs.sq_minus, a * s1.sq_minus + b * s2.sq_minus, 1e-12);
    }
}

TEST(StateProperties, SumRule) {
    gen::Source g(22);
    for (int i = 0; i < 1000; ++i) {
        const auto c = g.covariance();
        const auto s = combine(c);
        EXPECT_NEAR(s.sp_plus + s.sp_minus, c.vp1 + c.vp2, 1e-12);
        EXPECT_NEAR(s.sq_plus + s.sq_minus, c.vq1 + c.vq2, 1e-12);
    }
}

TEST(StateProperties, LossRoundTrip) {
    gen::Source g(23);
    for (int i = 0; i < 10000; ++i) {
        const double eta = g.uniform(0.01, 1.0);
        const double v = g.log_uniform(1e-3, 1e3);
        EXPECT_NEAR(correct_loss(apply_loss(v, eta), eta), v, 1e-12 * std::max(1.0, v));
        const double m = g.uniform(1.0 - eta + 1e-6, 1e3);
        EXPECT_NEAR(apply_loss(correct_loss(m, eta), eta), m, 1e-12 * std::max(1.0, m));
    }
}

TEST(StateProperties, LossContractsTowardVacuum) {
    gen::Source g(24);
    for (int i = 0; i < 10000; ++i) {
        const double eta = g.uniform(0.01, 1.0);
        const double v = g.log_uniform(1e-3, 1e3);
        const double out = apply_loss(v, eta);
        EXPECT_NEAR(std::abs(out - 1.0), eta * std::abs(v - 1.0), 1e-12 * std::max(1.0, v));
        EXPECT_LE(std::abs(out - 1.0), std::abs(v - 1.0) + 1e-12);
    }
}

TEST(StateProperties, CorrectionDeepensSqueezing) {
    gen::Source g(25);
    for (int i = 0; i < 10000; ++i) {
        const double eta = g.uniform(0.01, 0.999);
        const double v = g.uniform(1.0 - eta + 1e-6, 0.999);
        EXPECT_LT(correct_loss(v, eta), v);
    }
}

TEST(StateProperties, LossPreservesPhysicality) {
    gen::Source g(26);
    for (int i = 0; i < 1000; ++i) {
        const auto c = g.covariance();
        EXPECT_TRUE(validate_physicality(apply_loss(c, g.uniform(0.01, 1.0))).empty());
    }
}
