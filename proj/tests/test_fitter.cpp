#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "twinbeam/fitter.hpp"

using namespace twinbeam;

namespace {

constexpr double kR1 = 0.6157777584765669;
constexpr double kBw = 14.0;
constexpr double kOmega = 27.0;
constexpr double kEta = 0.72;

CavitySpec reference_cavity() { return CavitySpec::make(kR1, 0.01, kBw); }

ChannelModel reference_model() { return ChannelModel::make(reference_cavity(), reference_cavity(), kOmega, kEta); }

TwinBeamCovariance reference_like() { return {1.815, 1.815, 1.92, 1.92, 1.185, -1.08}; }

// Exact model values for the difference channel, as if N were infinite.
FitProblem noiseless(double sp, double sq, double center, double scale = 1.0,
                     std::size_t points = 200) {
    FitProblem p;
    p.channel = FitChannel::difference;
    p.cavity = reference_cavity();
    p.analysis_mhz = kOmega;
    p.efficiency = kEta;
    for (double d : linear_grid(-56.0, 56.0, points)) {
        SweepRow r;
        r.detuning_mhz = d;
        r.s_diff = scale * combined_channel_spectrum(p.cavity, d - center, kOmega, sp, sq, kEta);
        r.s_sum = r.s_diff;
        r.s_ch1 = r.s_ch2 = r.s_diff;
        r.n_samples = 600;
        p.rows.push_back(r);
    }
    return p;
}

SweepDataset reference_data(std::uint64_t seed, std::size_t points = 200, double vbw = 1.0) {
    return synthesize_sweep({-56.0, 56.0, points, 600.0, vbw, seed}, reference_model(), reference_like());
}

}  // namespace

TEST(Fit, NoiselessFixedPoint) {
    gen::Source g(71);
    for (int i = 0; i < 10; ++i) {
        auto p = noiseless(0.63, 3.0, 2.5);
        p.start = {0.63 * g.uniform(0.8, 1.2), 3.0 * g.uniform(0.8, 1.2), 1.0,
                   2.5 + g.uniform(-0.2, 0.2) * kBw};
        const auto r = fit(p);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.sp.value, 0.63, 1e-6);
        EXPECT_NEAR(r.sq.value, 3.0, 1e-6);
        EXPECT_NEAR(r.center_mhz.value, 2.5, 1e-6);
        EXPECT_LT(r.cost, 1e-12);
    }
}

TEST(Fit, NoiselessSumChannel) {
    auto p = noiseless(3.0, 0.84, -1.0);
    p.channel = FitChannel::sum;
    p.start = initial_guess(p);
    const auto r = fit(p);
    EXPECT_NEAR(r.sp.value, 3.0, 1e-6);
    EXPECT_NEAR(r.sq.value, 0.84, 1e-6);
    EXPECT_NEAR(r.center_mhz.value, -1.0, 1e-6);
}

TEST(Fit, AutomaticPolicyPinsScaleAtReferenceSettings) {
    auto p = noiseless(0.63, 3.0, 0.0);
    p.start = initial_guess(p);
    const auto r = fit(p);
    EXPECT_TRUE(r.scale_pinned);
    EXPECT_GT(r.condition_number, kDegenerateCondition);
    EXPECT_EQ(r.scale.value, 1.0);
    EXPECT_EQ(r.scale.error, 0.0);
    EXPECT_EQ(r.free_parameters, 3u);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings.front().find("pinned"), std::string::npos);
}

TEST(Fit, FreeScaleRecoversGain) {
    for (double k : {0.8, 1.3}) {
        auto p = noiseless(0.63, 3.0, 1.0, k);
        p.scale_policy = ScalePolicy::free;
        p.start = {0.63 * 1.1, 3.0 * 0.9, 1.0, 0.0};
        const auto r = fit(p);
        EXPECT_FALSE(r.scale_pinned);
        EXPECT_EQ(r.free_parameters, 4u);
        EXPECT_NEAR(r.scale.value, k, 1e-4);
        EXPECT_NEAR(r.sp.value, 0.63, 1e-4);
        EXPECT_NEAR(r.sq.value, 3.0, 1e-3);
    }
}

TEST(Fit, FixedScaleUsesStart) {
    auto p = noiseless(0.63, 3.0, 0.0, 1.3);
    p.scale_policy = ScalePolicy::fixed;
    p.start = {0.7, 2.5, 1.3, 0.5};
    const auto r = fit(p);
    EXPECT_EQ(r.scale.value, 1.3);
    EXPECT_NEAR(r.sp.value, 0.63, 1e-6);
}

TEST(Fit, FittedCurveReproducesData) {
    auto p = noiseless(0.63, 3.0, 2.0);
    p.start = initial_guess(p);
    const auto r = fit(p);
    std::vector<double> d;
    for (const auto& row : p.rows) {
        d.push_back(row.detuning_mhz);
    }
    const auto curve = fitted_curve(p, r, d);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_NEAR(curve[i], p.rows[i].s_diff, 1e-8);
    }
}

TEST(InitialGuess, LandsNearTruth) {
    auto p = noiseless(0.63, 3.0, 4.0);
    const auto s = initial_guess(p);
    EXPECT_NEAR(s.center_mhz, 4.0, 112.0 / 120.0);
    EXPECT_NEAR(s.sp, 0.63, 0.1);
    EXPECT_NEAR(s.sq, 3.0, 0.5);
    p.rows.clear();
    EXPECT_THROW((void)initial_guess(p), InvalidInput);
}

TEST(Fit, SimulatedReferenceData) {
    const auto ds = reference_data(1);
    for (auto ch : {FitChannel::difference, FitChannel::sum}) {
        const auto p = FitProblem::from_dataset(ds, ch);
        const auto r = fit(p);
        const bool diff = ch == FitChannel::difference;
        EXPECT_NEAR(r.sp.value, diff ? 0.63 : 3.0, 4.0 * r.sp.error) << fit_channel_name(ch);
        EXPECT_NEAR(r.sq.value, diff ? 3.0 : 0.84, 4.0 * r.sq.error) << fit_channel_name(ch);
        EXPECT_NEAR(r.center_mhz.value, 0.0, 4.0 * r.center_mhz.error);
        EXPECT_GT(r.chi2_per_dof, 0.7);
        EXPECT_LT(r.chi2_per_dof, 1.3);
        EXPECT_EQ(r.points, 200u);
    }
}

TEST(Fit, ChiSquarePerDofAveragesToOne) {
    double total = 0.0;
    const int reps = 20;
    for (int s = 0; s < reps; ++s) {
        const auto p = FitProblem::from_dataset(reference_data(100 + s), FitChannel::difference);
        total += fit(p).chi2_per_dof;
    }
    // Standard error of the mean is about sqrt(2/197/20) = 0.023.
    EXPECT_NEAR(total / reps, 1.0, 0.08);
}

TEST(Fit, UncertaintiesCoverTruth) {
    const int reps = 100;
    int within1 = 0;
    int within3 = 0;
    double mean = 0.0;
    double mean_err = 0.0;
    for (int s = 0; s < reps; ++s) {
        const auto p = FitProblem::from_dataset(reference_data(1000 + s), FitChannel::difference);
        const auto r = fit(p);
        const double z = std::abs(r.sp.value - 0.63) / r.sp.error;
        within1 += z <= 1.0 ? 1 : 0;
        within3 += z <= 3.0 ? 1 : 0;
        mean += r.sp.value / reps;
        mean_err += r.sp.error / reps;
    }
    // Nominal 68%; the binomial standard deviation over 100 reps is 4.7%.
    EXPECT_GE(within1, 54);
    EXPECT_LE(within1, 82);
    EXPECT_GE(within3, 97);
    EXPECT_NEAR(mean, 0.63, 3.0 * mean_err / std::sqrt(static_cast<double>(reps)));
}

TEST(Fit, FarDetunedDataCannotIdentifyBothVariances) {
    // Beyond three bandwidths the cavity barely rotates, so Sq and the
    // center are weakly constrained.
    const auto ds = reference_data(3);
    auto full = FitProblem::from_dataset(ds, FitChannel::difference);
    const auto ref = fit(full);
    auto far = full;
    far.rows.clear();
    for (const auto& r : full.rows) {
        if (std::abs(r.detuning_mhz) > 3.0 * kBw) {
            far.rows.push_back(r);
        }
    }
    ASSERT_GT(far.rows.size(), 10u);
    far.start = initial_guess(far);
    try {
        const auto r = fit(far);
        EXPECT_GT(r.sq.error, 5.0 * ref.sq.error);
    } catch (const FitError& e) {
        EXPECT_NE(e.kind(), FitError::Kind::all_starts_failed);
        EXPECT_NE(std::string(e.what()).find("unidentifiable"), std::string::npos);
    }
}

TEST(MultiStart, SingleStartEqualsFit) {
    const auto p = FitProblem::from_dataset(reference_data(4), FitChannel::difference);
    const auto a = fit(p);
    const auto b = multi_start(p, 1, 99);
    EXPECT_EQ(a.sp.value, b.sp.value);
    EXPECT_EQ(a.sq.value, b.sq.value);
    EXPECT_EQ(a.center_mhz.value, b.center_mhz.value);
    EXPECT_EQ(a.cost, b.cost);
}

TEST(MultiStart, DeterministicAndNoWorse) {
    auto p = FitProblem::from_dataset(reference_data(5), FitChannel::difference);
    const auto a = multi_start(p, 6, 7);
    const auto b = multi_start(p, 6, 7);
    EXPECT_EQ(a.sp.value, b.sp.value);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_LE(a.cost, fit(p).cost + 1e-9);
}

TEST(MultiStart, EscapesPoorStart) {
    auto p = FitProblem::from_dataset(reference_data(6), FitChannel::difference);
    p.start = {0.01, 50.0, 1.0, 40.0};
    const auto r = multi_start(p, 8, 3);
    EXPECT_NEAR(r.center_mhz.value, 0.0, 4.0 * r.center_mhz.error);
    EXPECT_NEAR(r.sp.value, 0.63, 4.0 * r.sp.error);
    EXPECT_THROW((void)multi_start(p, 0, 3), InvalidInput);
}

TEST(FitReport, ReferenceArithmetic) {
    FitResult sum;
    sum.converged = true;
    sum.sp = {3.0, 0.05};
    sum.sq = {0.84, 0.01};
    FitResult diff;
    diff.converged = true;
    diff.sp = {0.63, 0.02};
    diff.sq = {3.0, 0.05};
    const auto rep = fit_report(sum, diff, kEta);
    EXPECT_NEAR(rep.duan_sum.value, 1.47, 1e-12);
    EXPECT_NEAR(rep.duan_sum.error, std::hypot(0.02, 0.01), 1e-9);
    ASSERT_TRUE(rep.corrected_duan_sum);
    EXPECT_NEAR(rep.corrected_duan_sum->value, 1.264, 1e-3);
    ASSERT_TRUE(rep.epr_product);
    EXPECT_NEAR(rep.epr_product->value, 1.3667, 1e-4);
    diff.converged = false;
    EXPECT_THROW((void)fit_report(sum, diff, kEta), InvalidInput);
}

TEST(FitNames, Labels) {
    EXPECT_STREQ(fit_channel_name(FitChannel::sum), "sum");
    EXPECT_STREQ(fit_channel_name(FitChannel::difference), "difference");
}

// Properties

TEST(FitProperties, NoiselessRecoveryAcrossStates) {
    gen::Source g(72);
    for (int i = 0; i < 25; ++i) {
        const double sp = g.log_uniform(0.3, 5.0);
        const double sq = g.log_uniform(0.3, 5.0);
        const double c = g.uniform(-0.3, 0.3) * kBw;
        auto p = noiseless(sp, sq, c);
        p.start = initial_guess(p);
        const auto r = fit(p);
        EXPECT_NEAR(r.sp.value / sp, 1.0, 1e-6) << sp << " " << sq << " " << c;
        EXPECT_NEAR(r.sq.value / sq, 1.0, 1e-6) << sp << " " << sq << " " << c;
        EXPECT_NEAR(r.center_mhz.value, c, 1e-5);
    }
}

TEST(FitProperties, CenterShiftEquivariance) {
    // Moving the whole trace moves only the fitted center.
    const auto ds = reference_data(8);
    auto p = FitProblem::from_dataset(ds, FitChannel::difference);
    const auto base = fit(p);
    gen::Source g(73);
    for (int i = 0; i < 5; ++i) {
        const double shift = g.uniform(-5.0, 5.0);
        auto q = p;
        for (auto& r : q.rows) {
            r.detuning_mhz += shift;
        }
        q.start = initial_guess(q);
        const auto r = fit(q);
        EXPECT_NEAR(r.center_mhz.value, base.center_mhz.value + shift, 1e-4);
        EXPECT_NEAR(r.sp.value, base.sp.value, 1e-5);
        EXPECT_NEAR(r.sq.value, base.sq.value, 1e-4);
    }
}
