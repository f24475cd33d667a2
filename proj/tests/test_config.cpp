#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "twinbeam/config.hpp"

using namespace twinbeam;

namespace {

// Runs parse_config and returns the ConfigError it raises.
ConfigError config_error(std::string_view text, const std::vector<std::string>& overrides = {}) {
    try {
        (void)parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no ConfigError";
    return ConfigError("", "", 0);
}

std::string reference_with(const std::string& extra) { return std::string(kReferenceConfig) + extra; }

}  // namespace

TEST(Config, ReferenceSettings) {
    const auto c = reference_config();
    EXPECT_EQ(c.model.cavity1.r1(), 0.6157777584765669);
    EXPECT_EQ(c.model.cavity1.loss(), 0.01);
    EXPECT_EQ(c.model.cavity1.bandwidth_mhz(), 14.0);
    EXPECT_TRUE(c.model.identical_cavities());
    EXPECT_EQ(c.model.analysis_mhz, 27.0);
    EXPECT_EQ(c.model.efficiency, 0.72);
    EXPECT_EQ(c.correction_efficiency, 0.72);
    EXPECT_EQ(c.correction_efficiency_error, 0.0);
    const auto s = combine(c.state);
    EXPECT_NEAR(s.sp_minus, 0.63, 1e-12);
    EXPECT_NEAR(s.sq_plus, 0.84, 1e-12);
    EXPECT_NEAR(s.sp_plus, 3.0, 1e-12);
    EXPECT_NEAR(s.sq_minus, 3.0, 1e-12);
    EXPECT_EQ(c.plan, (SweepPlan{-56.0, 56.0, 200, 600.0, 1.0, 1}));
    EXPECT_EQ(c.fit_starts, 4u);
    EXPECT_FALSE(c.raw_sample_rate_mhz);
    EXPECT_FALSE(c.output_path);
}

TEST(Config, ShippedFileMatchesBuiltIn) {
    EXPECT_EQ(read_text_file(TWINBEAM_CONFIG_DIR "/reference.conf"), std::string(kReferenceConfig));
    const auto c = load_config(TWINBEAM_CONFIG_DIR "/reference.conf");
    EXPECT_EQ(config_echo(c), config_echo(reference_config()));
}

TEST(Config, EchoRoundTrips) {
    const auto c = reference_config({"output.path=/tmp/x.csv", "sweep.raw_sample_rate_mhz=120"});
    const auto echo = config_echo(c);
    EXPECT_NE(echo.find("efficiency = 0.72\n"), std::string::npos);
    const auto back = parse_config(echo);
    EXPECT_EQ(config_echo(back), echo);
    EXPECT_EQ(back.model, c.model);
    EXPECT_EQ(back.plan, c.plan);
    EXPECT_EQ(back.output_path, c.output_path);
    EXPECT_EQ(back.raw_sample_rate_mhz, c.raw_sample_rate_mhz);
}

TEST(Config, OverridesReplaceFileValues) {
    const auto c = reference_config({"sweep.points=50", "seed = 9", "correction_efficiency=1"});
    EXPECT_EQ(c.plan.points, 50u);
    EXPECT_EQ(c.plan.seed, 9u);
    EXPECT_EQ(c.correction_efficiency, 1.0);
    EXPECT_EQ(c.model.efficiency, 0.72);
}

TEST(Config, SecondCavityDefaultsToFirstOrIsComplete) {
    const auto c = parse_config(reference_with(
        "cavity2.r1 = 0.7\ncavity2.loss = 0.02\ncavity2.bandwidth_mhz = 15\n"));
    EXPECT_FALSE(c.model.identical_cavities());
    EXPECT_EQ(c.model.cavity2.r1(), 0.7);
    const auto e = config_error(reference_with("cavity2.r1 = 0.7\n"));
    EXPECT_EQ(e.field(), "cavity2.loss");
}

TEST(Config, BeamCovarianceState) {
    std::string text(kReferenceConfig);
    for (const char* k : {"state.sp_plus = 3.0\n", "state.sp_minus = 0.63\n",
                          "state.sq_plus = 0.84\n", "state.sq_minus = 3.0\n"}) {
        text.erase(text.find(k), std::string(k).size());
    }
    text += "state.vp1 = 1.815\nstate.vp2 = 1.815\nstate.vq1 = 1.92\nstate.vq2 = 1.92\n"
            "state.cp = 1.185\nstate.cq = -1.08\n";
    const auto c = parse_config(text);
    EXPECT_EQ(c.state.cp, 1.185);
    EXPECT_NEAR(combine(c.state).sp_minus, 0.63, 1e-12);
}

TEST(Config, MixedStateFormsRejected) {
    const auto e = config_error(reference_with("state.vp1 = 1.0\n"));
    EXPECT_EQ(e.field(), "state.vp1");
    EXPECT_EQ(e.line(), 22u);
}

TEST(Config, UnknownKeyNamesLine) {
    const auto e = config_error(reference_with("sweep.pionts = 3\n"));
    EXPECT_EQ(e.field(), "sweep.pionts");
    EXPECT_EQ(e.line(), 22u);
    EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
    EXPECT_EQ(config_error(kReferenceConfig, {"bogus=1"}).field(), "bogus");
}

TEST(Config, RepeatedKey) {
    const auto e = config_error(reference_with("seed = 2\n"));
    EXPECT_EQ(e.field(), "seed");
    EXPECT_EQ(e.line(), 22u);
    EXPECT_NE(std::string(e.what()).find("first on line 20"), std::string::npos);
}

TEST(Config, MissingKey) {
    std::string text(kReferenceConfig);
    text.erase(text.find("analysis_mhz = 27\n"), 18);
    const auto e = config_error(text);
    EXPECT_EQ(e.field(), "analysis_mhz");
    EXPECT_EQ(e.line(), 0u);
}

TEST(Config, SyntaxErrors) {
    EXPECT_EQ(config_error("cavity1.r1 0.5\n").line(), 1u);
    EXPECT_EQ(config_error("\n= 3\n").line(), 2u);
    EXPECT_EQ(config_error("seed =\n").field(), "seed");
}

TEST(Config, ValueErrorsBlameTheField) {
    struct Case {
        std::string override;
        std::string field;
    };
    const std::vector<Case> cases = {
        {"sweep.points=1", "sweep.points"},
        {"sweep.points=-3", "sweep.points"},
        {"sweep.points=ten", "sweep.points"},
        {"efficiency=0", "efficiency"},
        {"efficiency=1.5", "efficiency"},
        {"analysis_mhz=0", "analysis_mhz"},
        {"analysis_mhz=nan", "analysis_mhz"},
        {"cavity1.r1=1.2", "cavity1.r1"},
        {"correction_efficiency=0", "correction_efficiency"},
        {"correction_efficiency_error=-0.1", "correction_efficiency_error"},
        {"state.sp_minus=0.2", "state.sp_plus"},
        {"fit.starts=0", "fit.starts"},
        {"sweep.raw_sample_rate_mhz=50", "sweep.raw_sample_rate_mhz"},
        {"seed=1.5", "seed"},
    };
    for (const auto& c : cases) {
        const auto e = config_error(kReferenceConfig, {c.override});
        EXPECT_EQ(e.field(), c.field) << c.override << ": " << e.what();
        EXPECT_EQ(e.line(), c.field == "state.sp_plus" ? 9u : 0u) << c.override;
    }
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config(reference_with("  output.path = out.csv   # trailing\n\n\t\n"));
    ASSERT_TRUE(c.output_path);
    EXPECT_EQ(*c.output_path, "out.csv");
}

TEST(Config, MissingFile) {
    EXPECT_THROW((void)load_config("/nonexistent/x.conf"), InvalidInput);
}
