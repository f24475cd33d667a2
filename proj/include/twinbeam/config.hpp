#pragma once

// Run configuration: flat `key = value` lines, `#` starts a comment, keys are
// dotted. Unknown keys and repeated keys are errors. Overrides given as
// `key=value` strings replace file values before validation.
//
//   cavity1.r1, cavity1.loss, cavity1.bandwidth_mhz      required
//   cavity2.*                                            defaults to cavity1
//   analysis_mhz, efficiency                             required
//   correction_efficiency, correction_efficiency_error   default: efficiency, 0
//   state.sp_plus, state.sp_minus, state.sq_plus, state.sq_minus
//     or state.vp1, state.vp2, state.vq1, state.vq2, state.cp, state.cq
//   sweep.start_mhz, sweep.end_mhz, sweep.points, sweep.rbw_khz, sweep.vbw_khz
//   sweep.raw_sample_rate_mhz                            optional; raw chain
//   seed                                                 default 1
//   fit.starts                                           default 4
//   output.path                                          optional

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "twinbeam/cavity_optics.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/noise_model.hpp"
#include "twinbeam/sweep_io.hpp"
#include "twinbeam/sweep_lab.hpp"
#include "twinbeam/twin_beam_state.hpp"

namespace twinbeam {

// Reference settings: 14 MHz analysis cavities whose model linewidth equals the
// bandwidth scale, 27 MHz analysis frequency, 72% detection efficiency, and
// the 600 kHz / 1 kHz analyzer bandwidths over +-4 bandwidths of detuning.
inline constexpr std::string_view kReferenceConfig = R"(# twinbeam reference settings
cavity1.r1 = 0.6157777584765669
cavity1.loss = 0.01
cavity1.bandwidth_mhz = 14

analysis_mhz = 27
efficiency = 0.72

state.sp_plus = 3.0
state.sp_minus = 0.63
state.sq_plus = 0.84
state.sq_minus = 3.0

sweep.start_mhz = -56
sweep.end_mhz = 56
sweep.points = 200
sweep.rbw_khz = 600
sweep.vbw_khz = 1

seed = 1
fit.starts = 4
)";

struct RunConfig {
    ChannelModel model;
    double correction_efficiency = 1.0;
    double correction_efficiency_error = 0.0;
    TwinBeamCovariance state;
    SweepPlan plan;
    std::optional<double> raw_sample_rate_mhz;
    std::size_t fit_starts = 4;
    std::optional<std::string> output_path;
};

namespace detail {

struct ConfigEntry {
    std::string value;
    std::size_t line = 0;  // 0 for overrides
};

using ConfigMap = std::map<std::string, ConfigEntry, std::less<>>;

inline const std::vector<std::string_view>& known_config_keys() {
    static const std::vector<std::string_view> keys = {
        "cavity1.r1",          "cavity1.loss",       "cavity1.bandwidth_mhz",
        "cavity2.r1",          "cavity2.loss",       "cavity2.bandwidth_mhz",
        "analysis_mhz",        "efficiency",         "correction_efficiency",
        "correction_efficiency_error",
        "state.sp_plus",       "state.sp_minus",     "state.sq_plus",
        "state.sq_minus",      "state.vp1",          "state.vp2",
        "state.vq1",           "state.vq2",          "state.cp",
        "state.cq",            "sweep.start_mhz",    "sweep.end_mhz",
        "sweep.points",        "sweep.rbw_khz",      "sweep.vbw_khz",
        "sweep.raw_sample_rate_mhz",
        "seed",                "fit.starts",         "output.path",
    };
    return keys;
}

inline bool is_known_key(std::string_view key) {
    const auto& keys = known_config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

inline std::pair<std::string, std::string> split_assignment(std::string_view text,
                                                            std::size_t line) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("expected 'key = value', got '{}'", text), "", line);
    }
    std::string key(trim(text.substr(0, eq)));
    std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) {
        throw ConfigError("empty key", "", line);
    }
    if (!is_known_key(key)) {
        throw ConfigError(fmt::format("unknown key '{}'", key), key, line);
    }
    if (value.empty()) {
        throw ConfigError(fmt::format("empty value for '{}'", key), key, line);
    }
    return {key, value};
}

inline ConfigMap parse_config_text(std::string_view text) {
    ConfigMap map;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto [key, value] = split_assignment(line, lineno);
        if (const auto it = map.find(key); it != map.end()) {
            throw ConfigError(fmt::format("key '{}' repeated (first on line {})", key,
                                          it->second.line),
                              key, lineno);
        }
        map.emplace(std::move(key), ConfigEntry{std::move(value), lineno});
    }
    return map;
}

class ConfigReader {
public:
    explicit ConfigReader(const ConfigMap& map) : map_(map) {}

    [[nodiscard]] bool has(std::string_view key) const { return map_.contains(key); }

    [[nodiscard]] double number(std::string_view key) const {
        const ConfigEntry& e = entry(key);
        const auto v = parse_number<double>(e.value);
        if (!v || !std::isfinite(*v)) {
            throw ConfigError(fmt::format("'{}' must be a finite number, got '{}'", key, e.value),
                              std::string(key), e.line);
        }
        return *v;
    }

    [[nodiscard]] double number_or(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] std::uint64_t unsigned_integer(std::string_view key) const {
        const ConfigEntry& e = entry(key);
        const auto v = parse_number<std::uint64_t>(e.value);
        if (!v) {
            throw ConfigError(
                fmt::format("'{}' must be a non-negative integer, got '{}'", key, e.value),
                std::string(key), e.line);
        }
        return *v;
    }

    [[nodiscard]] const std::string& text(std::string_view key) const { return entry(key).value; }

    [[nodiscard]] std::size_t line(std::string_view key) const {
        const auto it = map_.find(key);
        return it == map_.end() ? 0 : it->second.line;
    }

    // Runs f and rewraps InvalidInput as a ConfigError blaming `key`.
    template <typename F>
    auto blame(std::string_view key, F&& f) const {
        try {
            return f();
        } catch (const ConfigError&) {
            throw;
        } catch (const InvalidInput& e) {
            throw ConfigError(fmt::format("{}: {}", key, e.what()), std::string(key), line(key));
        }
    }

private:
    [[nodiscard]] const ConfigEntry& entry(std::string_view key) const {
        const auto it = map_.find(key);
        if (it == map_.end()) {
            throw ConfigError(fmt::format("missing required key '{}'", key), std::string(key), 0);
        }
        return it->second;
    }

    const ConfigMap& map_;
};

inline CavitySpec read_cavity(const ConfigReader& r, std::string_view prefix,
                              const std::optional<CavitySpec>& fallback) {
    const auto key = [&](std::string_view k) { return fmt::format("{}.{}", prefix, k); };
    const bool any = r.has(key("r1")) || r.has(key("loss")) || r.has(key("bandwidth_mhz"));
    if (!any && fallback) {
        return *fallback;
    }
    const double r1 = r.number(key("r1"));
    const double loss = r.number(key("loss"));
    const double bw = r.number(key("bandwidth_mhz"));
    return r.blame(key("r1"), [&] { return CavitySpec::make(r1, loss, bw); });
}

inline TwinBeamCovariance read_state(const ConfigReader& r) {
    static constexpr std::array<std::string_view, 4> combined = {
        "state.sp_plus", "state.sp_minus", "state.sq_plus", "state.sq_minus"};
    static constexpr std::array<std::string_view, 6> beams = {
        "state.vp1", "state.vp2", "state.vq1", "state.vq2", "state.cp", "state.cq"};
    const bool any_combined =
        std::any_of(combined.begin(), combined.end(), [&](auto k) { return r.has(k); });
    const bool any_beams = std::any_of(beams.begin(), beams.end(), [&](auto k) { return r.has(k); });
    if (any_combined && any_beams) {
        const auto k = std::string(*std::find_if(beams.begin(), beams.end(),
                                                 [&](auto key) { return r.has(key); }));
        throw ConfigError("state given both as combined variances and as beam covariance", k,
                          r.line(k));
    }
    TwinBeamCovariance cov;
    if (any_beams) {
        cov = {r.number("state.vp1"), r.number("state.vp2"), r.number("state.vq1"),
               r.number("state.vq2"), r.number("state.cp"),  r.number("state.cq")};
    } else {
        const CombinedQuadratures c{r.number("state.sp_plus"), r.number("state.sp_minus"),
                                    r.number("state.sq_plus"), r.number("state.sq_minus")};
        cov = r.blame("state.sp_plus", [&] { return TwinBeamCovariance::symmetric(c); });
    }
    const std::string_view first = any_beams ? beams[0] : combined[0];
    const auto problems = validate_physicality(cov);
    if (!problems.empty()) {
        throw ConfigError(fmt::format("unphysical state: {}", problems.front().constraint),
                          std::string(first), r.line(first));
    }
    return cov;
}

}  // namespace detail

// Builds a validated RunConfig. Overrides are `key=value` strings.
[[nodiscard]] inline RunConfig parse_config(std::string_view text,
                                            const std::vector<std::string>& overrides = {}) {
    detail::ConfigMap map = detail::parse_config_text(text);
    for (const auto& o : overrides) {
        auto [key, value] = detail::split_assignment(o, 0);
        map[key] = {std::move(value), 0};
    }
    const detail::ConfigReader r(map);

    RunConfig cfg;
    const CavitySpec c1 = detail::read_cavity(r, "cavity1", std::nullopt);
    const CavitySpec c2 = detail::read_cavity(r, "cavity2", c1);
    const double analysis = r.number("analysis_mhz");
    const double eta = r.number("efficiency");
    cfg.model = r.blame("analysis_mhz", [&] {
        if (!(analysis > 0.0)) {
            throw InvalidInput(fmt::format("must be positive, got {}", analysis));
        }
        return ChannelModel::make(c1, c2, analysis, 1.0);
    });
    cfg.model.efficiency = r.blame("efficiency", [&] {
        detail::check_efficiency(eta);
        return eta;
    });
    cfg.correction_efficiency = r.number_or("correction_efficiency", eta);
    r.blame("correction_efficiency", [&] {
        detail::check_efficiency(cfg.correction_efficiency);
        return 0;
    });
    cfg.correction_efficiency_error = r.number_or("correction_efficiency_error", 0.0);
    if (cfg.correction_efficiency_error < 0.0) {
        throw ConfigError("correction_efficiency_error must be non-negative",
                          "correction_efficiency_error", r.line("correction_efficiency_error"));
    }

    cfg.state = detail::read_state(r);

    cfg.plan.start_mhz = r.number("sweep.start_mhz");
    cfg.plan.end_mhz = r.number("sweep.end_mhz");
    cfg.plan.points = static_cast<std::size_t>(r.unsigned_integer("sweep.points"));
    cfg.plan.rbw_khz = r.number("sweep.rbw_khz");
    cfg.plan.vbw_khz = r.number("sweep.vbw_khz");
    cfg.plan.seed = r.has("seed") ? r.unsigned_integer("seed") : 1;
    r.blame("sweep.points", [&] {
        cfg.plan.validate();
        return 0;
    });
    if (r.has("sweep.raw_sample_rate_mhz")) {
        cfg.raw_sample_rate_mhz = r.number("sweep.raw_sample_rate_mhz");
        r.blame("sweep.raw_sample_rate_mhz", [&] {
            DemodSettings{*cfg.raw_sample_rate_mhz, analysis, cfg.plan.rbw_khz}.validate();
            return 0;
        });
    }

    cfg.fit_starts = r.has("fit.starts") ? static_cast<std::size_t>(r.unsigned_integer("fit.starts"))
                                          : 4;
    if (cfg.fit_starts < 1) {
        throw ConfigError("fit.starts must be at least 1", "fit.starts", r.line("fit.starts"));
    }
    if (r.has("output.path")) {
        cfg.output_path = r.text("output.path");
    }
    return cfg;
}

[[nodiscard]] inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput(fmt::format("cannot open '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[nodiscard]] inline RunConfig load_config(const std::string& path,
                                           const std::vector<std::string>& overrides = {}) {
    return parse_config(read_text_file(path), overrides);
}

[[nodiscard]] inline RunConfig reference_config(const std::vector<std::string>& overrides = {}) {
    return parse_config(kReferenceConfig, overrides);
}

// Echo of the effective configuration, one `key = value` per line, parseable
// by parse_config.
inline std::string config_echo(const RunConfig& c) {
    std::string s;
    const auto cavity = [&](std::string_view p, const CavitySpec& spec) {
        s += fmt::format("{}.r1 = {}\n{}.loss = {}\n{}.bandwidth_mhz = {}\n", p,
                         spec.r1(), p, spec.loss(), p, spec.bandwidth_mhz());
    };
    cavity("cavity1", c.model.cavity1);
    cavity("cavity2", c.model.cavity2);
    s += fmt::format("analysis_mhz = {}\n", c.model.analysis_mhz);
    s += fmt::format("efficiency = {}\n", c.model.efficiency);
    s += fmt::format("correction_efficiency = {}\n", c.correction_efficiency);
    s += fmt::format("correction_efficiency_error = {}\n", c.correction_efficiency_error);
    s += fmt::format("state.vp1 = {}\nstate.vp2 = {}\nstate.vq1 = {}\n"
                     "state.vq2 = {}\nstate.cp = {}\nstate.cq = {}\n",
                     c.state.vp1, c.state.vp2, c.state.vq1, c.state.vq2, c.state.cp, c.state.cq);
    s += fmt::format("sweep.start_mhz = {}\nsweep.end_mhz = {}\nsweep.points = {}\n"
                     "sweep.rbw_khz = {}\nsweep.vbw_khz = {}\n",
                     c.plan.start_mhz, c.plan.end_mhz, c.plan.points, c.plan.rbw_khz,
                     c.plan.vbw_khz);
    if (c.raw_sample_rate_mhz) {
        s += fmt::format("sweep.raw_sample_rate_mhz = {}\n", *c.raw_sample_rate_mhz);
    }
    s += fmt::format("seed = {}\nfit.starts = {}\n", c.plan.seed, c.fit_starts);
    if (c.output_path) {
        s += fmt::format("output.path = {}\n", *c.output_path);
    }
    return s;
}

}  // namespace twinbeam
