#pragma once

// Synthetic swept-cavity acquisitions and the windowed-variance estimator.
//
// During a sweep the cavity detuning moves linearly; the demodulated
// photocurrents of both beams are cut into windows of N = floor(rbw/vbw)
// samples, short enough that the detuning is constant within a window. Each
// window yields unbiased variances of beam 1, beam 2, their normalized sum
// and their normalized difference.
//
// Two synthesis paths share that estimator:
//   * synthesize_sweep draws baseband samples straight from the analytic
//     channel moments (fast);
//   * synthesize_sweep_raw generates white photocurrent noise at RF, runs it
//     through demodulate(), and calibrates against a coherent reference.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "twinbeam/errors.hpp"
#include "twinbeam/noise_model.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/random.hpp"
#include "twinbeam/twin_beam_state.hpp"

namespace twinbeam {

struct SweepPlan {
    double start_mhz = 0.0;
    double end_mhz = 0.0;
    std::size_t points = 0;
    double rbw_khz = 0.0;
    double vbw_khz = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (points < 2) {
            throw InvalidInput(fmt::format("sweep needs at least 2 points, got {}", points));
        }
        if (!std::isfinite(start_mhz) || !std::isfinite(end_mhz) || !(start_mhz < end_mhz)) {
            throw InvalidInput(
                fmt::format("sweep start {} MHz must be below end {} MHz", start_mhz, end_mhz));
        }
        if (!std::isfinite(vbw_khz) || !(vbw_khz > 0.0) || !std::isfinite(rbw_khz) ||
            !(rbw_khz > vbw_khz)) {
            throw InvalidInput(fmt::format("sweep needs rbw > vbw > 0, got rbw={} kHz vbw={} kHz",
                                           rbw_khz, vbw_khz));
        }
        if (samples_per_window() < 2) {
            throw InvalidInput("rbw/vbw must allow at least 2 samples per window");
        }
    }

    [[nodiscard]] std::size_t samples_per_window() const {
        return static_cast<std::size_t>(std::floor(rbw_khz / vbw_khz));
    }

    [[nodiscard]] std::vector<double> detunings() const {
        return linear_grid(start_mhz, end_mhz, points);
    }

    friend bool operator==(const SweepPlan&, const SweepPlan&) = default;
};

struct SweepRow {
    double detuning_mhz = 0.0;
    double s_sum = 0.0;
    double s_diff = 0.0;
    double s_ch1 = 0.0;
    double s_ch2 = 0.0;
    std::size_t n_samples = 0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepDataset {
    SweepPlan plan;
    ChannelModel model;
    std::vector<SweepRow> rows;
    // Grid points dropped because the carrier was impedance matched there.
    std::vector<double> skipped_mhz;

    friend bool operator==(const SweepDataset&, const SweepDataset&) = default;
};

// Samples of both beams' demodulated amplitude noise within one window.
struct WindowSamples {
    std::vector<double> detunings_mhz;
    std::vector<double> ch1;
    std::vector<double> ch2;
};

namespace detail {

// Unbiased variance with a two-pass mean.
inline double sample_variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return ss / static_cast<double>(x.size() - 1);
}

inline constexpr std::uint64_t kStreamFast = 1;
inline constexpr std::uint64_t kStreamRaw = 2;
inline constexpr std::uint64_t kStreamRawReference = 3;

}  // namespace detail

// One row per window: unbiased variances of ch1, ch2, (ch1+ch2)/sqrt(2) and
// (ch1-ch2)/sqrt(2), located at the mean detuning of the window's samples.
[[nodiscard]] inline SweepRow estimate_window(const WindowSamples& w) {
    const std::size_t n = w.ch1.size();
    if (n < 2 || w.ch2.size() != n || w.detunings_mhz.size() != n) {
        throw InvalidInput(fmt::format(
            "window needs >= 2 paired samples, got ch1={} ch2={} detunings={}", w.ch1.size(),
            w.ch2.size(), w.detunings_mhz.size()));
    }
    std::vector<double> sum(n);
    std::vector<double> diff(n);
    double detuning = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum[k] = (w.ch1[k] + w.ch2[k]) / std::numbers::sqrt2;
        diff[k] = (w.ch1[k] - w.ch2[k]) / std::numbers::sqrt2;
        detuning += w.detunings_mhz[k];
    }
    SweepRow row;
    row.detuning_mhz = detuning / static_cast<double>(n);
    row.s_sum = detail::sample_variance(sum);
    row.s_diff = detail::sample_variance(diff);
    row.s_ch1 = detail::sample_variance(w.ch1);
    row.s_ch2 = detail::sample_variance(w.ch2);
    row.n_samples = n;
    return row;
}

[[nodiscard]] inline std::vector<SweepRow> estimate_spectrum(std::span<const WindowSamples> windows) {
    std::vector<SweepRow> rows(windows.size());
    parallel_for(windows.size(), [&](std::size_t i) { rows[i] = estimate_window(windows[i]); });
    return rows;
}

// Correlated zero-mean Gaussian pairs with the given moments.
inline void draw_pairs(std::mt19937_64& rng, const BeamMoments& m, std::size_t n,
                       std::vector<double>& ch1, std::vector<double>& ch2) {
    const double a = std::sqrt(m.var1);
    const double b = m.cross / a;
    const double c = std::sqrt(std::max(0.0, m.var2 - b * b));
    std::normal_distribution<double> normal;
    ch1.resize(n);
    ch2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        ch1[k] = a * z1;
        ch2[k] = b * z1 + c * z2;
    }
}

// Fast path. Each window draws from its own (seed, window) substream, so the
// dataset is identical for any thread count.
[[nodiscard]] inline SweepDataset synthesize_sweep(const SweepPlan& plan, const ChannelModel& model,
                                                   const TwinBeamCovariance& cov) {
    plan.validate();
    model.validate();
    require_physical(cov);

    const std::vector<double> grid = plan.detunings();
    const std::size_t n = plan.samples_per_window();
    std::vector<std::optional<SweepRow>> rows(grid.size());

    parallel_for(grid.size(), [&](std::size_t i) {
        BeamMoments m;
        try {
            m = reflected_moments(model, cov, grid[i]);
        } catch (const SingularPoint&) {
            return;
        }
        auto rng = substream(plan.seed, detail::kStreamFast, i);
        WindowSamples w;
        w.detunings_mhz.assign(n, grid[i]);
        draw_pairs(rng, m, n, w.ch1, w.ch2);
        rows[i] = estimate_window(w);
    });

    SweepDataset ds{plan, model, {}, {}};
    ds.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (rows[i]) {
            ds.rows.push_back(*rows[i]);
        } else {
            ds.skipped_mhz.push_back(grid[i]);
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Demodulation chain

struct DemodSettings {
    double sample_rate_mhz = 0.0;
    double analysis_mhz = 0.0;
    double rbw_khz = 0.0;

    void validate() const {
        if (!(analysis_mhz > 0.0) || !std::isfinite(analysis_mhz)) {
            throw InvalidInput("demodulation frequency must be positive");
        }
        if (!(sample_rate_mhz >= 4.0 * analysis_mhz)) {
            throw InvalidInput(fmt::format(
                "sample rate {} MHz is below 4x the analysis frequency {} MHz", sample_rate_mhz,
                analysis_mhz));
        }
        if (!(rbw_khz > 0.0) || 1e-3 * rbw_khz > 0.5 * sample_rate_mhz) {
            throw InvalidInput(fmt::format("rbw {} kHz incompatible with sample rate", rbw_khz));
        }
    }

    // Raw samples per decimated output sample.
    [[nodiscard]] std::size_t decimation() const {
        return static_cast<std::size_t>(std::llround(sample_rate_mhz / (1e-3 * rbw_khz)));
    }

    // Single-pole low-pass at rbw/2.
    [[nodiscard]] double filter_alpha() const {
        const double cutoff_mhz = 0.5e-3 * rbw_khz;
        return 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_mhz / sample_rate_mhz);
    }
};

// Mixes the photocurrent with sqrt(2) cos(2 pi f t) at the analysis frequency,
// low-passes at rbw/2 with a single pole and keeps every decimation()-th
// filter output, starting with the last sample of the first block. A tone
// a cos(2 pi f t) settles to a/sqrt(2). min_outputs is the length of one
// variance window; shorter series are rejected.
[[nodiscard]] inline std::vector<double> demodulate(std::span<const double> raw,
                                                    const DemodSettings& settings,
                                                    std::size_t min_outputs = 1) {
    settings.validate();
    const std::size_t dec = settings.decimation();
    if (raw.size() < dec * std::max<std::size_t>(min_outputs, 1)) {
        throw InvalidInput(fmt::format(
            "series too short: {} samples, need {} for {} output samples", raw.size(),
            dec * std::max<std::size_t>(min_outputs, 1), min_outputs));
    }
    const double alpha = settings.filter_alpha();
    const double w = 2.0 * std::numbers::pi * settings.analysis_mhz / settings.sample_rate_mhz;
    std::vector<double> out;
    out.reserve(raw.size() / dec);
    double y = 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double mixed = raw[k] * std::numbers::sqrt2 * std::cos(w * static_cast<double>(k));
        y += alpha * (mixed - y);
        if ((k + 1) % dec == 0) {
            out.push_back(y);
        }
    }
    return out;
}

struct RawChainSettings {
    double sample_rate_mhz = 0.0;
    // Leading decimated outputs discarded while the filter settles.
    std::size_t settle_outputs = 8;
};

namespace detail {

// Raw photocurrent pairs for one window, demodulated to n baseband samples.
inline WindowSamples raw_window(std::mt19937_64& rng, const BeamMoments& m, double detuning_mhz,
                                std::size_t n, const DemodSettings& demod,
                                std::size_t settle_outputs) {
    const std::size_t outputs = n + settle_outputs;
    const std::size_t len = outputs * demod.decimation();
    std::vector<double> raw1;
    std::vector<double> raw2;
    draw_pairs(rng, m, len, raw1, raw2);
    const auto base1 = demodulate(raw1, demod, outputs);
    const auto base2 = demodulate(raw2, demod, outputs);
    WindowSamples w;
    w.ch1.assign(base1.begin() + static_cast<std::ptrdiff_t>(settle_outputs), base1.end());
    w.ch2.assign(base2.begin() + static_cast<std::ptrdiff_t>(settle_outputs), base2.end());
    w.detunings_mhz.assign(w.ch1.size(), detuning_mhz);
    return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shot-noise calibration

struct Calibration {
    // Multiplies raw variances into shot-noise units.
    double factor = 1.0;
    // Standard error of factor from the pooled reference variance.
    double standard_error = 0.0;
};

inline constexpr double kCalibrationFlatness = 0.05;

// Reference must be a coherent-input sweep. Its beam variances are pooled
// (weighted by degrees of freedom); the scan is cut into up to 10 contiguous
// blocks whose means must agree with the pooled value to 5% plus four block
// standard errors.
[[nodiscard]] inline Calibration shot_noise_calibrate(const SweepDataset& reference) {
    if (reference.rows.empty()) {
        throw InvalidInput("calibration reference is empty");
    }
    double pooled = 0.0;
    double dof = 0.0;
    for (const auto& r : reference.rows) {
        const double k = static_cast<double>(r.n_samples > 1 ? r.n_samples - 1 : 1);
        pooled += k * (r.s_ch1 + r.s_ch2);
        dof += 2.0 * k;
    }
    pooled /= dof;
    if (!(pooled > 0.0)) {
        throw NumericalFailure("calibration reference has zero variance");
    }

    const std::size_t blocks = std::min<std::size_t>(10, reference.rows.size());
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * reference.rows.size() / blocks;
        const std::size_t hi = (b + 1) * reference.rows.size() / blocks;
        double m = 0.0;
        double kk = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& r = reference.rows[i];
            const double k = static_cast<double>(r.n_samples > 1 ? r.n_samples - 1 : 1);
            m += k * (r.s_ch1 + r.s_ch2);
            kk += 2.0 * k;
        }
        m /= kk;
        const double allowed = kCalibrationFlatness + 4.0 * std::sqrt(2.0 / kk);
        if (std::abs(m / pooled - 1.0) > allowed) {
            throw NumericalFailure(fmt::format(
                "calibration reference not flat: block {} mean {:.4g} deviates {:.1f}% from "
                "pooled {:.4g}",
                b, m, 100.0 * std::abs(m / pooled - 1.0), pooled));
        }
    }
    return {1.0 / pooled, std::sqrt(2.0 / dof) / pooled};
}

[[nodiscard]] inline SweepDataset apply_calibration(SweepDataset ds, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw InvalidInput(fmt::format("calibration factor must be positive, got {}", factor));
    }
    for (auto& r : ds.rows) {
        r.s_sum *= factor;
        r.s_diff *= factor;
        r.s_ch1 *= factor;
        r.s_ch2 *= factor;
    }
    return ds;
}

// Raw-chain path: white photocurrent noise whose level follows the reflected
// moments, demodulated per beam; a coherent reference sweep on the same grid
// fixes the calibration, which is applied to the result.
[[nodiscard]] inline SweepDataset synthesize_sweep_raw(const SweepPlan& plan,
                                                       const ChannelModel& model,
                                                       const TwinBeamCovariance& cov,
                                                       const RawChainSettings& raw_settings) {
    plan.validate();
    model.validate();
    require_physical(cov);
    const DemodSettings demod{raw_settings.sample_rate_mhz, model.analysis_mhz, plan.rbw_khz};
    demod.validate();

    const std::vector<double> grid = plan.detunings();
    const std::size_t n = plan.samples_per_window();

    const auto run = [&](const TwinBeamCovariance& state, std::uint64_t stream) {
        std::vector<std::optional<SweepRow>> rows(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            BeamMoments m;
            try {
                m = reflected_moments(model, state, grid[i]);
            } catch (const SingularPoint&) {
                return;
            }
            auto rng = substream(plan.seed, stream, i);
            rows[i] = estimate_window(
                detail::raw_window(rng, m, grid[i], n, demod, raw_settings.settle_outputs));
        });
        SweepDataset ds{plan, model, {}, {}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (rows[i]) {
                ds.rows.push_back(*rows[i]);
            } else {
                ds.skipped_mhz.push_back(grid[i]);
            }
        }
        return ds;
    };

    const SweepDataset reference = run(TwinBeamCovariance::identity(), detail::kStreamRawReference);
    const Calibration cal = shot_noise_calibrate(reference);
    return apply_calibration(run(cov, detail::kStreamRaw), cal.factor);
}

}  // namespace twinbeam
