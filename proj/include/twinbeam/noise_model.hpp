#pragma once

// Amplitude-noise spectra of the twin beams after reflection off their
// analysis cavities, as a function of the (common) cavity detuning.
//
// A single beam with incident amplitude/phase noise Sp, Sq is read out as
//   S_R = |g_p|^2 Sp + |g_q|^2 Sq + |g_vp|^2 + |g_vq|^2.
// Two beams, each with its own cavity and independent vacuum port, give the
// channels (x1 +- x2)/sqrt(2) of the reflected amplitude fluctuations x_i:
//   S_pm = 1/2 [ S_R1 + S_R2 +- 2 Re(g_p1 g_p2*) Cp +- 2 Re(g_q1 g_q2*) Cq ].
// Detection efficiency acts after reflection, as apply_loss on each beam.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "twinbeam/cavity_optics.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/twin_beam_state.hpp"

namespace twinbeam {

enum class Channel { sum, difference, beam1, beam2 };

[[nodiscard]] inline const char* channel_name(Channel c) {
    switch (c) {
        case Channel::sum: return "sum";
        case Channel::difference: return "difference";
        case Channel::beam1: return "beam1";
        case Channel::beam2: return "beam2";
    }
    return "?";
}

struct ChannelModel {
    CavitySpec cavity1;
    CavitySpec cavity2;
    double analysis_mhz = 0.0;
    double efficiency = 1.0;

    static ChannelModel make(const CavitySpec& cavity1, const CavitySpec& cavity2,
                             double analysis_mhz, double efficiency) {
        ChannelModel m{cavity1, cavity2, analysis_mhz, efficiency};
        m.validate();
        return m;
    }

    void validate() const {
        if (!std::isfinite(analysis_mhz) || analysis_mhz <= 0.0) {
            throw InvalidInput(
                fmt::format("analysis frequency must be positive, got {} MHz", analysis_mhz));
        }
        detail::check_efficiency(efficiency);
    }

    [[nodiscard]] bool identical_cavities() const { return cavity1 == cavity2; }

    friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

[[nodiscard]] inline double reflected_spectrum(const CavitySpec& spec, double detuning_mhz,
                                               double analysis_mhz, double amplitude_noise,
                                               double phase_noise) {
    if (!(amplitude_noise > 0.0) || !(phase_noise > 0.0)) {
        throw InvalidInput(fmt::format("incident noise must be positive, got Sp={} Sq={}",
                                       amplitude_noise, phase_noise));
    }
    const RotationCoeffs g = rotation_coeffs(spec, detuning_mhz, analysis_mhz);
    return g.amplitude_gain() * amplitude_noise + g.phase_gain() * phase_noise + g.vacuum_gain();
}

// One channel of identical-cavity twin beams, parameterized by the combined
// variances it reads out. This is the form fitted to measured traces.
[[nodiscard]] inline double combined_channel_spectrum(const CavitySpec& spec, double detuning_mhz,
                                                      double analysis_mhz, double amplitude_noise,
                                                      double phase_noise, double efficiency) {
    return apply_loss(
        reflected_spectrum(spec, detuning_mhz, analysis_mhz, amplitude_noise, phase_noise),
        efficiency);
}

// Detected second moments of the two reflected amplitude fluctuations.
struct BeamMoments {
    double var1 = 1.0;
    double var2 = 1.0;
    double cross = 0.0;

    [[nodiscard]] double channel(Channel c) const {
        switch (c) {
            case Channel::sum: return 0.5 * (var1 + var2) + cross;
            case Channel::difference: return 0.5 * (var1 + var2) - cross;
            case Channel::beam1: return var1;
            case Channel::beam2: return var2;
        }
        return 0.0;
    }
};

[[nodiscard]] inline BeamMoments reflected_moments(const ChannelModel& model,
                                                   const TwinBeamCovariance& cov,
                                                   double detuning_mhz) {
    const RotationCoeffs g1 = rotation_coeffs(model.cavity1, detuning_mhz, model.analysis_mhz);
    const RotationCoeffs g2 = rotation_coeffs(model.cavity2, detuning_mhz, model.analysis_mhz);
    const double s1 = g1.amplitude_gain() * cov.vp1 + g1.phase_gain() * cov.vq1 + g1.vacuum_gain();
    const double s2 = g2.amplitude_gain() * cov.vp2 + g2.phase_gain() * cov.vq2 + g2.vacuum_gain();
    const double x = std::real(g1.amplitude * std::conj(g2.amplitude)) * cov.cp +
                     std::real(g1.phase * std::conj(g2.phase)) * cov.cq;
    const double eta = model.efficiency;
    return {apply_loss(s1, eta), apply_loss(s2, eta), eta * x};
}

// General bilinear form, valid for any pair of cavities.
[[nodiscard]] inline double channel_spectrum_general(const ChannelModel& model,
                                                     const TwinBeamCovariance& cov, Channel channel,
                                                     double detuning_mhz) {
    require_physical(cov);
    return reflected_moments(model, cov, detuning_mhz).channel(channel);
}

[[nodiscard]] inline double channel_spectrum(const ChannelModel& model,
                                             const TwinBeamCovariance& cov, Channel channel,
                                             double detuning_mhz) {
    if (!model.identical_cavities() || channel == Channel::beam1 || channel == Channel::beam2) {
        return channel_spectrum_general(model, cov, channel, detuning_mhz);
    }
    require_physical(cov);
    const CombinedQuadratures s = combine(cov);
    const bool sum = channel == Channel::sum;
    return combined_channel_spectrum(model.cavity1, detuning_mhz, model.analysis_mhz,
                                     sum ? s.sp_plus : s.sp_minus, sum ? s.sq_plus : s.sq_minus,
                                     model.efficiency);
}

struct SpectrumSample {
    double detuning_mhz = 0.0;
    double sum = 0.0;
    double difference = 0.0;
    // False at impedance-matched points, where sum/difference are undefined.
    bool defined = true;
};

// Both two-beam channels over a detuning grid; grid points are evaluated
// concurrently and independently.
[[nodiscard]] inline std::vector<SpectrumSample> spectrum_grid(const ChannelModel& model,
                                                               const TwinBeamCovariance& cov,
                                                               std::span<const double> detunings_mhz) {
    model.validate();
    require_physical(cov);
    std::vector<SpectrumSample> out(detunings_mhz.size());
    parallel_for(detunings_mhz.size(), [&](std::size_t i) {
        SpectrumSample& s = out[i];
        s.detuning_mhz = detunings_mhz[i];
        try {
            s.sum = channel_spectrum(model, cov, Channel::sum, s.detuning_mhz);
            s.difference = channel_spectrum(model, cov, Channel::difference, s.detuning_mhz);
        } catch (const SingularPoint&) {
            s.defined = false;
        }
    });
    return out;
}

[[nodiscard]] inline std::vector<double> linear_grid(double start, double end, std::size_t points) {
    if (points < 2) {
        throw InvalidInput(fmt::format("grid needs at least 2 points, got {}", points));
    }
    if (!(start < end)) {
        throw InvalidInput(fmt::format("grid start {} must be below end {}", start, end));
    }
    std::vector<double> grid(points);
    const double step = (end - start) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = start + step * static_cast<double>(i);
    }
    grid.back() = end;
    return grid;
}

// CSV of model curves: detuning_mhz,detuning_over_bandwidth,s_sum,s_diff with
// six significant digits. Undefined grid points become comment lines.
inline void write_model_curve(std::ostream& os, const ChannelModel& model,
                              std::span<const SpectrumSample> samples) {
    fmt::print(os, "detuning_mhz,detuning_over_bandwidth,s_sum,s_diff\n");
    const double bw = model.cavity1.bandwidth_mhz();
    for (const auto& s : samples) {
        if (!s.defined) {
            fmt::print(os, "# skipped singular point detuning_mhz={:.6g}\n", s.detuning_mhz);
            continue;
        }
        fmt::print(os, "{:.6g},{:.6g},{:.6g},{:.6g}\n", s.detuning_mhz, s.detuning_mhz / bw, s.sum,
                   s.difference);
    }
}

// Phase-quadrature readout points: local maxima of |g_q|^2 over one period.
struct ReadoutPoint {
    double detuning_mhz = 0.0;
    double detuning_over_bandwidth = 0.0;
    double phase_gain = 0.0;
};

struct PhaseReadoutScan {
    std::vector<ReadoutPoint> maxima;  // sorted by |detuning|, negative first
    double max_phase_gain = 0.0;
    // 1 - max_phase_gain: how far the cavity is from converting all incident
    // phase noise into amplitude noise.
    double shortfall = 1.0;
    // Analysis frequency above sqrt(2) bandwidths.
    bool conversion_condition = false;
};

inline constexpr double kReadoutThreshold = 1e-6;

[[nodiscard]] inline PhaseReadoutScan find_phase_readout_detunings(const CavitySpec& spec,
                                                                   double analysis_mhz,
                                                                   std::size_t grid_points = 20000) {
    if (grid_points < 16) {
        throw InvalidInput("phase readout scan needs at least 16 grid points");
    }
    const double period = spec.period_mhz();
    const double half = 0.5 * period;
    const double step = period / static_cast<double>(grid_points);

    const auto gain = [&](double d) -> std::optional<double> {
        try {
            return rotation_coeffs(spec, d, analysis_mhz).phase_gain();
        } catch (const SingularPoint&) {
            return std::nullopt;
        }
    };

    std::vector<double> x(grid_points);
    std::vector<std::optional<double>> y(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        x[i] = -half + step * static_cast<double>(i);
        y[i] = gain(x[i]);
    }

    PhaseReadoutScan scan;
    scan.conversion_condition = analysis_mhz > std::numbers::sqrt2 * spec.bandwidth_mhz();
    for (std::size_t i = 0; i < grid_points; ++i) {
        const auto& prev = y[(i + grid_points - 1) % grid_points];
        const auto& next = y[(i + 1) % grid_points];
        if (!y[i] || !prev || !next || !(*y[i] > *prev) || !(*y[i] >= *next)) {
            continue;
        }
        // Golden-section refinement inside the bracketing grid cells.
        double a = x[i] - step;
        double b = x[i] + step;
        constexpr double kInvPhi = 0.6180339887498949;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        double fc = gain(c).value_or(0.0);
        double fd = gain(d).value_or(0.0);
        for (int it = 0; it < 80 && (b - a) > 1e-13 * period; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kInvPhi * (b - a);
                fc = gain(c).value_or(0.0);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kInvPhi * (b - a);
                fd = gain(d).value_or(0.0);
            }
        }
        double best = 0.5 * (a + b);
        double best_gain = gain(best).value_or(0.0);
        if (*y[i] > best_gain) {
            best = x[i];
            best_gain = *y[i];
        }
        if (best_gain <= kReadoutThreshold) {
            continue;
        }
        // Fold back into [-period/2, period/2).
        best = std::remainder(best, period);
        if (best >= half) {
            best -= period;
        }
        scan.maxima.push_back({best, best / spec.bandwidth_mhz(), best_gain});
    }
    std::sort(scan.maxima.begin(), scan.maxima.end(), [](const auto& l, const auto& r) {
        const double al = std::abs(l.detuning_mhz);
        const double ar = std::abs(r.detuning_mhz);
        if (al != ar) {
            return al < ar;
        }
        return l.detuning_mhz < r.detuning_mhz;
    });
    for (const auto& m : scan.maxima) {
        scan.max_phase_gain = std::max(scan.max_phase_gain, m.phase_gain);
    }
    scan.shortfall = 1.0 - scan.max_phase_gain;
    return scan;
}

}  // namespace twinbeam
