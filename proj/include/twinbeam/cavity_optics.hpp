#pragma once

// Complex response of a lossy two-mirror analysis cavity and the quadrature
// rotation it imposes on a reflected field.
//
//   r(D) = (r1 - r2 e^{iD/B}) / (1 - r1 r2 e^{iD/B})
//   t(D) = t1 t2 e^{iD/B}     / (1 - r1 r2 e^{iD/B})
//
// with D the carrier detuning and B the bandwidth scale, both in MHz. The
// response is periodic in D with period 2*pi*B. Internal losses enter as
// t2^2 = A = 1 - r2^2; the input mirror is lossless, t1^2 = 1 - r1^2.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "twinbeam/errors.hpp"

namespace twinbeam {

using Complex = std::complex<double>;

class CavitySpec {
public:
    // Bare input face: r1 = 0, no loss, unit bandwidth.
    CavitySpec() : CavitySpec(0.0, 0.0, 1.0) {}

    // Throws InvalidInput unless 0 <= r1 < 1, 0 <= loss <= 1 and bandwidth > 0.
    static CavitySpec make(double r1, double loss, double bandwidth_mhz) {
        if (!std::isfinite(r1) || r1 < 0.0 || r1 >= 1.0) {
            throw InvalidInput(fmt::format("cavity r1 must lie in [0, 1), got {}", r1));
        }
        if (!std::isfinite(loss) || loss < 0.0 || loss > 1.0) {
            throw InvalidInput(fmt::format("cavity loss must lie in [0, 1], got {}", loss));
        }
        if (!std::isfinite(bandwidth_mhz) || bandwidth_mhz <= 0.0) {
            throw InvalidInput(
                fmt::format("cavity bandwidth must be positive, got {} MHz", bandwidth_mhz));
        }
        CavitySpec spec(r1, loss, bandwidth_mhz);
        if (spec.r1_ * spec.r2_ >= 1.0) {
            throw InvalidInput("cavity round-trip amplitude r1*r2 must be below 1");
        }
        return spec;
    }

    [[nodiscard]] double r1() const noexcept { return r1_; }
    [[nodiscard]] double t1() const noexcept { return t1_; }
    [[nodiscard]] double r2() const noexcept { return r2_; }
    [[nodiscard]] double t2() const noexcept { return t2_; }
    [[nodiscard]] double loss() const noexcept { return loss_; }
    [[nodiscard]] double bandwidth_mhz() const noexcept { return bandwidth_mhz_; }

    // Period of the response in detuning.
    [[nodiscard]] double period_mhz() const noexcept {
        return 2.0 * std::numbers::pi * bandwidth_mhz_;
    }

    friend bool operator==(const CavitySpec&, const CavitySpec&) = default;

private:
    CavitySpec(double r1, double loss, double bandwidth_mhz)
        : r1_(r1),
          t1_(std::sqrt(1.0 - r1 * r1)),
          r2_(std::sqrt(1.0 - loss)),
          t2_(std::sqrt(loss)),
          loss_(loss),
          bandwidth_mhz_(bandwidth_mhz) {}

    double r1_;
    double t1_;
    double r2_;
    double t2_;
    double loss_;
    double bandwidth_mhz_;
};

namespace detail {

inline Complex round_trip_phase(const CavitySpec& spec, double detuning_mhz) {
    return std::polar(1.0, detuning_mhz / spec.bandwidth_mhz());
}

}  // namespace detail

[[nodiscard]] inline Complex reflection_coeff(const CavitySpec& spec, double detuning_mhz) {
    const Complex e = detail::round_trip_phase(spec, detuning_mhz);
    return (spec.r1() - spec.r2() * e) / (1.0 - spec.r1() * spec.r2() * e);
}

[[nodiscard]] inline Complex transmission_coeff(const CavitySpec& spec, double detuning_mhz) {
    const Complex e = detail::round_trip_phase(spec, detuning_mhz);
    return spec.t1() * spec.t2() * e / (1.0 - spec.r1() * spec.r2() * e);
}

// Weights with which the incident amplitude/phase fluctuations and the two
// vacuum-port quadratures appear in the reflected amplitude fluctuation.
struct RotationCoeffs {
    Complex amplitude;
    Complex phase;
    Complex vacuum_amplitude;
    Complex vacuum_phase;

    [[nodiscard]] double amplitude_gain() const { return std::norm(amplitude); }
    [[nodiscard]] double phase_gain() const { return std::norm(phase); }
    [[nodiscard]] double vacuum_gain() const {
        return std::norm(vacuum_amplitude) + std::norm(vacuum_phase);
    }
    // Equals 1 for every valid cavity and frequency pair.
    [[nodiscard]] double total_gain() const {
        return amplitude_gain() + phase_gain() + vacuum_gain();
    }
};

inline constexpr double kSingularModulus = 1e-12;
inline constexpr double kLosslessThreshold = 1e-14;

// Throws SingularPoint at an impedance-matched carrier (|r| < 1e-12), where
// the reflected carrier has no phase to reference the sidebands to.
[[nodiscard]] inline RotationCoeffs rotation_coeffs(const CavitySpec& spec, double detuning_mhz,
                                                    double analysis_mhz) {
    if (!std::isfinite(analysis_mhz) || analysis_mhz < 0.0) {
        throw InvalidInput(
            fmt::format("analysis frequency must be non-negative, got {} MHz", analysis_mhz));
    }
    if (!std::isfinite(detuning_mhz)) {
        throw InvalidInput("detuning must be finite");
    }

    const Complex r0 = reflection_coeff(spec, detuning_mhz);
    const double r0_abs = std::abs(r0);
    if (r0_abs < kSingularModulus) {
        throw SingularPoint(
            fmt::format("impedance-matched carrier at detuning {} MHz: |r| = {:.3g}",
                        detuning_mhz, r0_abs),
            detuning_mhz);
    }
    const Complex upper = std::conj(r0) / r0_abs * reflection_coeff(spec, detuning_mhz + analysis_mhz);
    const Complex lower = r0 / r0_abs * std::conj(reflection_coeff(spec, detuning_mhz - analysis_mhz));

    RotationCoeffs g;
    g.amplitude = 0.5 * (upper + lower);
    g.phase = 0.5 * (upper - lower);

    // No vacuum port in the lossless limit.
    if (spec.loss() < kLosslessThreshold) {
        return g;
    }
    const Complex t0 = transmission_coeff(spec, detuning_mhz);
    const double t0_abs = std::abs(t0);
    if (t0_abs < kSingularModulus) {
        throw SingularPoint(
            fmt::format("vanishing transmission at detuning {} MHz: |t| = {:.3g}", detuning_mhz,
                        t0_abs),
            detuning_mhz);
    }
    const Complex vac_upper =
        std::conj(t0) / t0_abs * transmission_coeff(spec, detuning_mhz + analysis_mhz);
    const Complex vac_lower =
        t0 / t0_abs * std::conj(transmission_coeff(spec, detuning_mhz - analysis_mhz));
    g.vacuum_amplitude = 0.5 * (vac_upper + vac_lower);
    g.vacuum_phase = 0.5 * (vac_upper - vac_lower);
    return g;
}

// Full width at half maximum, in MHz of detuning, of the intracavity
// resonance 1/|1 - r1 r2 e^{iD/B}|^2. This is the bandwidth the model
// actually has; it equals bandwidth_mhz() only for one particular finesse.
// Empty when the resonance never falls to half its peak within a period.
[[nodiscard]] inline std::optional<double> model_fwhm_mhz(const CavitySpec& spec) {
    const double x = spec.r1() * spec.r2();
    if (x <= 0.0) {
        return std::nullopt;
    }
    const double c = 1.0 - (1.0 - x) * (1.0 - x) / (2.0 * x);
    if (c < -1.0) {
        return std::nullopt;
    }
    return 2.0 * std::acos(c) * spec.bandwidth_mhz();
}

// Input-mirror reflectivity for which model_fwhm_mhz() equals the bandwidth
// scale, at the given internal loss. Throws InvalidInput when the loss is so
// large that no input mirror reaches that finesse.
[[nodiscard]] inline double matched_input_reflectivity(double loss) {
    if (!std::isfinite(loss) || loss < 0.0 || loss >= 1.0) {
        throw InvalidInput(fmt::format("loss must lie in [0, 1), got {}", loss));
    }
    // Half maximum at D/B = 1/2: (1 - x)^2 = 2x(1 - cos(1/2)), x = r1 r2.
    const double k = 1.0 - std::cos(0.5);
    const double x = (1.0 + k) - std::sqrt((1.0 + k) * (1.0 + k) - 1.0);
    const double r1 = x / std::sqrt(1.0 - loss);
    if (r1 >= 1.0) {
        throw InvalidInput(fmt::format("loss {} too large for a matched input mirror", loss));
    }
    return r1;
}

}  // namespace twinbeam
