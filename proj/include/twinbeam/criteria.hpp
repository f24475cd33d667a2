#pragma once

// Entanglement witnesses on twin-beam variances:
//   * the inseparability sum  var(p_-) + var(q_+) < 2,
//   * the EPR product of inferred variances  p_inf * q_inf < 1,
// together with first-order error propagation and dB conversion.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "twinbeam/errors.hpp"
#include "twinbeam/twin_beam_state.hpp"

namespace twinbeam {

// A value with its one-standard-error uncertainty.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct DuanResult {
    double sum = 0.0;
    bool violated = false;
};

inline constexpr double kDuanBound = 2.0;
inline constexpr double kEprBound = 1.0;

[[nodiscard]] inline DuanResult duan(double sp_minus, double sq_plus) {
    if (!(sp_minus > 0.0) || !(sq_plus > 0.0)) {
        throw InvalidInput(
            fmt::format("variances must be positive, got {} and {}", sp_minus, sq_plus));
    }
    const double sum = sp_minus + sq_plus;
    return {sum, sum < kDuanBound};
}

// Variance of beam 1's quadrature inferred from a measurement on beam 2.
[[nodiscard]] inline double epr_inferred(double v1, double v2, double cross) {
    if (!(v1 > 0.0) || !(v2 > 0.0)) {
        throw InvalidInput(fmt::format("variances must be positive, got {} and {}", v1, v2));
    }
    if (cross * cross > v1 * v2 * (1.0 + 1e-12)) {
        throw InvalidInput(fmt::format(
            "cross-correlation {} exceeds the Cauchy-Schwarz bound sqrt({}*{})", cross, v1, v2));
    }
    return std::max(0.0, v1 * (1.0 - cross * cross / (v1 * v2)));
}

struct EprResult {
    double p_inferred = 0.0;
    double q_inferred = 0.0;
    double product = 0.0;
    bool violated = false;
};

[[nodiscard]] inline EprResult epr_product(const TwinBeamCovariance& cov) {
    require_physical(cov);
    EprResult r;
    r.p_inferred = epr_inferred(cov.vp1, cov.vp2, cov.cp);
    r.q_inferred = epr_inferred(cov.vq1, cov.vq2, cov.cq);
    r.product = r.p_inferred * r.q_inferred;
    r.violated = r.product < kEprBound;
    return r;
}

[[nodiscard]] inline double to_decibels(double variance) {
    if (!(variance > 0.0)) {
        throw InvalidInput(fmt::format("variance must be positive, got {}", variance));
    }
    return 10.0 * std::log10(variance);
}

[[nodiscard]] inline double from_decibels(double db) { return std::pow(10.0, db / 10.0); }

// Linearized propagation of independent input errors through f, with
// central-difference partial derivatives.
template <std::size_t N, typename F>
[[nodiscard]] Estimate propagate(F&& f, const std::array<Estimate, N>& inputs) {
    std::array<double, N> x{};
    for (std::size_t i = 0; i < N; ++i) {
        x[i] = inputs[i].value;
    }
    const double value = f(x);
    double var = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (inputs[i].error == 0.0) {
            continue;
        }
        const double h = 1e-6 * std::max(std::abs(x[i]), 1e-3);
        auto hi = x;
        auto lo = x;
        hi[i] += h;
        lo[i] -= h;
        const double d = (f(hi) - f(lo)) / (2.0 * h);
        var += d * d * inputs[i].error * inputs[i].error;
    }
    return {value, std::sqrt(var)};
}

// Which pair of combined quadratures the inseparability sum is built from.
enum class Pairing {
    p_minus_q_plus,  // correlated intensities, anti-correlated phases
    p_plus_q_minus,
};

[[nodiscard]] inline const char* pairing_label(Pairing p) {
    return p == Pairing::p_minus_q_plus ? "p_minus + q_plus" : "p_plus + q_minus";
}

// Combined variances as delivered by a measurement, with errors. The second
// pair is optional; without it the EPR product cannot be formed.
struct CombinedEstimates {
    Estimate sp_minus;
    Estimate sq_plus;
    std::optional<Estimate> sp_plus;
    std::optional<Estimate> sq_minus;
};

struct CriteriaReport {
    Pairing pairing = Pairing::p_minus_q_plus;
    double efficiency = 1.0;
    double efficiency_error = 0.0;

    Estimate duan_sum;
    bool duan_violated = false;
    // Empty when the loss correction is unphysical at this efficiency; the
    // reason is then in correction_error.
    std::optional<Estimate> corrected_duan_sum;
    bool corrected_duan_violated = false;
    std::string correction_error;

    // The EPR fields are present only when all four combined variances are
    // known. Individual-beam variances are then reconstructed assuming
    // symmetric beams.
    bool epr_symmetric_assumption = false;
    std::optional<Estimate> epr_p_inferred;
    std::optional<Estimate> epr_q_inferred;
    std::optional<Estimate> epr_product;
    bool epr_violated = false;
    std::optional<Estimate> corrected_epr_product;
    bool corrected_epr_violated = false;

    // Decibel value of the first variance of the pairing.
    std::optional<double> first_variance_db;
};

namespace detail {

// Inferred variance for symmetric beams: V - C^2/V = S+ S- / V.
inline double symmetric_inferred(double s_plus, double s_minus) {
    const double v = 0.5 * (s_plus + s_minus);
    return s_plus * s_minus / v;
}

}  // namespace detail

// Evaluates both witnesses from combined variances, raw and corrected for a
// detection efficiency. Efficiency uncertainty, when given, is propagated
// into the corrected values.
[[nodiscard]] inline CriteriaReport evaluate_criteria(const CombinedEstimates& in,
                                                      double efficiency,
                                                      double efficiency_error = 0.0,
                                                      Pairing pairing = Pairing::p_minus_q_plus) {
    detail::check_efficiency(efficiency);
    if (pairing == Pairing::p_plus_q_minus && (!in.sp_plus || !in.sq_minus)) {
        throw InvalidInput("p_plus + q_minus pairing needs sp_plus and sq_minus");
    }
    CriteriaReport rep;
    rep.pairing = pairing;
    rep.efficiency = efficiency;
    rep.efficiency_error = efficiency_error;

    const Estimate first = pairing == Pairing::p_minus_q_plus ? in.sp_minus : *in.sp_plus;
    const Estimate second = pairing == Pairing::p_minus_q_plus ? in.sq_plus : *in.sq_minus;

    const DuanResult raw = duan(first.value, second.value);
    rep.duan_sum = {raw.sum, std::hypot(first.error, second.error)};
    rep.duan_violated = raw.violated;
    rep.first_variance_db = to_decibels(first.value);

    const Estimate eff{efficiency, efficiency_error};
    try {
        rep.corrected_duan_sum = propagate(
            [](const std::array<double, 3>& x) {
                return correct_loss(x[0], x[2]) + correct_loss(x[1], x[2]);
            },
            std::array<Estimate, 3>{first, second, eff});
        rep.corrected_duan_violated = rep.corrected_duan_sum->value < kDuanBound;
    } catch (const UnphysicalInput& e) {
        rep.corrected_duan_sum.reset();
        rep.correction_error = e.what();
    }

    if (in.sp_plus && in.sq_minus) {
        rep.epr_symmetric_assumption = true;
        const std::array<Estimate, 4> s{*in.sp_plus, in.sp_minus, in.sq_plus, *in.sq_minus};
        rep.epr_p_inferred = propagate(
            [](const std::array<double, 4>& x) { return detail::symmetric_inferred(x[0], x[1]); }, s);
        rep.epr_q_inferred = propagate(
            [](const std::array<double, 4>& x) { return detail::symmetric_inferred(x[2], x[3]); }, s);
        rep.epr_product = propagate(
            [](const std::array<double, 4>& x) {
                return detail::symmetric_inferred(x[0], x[1]) *
                       detail::symmetric_inferred(x[2], x[3]);
            },
            s);
        rep.epr_violated = rep.epr_product->value < kEprBound;
        if (rep.corrected_duan_sum) {
            try {
                const std::array<Estimate, 5> se{s[0], s[1], s[2], s[3], eff};
                rep.corrected_epr_product = propagate(
                    [](const std::array<double, 5>& x) {
                        const double eta = x[4];
                        return detail::symmetric_inferred(correct_loss(x[0], eta),
                                                          correct_loss(x[1], eta)) *
                               detail::symmetric_inferred(correct_loss(x[2], eta),
                                                          correct_loss(x[3], eta));
                    },
                    se);
                rep.corrected_epr_violated = rep.corrected_epr_product->value < kEprBound;
            } catch (const UnphysicalInput& e) {
                rep.corrected_epr_product.reset();
                rep.correction_error = e.what();
            }
        }
    }
    return rep;
}

}  // namespace twinbeam
