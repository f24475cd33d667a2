#pragma once

// Gaussian second moments of the twin beams in shot-noise units (a coherent
// state has unit variance in every quadrature), the combined quadratures
// p_pm = (p1 +- p2)/sqrt(2), q_pm = (q1 +- q2)/sqrt(2), and the detection-loss
// channel that mixes in vacuum.
//
// p-q correlations, within a beam or across beams, are not represented.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "twinbeam/errors.hpp"

namespace twinbeam {

struct CombinedQuadratures {
    double sp_plus = 1.0;
    double sp_minus = 1.0;
    double sq_plus = 1.0;
    double sq_minus = 1.0;

    friend bool operator==(const CombinedQuadratures&, const CombinedQuadratures&) = default;
};

struct TwinBeamCovariance {
    double vp1 = 1.0;
    double vp2 = 1.0;
    double vq1 = 1.0;
    double vq2 = 1.0;
    double cp = 0.0;  // <dp1 dp2>
    double cq = 0.0;  // <dq1 dq2>

    // Coherent twin beams: shot noise everywhere, no correlations.
    static TwinBeamCovariance identity() { return {}; }

    // Beams with equal individual variances that reproduce the given combined
    // quadratures: V = (S+ + S-)/2, C = (S+ - S-)/2.
    static TwinBeamCovariance symmetric(const CombinedQuadratures& s) {
        TwinBeamCovariance c;
        c.vp1 = c.vp2 = 0.5 * (s.sp_plus + s.sp_minus);
        c.vq1 = c.vq2 = 0.5 * (s.sq_plus + s.sq_minus);
        c.cp = 0.5 * (s.sp_plus - s.sp_minus);
        c.cq = 0.5 * (s.sq_plus - s.sq_minus);
        return c;
    }

    [[nodiscard]] TwinBeamCovariance swapped() const { return {vp2, vp1, vq2, vq1, cp, cq}; }

    friend TwinBeamCovariance operator+(const TwinBeamCovariance& a, const TwinBeamCovariance& b) {
        return {a.vp1 + b.vp1, a.vp2 + b.vp2, a.vq1 + b.vq1,
                a.vq2 + b.vq2, a.cp + b.cp,   a.cq + b.cq};
    }
    friend TwinBeamCovariance operator*(double k, const TwinBeamCovariance& a) {
        return {k * a.vp1, k * a.vp2, k * a.vq1, k * a.vq2, k * a.cp, k * a.cq};
    }
    friend bool operator==(const TwinBeamCovariance&, const TwinBeamCovariance&) = default;
};

[[nodiscard]] inline CombinedQuadratures combine(const TwinBeamCovariance& cov) {
    return {
        0.5 * (cov.vp1 + cov.vp2 + 2.0 * cov.cp),
        0.5 * (cov.vp1 + cov.vp2 - 2.0 * cov.cp),
        0.5 * (cov.vq1 + cov.vq2 + 2.0 * cov.cq),
        0.5 * (cov.vq1 + cov.vq2 - 2.0 * cov.cq),
    };
}

namespace detail {

inline void check_efficiency(double efficiency) {
    if (!std::isfinite(efficiency) || efficiency <= 0.0 || efficiency > 1.0) {
        throw InvalidInput(fmt::format("efficiency must lie in (0, 1], got {}", efficiency));
    }
}

}  // namespace detail

// Beam-splitter loss: a fraction 1 - efficiency of the field is replaced by
// vacuum.
[[nodiscard]] inline double apply_loss(double variance, double efficiency) {
    detail::check_efficiency(efficiency);
    if (!(variance > 0.0)) {
        throw InvalidInput(fmt::format("variance must be positive, got {}", variance));
    }
    return efficiency * (variance - 1.0) + 1.0;
}

// Inverse of apply_loss. Throws UnphysicalInput when the measured variance is
// at or below 1 - efficiency, which no source state could have produced.
[[nodiscard]] inline double correct_loss(double measured, double efficiency) {
    detail::check_efficiency(efficiency);
    if (!(measured > 1.0 - efficiency)) {
        throw UnphysicalInput(fmt::format(
            "measured variance {} is not above 1 - efficiency = {}: efficiency inconsistent "
            "with data",
            measured, 1.0 - efficiency));
    }
    return (measured - 1.0) / efficiency + 1.0;
}

// Loss acts on variances as above and scales cross-correlations by the
// efficiency (the admixed vacua are independent).
[[nodiscard]] inline TwinBeamCovariance apply_loss(const TwinBeamCovariance& cov, double efficiency) {
    return {apply_loss(cov.vp1, efficiency), apply_loss(cov.vp2, efficiency),
            apply_loss(cov.vq1, efficiency), apply_loss(cov.vq2, efficiency),
            efficiency * cov.cp,             efficiency * cov.cq};
}

[[nodiscard]] inline TwinBeamCovariance correct_loss(const TwinBeamCovariance& cov,
                                                     double efficiency) {
    return {correct_loss(cov.vp1, efficiency), correct_loss(cov.vp2, efficiency),
            correct_loss(cov.vq1, efficiency), correct_loss(cov.vq2, efficiency),
            cov.cp / efficiency,               cov.cq / efficiency};
}

struct Violation {
    std::string constraint;
    // How far the inequality is from holding; positive.
    double margin = 0.0;
};

[[nodiscard]] inline std::vector<Violation> validate_physicality(const TwinBeamCovariance& cov) {
    std::vector<Violation> out;
    const auto positive = [&](const char* name, double v) {
        if (!(v > 0.0)) {
            out.push_back({fmt::format("{} > 0", name), std::isfinite(v) ? -v : std::numeric_limits<double>::infinity()});
        }
    };
    positive("vp1", cov.vp1);
    positive("vp2", cov.vp2);
    positive("vq1", cov.vq1);
    positive("vq2", cov.vq2);
    if (!out.empty()) {
        return out;
    }

    const auto at_least = [&](const std::string& name, double lhs, double rhs) {
        if (!(lhs >= rhs)) {
            out.push_back({name, rhs - lhs});
        }
    };
    at_least("|cp| <= sqrt(vp1*vp2)", std::sqrt(cov.vp1 * cov.vp2), std::abs(cov.cp));
    at_least("|cq| <= sqrt(vq1*vq2)", std::sqrt(cov.vq1 * cov.vq2), std::abs(cov.cq));
    at_least("vp1*vq1 >= 1", cov.vp1 * cov.vq1, 1.0);
    at_least("vp2*vq2 >= 1", cov.vp2 * cov.vq2, 1.0);

    const CombinedQuadratures s = combine(cov);
    at_least("sp_plus*sq_plus >= 1", s.sp_plus * s.sq_plus, 1.0);
    at_least("sp_minus*sq_minus >= 1", s.sp_minus * s.sq_minus, 1.0);
    return out;
}

// Throws UnphysicalInput listing every violated constraint.
inline void require_physical(const TwinBeamCovariance& cov) {
    const auto violations = validate_physicality(cov);
    if (violations.empty()) {
        return;
    }
    std::string msg = "unphysical covariance:";
    for (const auto& v : violations) {
        msg += fmt::format(" [{} violated by {:.6g}]", v.constraint, v.margin);
    }
    throw UnphysicalInput(msg);
}

}  // namespace twinbeam
