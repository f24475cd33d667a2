#pragma once

// Weighted nonlinear least-squares recovery of combined quadrature variances
// from a swept-cavity trace.
//
// Model for one channel (sum or difference) of identical cavities:
//   y(D) = scale * apply_loss(|g_p|^2 Sp + |g_q|^2 Sq + |g_v|^2, eta) at D - center
// Cavity, analysis frequency and efficiency are held fixed. Sp and Sq are
// optimized as logarithms. Each point is weighted by the inverse variance of
// its windowed estimate, 2 m^2 / (N - 1), with m the model value refreshed
// between passes. Weights built from the measured s instead favour windows
// that fluctuated low and bias the variances down by about 2/N relative;
// WeightMode::data keeps that behaviour available.
//
// Minimization is damped Gauss-Newton (Levenberg-Marquardt with a diagonal
// damping term) on a central-difference Jacobian. Standard errors are the
// square roots of the diagonal of the inverse weighted normal matrix at the
// optimum.
//
// The overall scale is nearly degenerate with the variances whenever the
// vacuum terms are small: only the cavity-loss term distinguishes a change in
// gain from a change in both variances. With ScalePolicy::automatic the
// conditioning of the correlation-normalized normal matrix is checked and the
// scale is pinned to 1 (shot-noise calibrated data) when it exceeds
// kDegenerateCondition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "twinbeam/criteria.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/noise_model.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/random.hpp"
#include "twinbeam/sweep_lab.hpp"

namespace twinbeam {

enum class FitChannel { sum, difference };

[[nodiscard]] inline const char* fit_channel_name(FitChannel c) {
    return c == FitChannel::sum ? "sum" : "difference";
}

enum class ScalePolicy {
    automatic,  // free unless near-degenerate, then pinned to 1
    free,
    fixed,  // held at the start value
};

enum class WeightMode {
    data,   // 2 s^2/(N-1) from the measured variance s
    model,  // 2 m^2/(N-1) from the current model value m, iterated
};

struct FitParameters {
    double sp = 1.0;
    double sq = 1.0;
    double scale = 1.0;
    double center_mhz = 0.0;
};

inline constexpr double kVarianceMin = 1e-3;
inline constexpr double kVarianceMax = 1e3;
inline constexpr double kScaleMin = 0.5;
inline constexpr double kScaleMax = 2.0;
inline constexpr double kDegenerateCondition = 1e4;
inline constexpr double kSingularCondition = 1e12;
inline constexpr int kMaxIterations = 200;

struct FitProblem;
[[nodiscard]] FitParameters initial_guess(const FitProblem& problem,
                                          std::size_t center_candidates = 121);

struct FitProblem {
    std::vector<SweepRow> rows;
    FitChannel channel = FitChannel::difference;
    CavitySpec cavity;
    double analysis_mhz = 0.0;
    double efficiency = 1.0;
    ScalePolicy scale_policy = ScalePolicy::automatic;
    WeightMode weights = WeightMode::model;
    FitParameters start;
    // Center search interval; defaults to the span of the data.
    std::optional<double> center_min_mhz;
    std::optional<double> center_max_mhz;

    // Fixed quantities taken from the dataset's recorded model (cavity 1).
    static FitProblem from_dataset(const SweepDataset& ds, FitChannel channel) {
        FitProblem p;
        p.rows = ds.rows;
        p.channel = channel;
        p.cavity = ds.model.cavity1;
        p.analysis_mhz = ds.model.analysis_mhz;
        p.efficiency = ds.model.efficiency;
        p.start = initial_guess(p);
        return p;
    }

    [[nodiscard]] std::pair<double, double> center_bounds() const {
        double lo = center_min_mhz.value_or(std::numeric_limits<double>::infinity());
        double hi = center_max_mhz.value_or(-std::numeric_limits<double>::infinity());
        if (!center_min_mhz || !center_max_mhz) {
            for (const auto& r : rows) {
                if (!center_min_mhz) {
                    lo = std::min(lo, r.detuning_mhz);
                }
                if (!center_max_mhz) {
                    hi = std::max(hi, r.detuning_mhz);
                }
            }
        }
        return {lo, hi};
    }

    [[nodiscard]] double observed(const SweepRow& r) const {
        return channel == FitChannel::sum ? r.s_sum : r.s_diff;
    }
};

struct FitResult {
    Estimate sp;
    Estimate sq;
    Estimate scale;
    Estimate center_mhz;
    double cost = 0.0;  // sum of weighted squared residuals
    double chi2_per_dof = 0.0;
    std::size_t points = 0;
    std::size_t free_parameters = 0;
    int iterations = 0;
    double final_step_norm = 0.0;
    bool converged = false;
    bool scale_pinned = false;
    // Condition number of the correlation-normalized normal matrix over all
    // four parameters, at the optimum.
    double condition_number = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] FitParameters parameters() const {
        return {sp.value, sq.value, scale.value, center_mhz.value};
    }
};

class FitError : public NumericalFailure {
public:
    enum class Kind { non_convergence, singular, all_starts_failed };

    FitError(Kind kind, const std::string& what) : NumericalFailure(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

namespace detail {

inline constexpr std::array<const char*, 4> kParamNames = {"log(sp)", "log(sq)", "scale",
                                                           "center_mhz"};

using Vec4 = Eigen::Matrix<double, 4, 1>;

class FitEngine {
public:
    explicit FitEngine(const FitProblem& p) : p_(p) {
        if (p_.rows.size() < 10) {
            throw InvalidInput(
                fmt::format("fit needs at least 10 data points, got {}", p_.rows.size()));
        }
        if (!(p_.analysis_mhz > 0.0)) {
            throw InvalidInput("fit needs a positive analysis frequency");
        }
        check_efficiency(p_.efficiency);
        for (const auto& r : p_.rows) {
            if (!(p_.observed(r) > 0.0) || r.n_samples < 2) {
                throw InvalidInput("fit data must have positive variances and n_samples >= 2");
            }
        }
        std::tie(center_lo_, center_hi_) = p_.center_bounds();
        if (!(center_lo_ <= center_hi_)) {
            throw InvalidInput("empty center search interval");
        }
        weights_.resize(p_.rows.size());
        for (std::size_t i = 0; i < p_.rows.size(); ++i) {
            const double s = p_.observed(p_.rows[i]);
            weights_[i] = static_cast<double>(p_.rows[i].n_samples - 1) / (2.0 * s * s);
        }
    }

    [[nodiscard]] Vec4 to_internal(const FitParameters& f) const {
        Vec4 x;
        x << std::log(f.sp), std::log(f.sq), f.scale, f.center_mhz;
        return clamp(x);
    }

    [[nodiscard]] static FitParameters to_external(const Vec4& x) {
        return {std::exp(x[0]), std::exp(x[1]), x[2], x[3]};
    }

    [[nodiscard]] Vec4 clamp(Vec4 x) const {
        x[0] = std::clamp(x[0], std::log(kVarianceMin), std::log(kVarianceMax));
        x[1] = std::clamp(x[1], std::log(kVarianceMin), std::log(kVarianceMax));
        x[2] = std::clamp(x[2], kScaleMin, kScaleMax);
        x[3] = std::clamp(x[3], center_lo_, center_hi_);
        return x;
    }

    [[nodiscard]] double model(const Vec4& x, double detuning_mhz) const {
        return x[2] * combined_channel_spectrum(p_.cavity, detuning_mhz - x[3], p_.analysis_mhz,
                                                std::exp(x[0]), std::exp(x[1]), p_.efficiency);
    }

    // Whitened residuals sqrt(w) (model - data).
    [[nodiscard]] Eigen::VectorXd residuals(const Vec4& x) const {
        Eigen::VectorXd r(static_cast<Eigen::Index>(p_.rows.size()));
        for (std::size_t i = 0; i < p_.rows.size(); ++i) {
            const auto& row = p_.rows[i];
            r[static_cast<Eigen::Index>(i)] =
                std::sqrt(weights_[i]) * (model(x, row.detuning_mhz) - p_.observed(row));
        }
        return r;
    }

    [[nodiscard]] double cost(const Vec4& x) const { return residuals(x).squaredNorm(); }

    // Central differences, step 1e-6 relative (absolute 1e-6 near zero).
    [[nodiscard]] Eigen::MatrixXd jacobian(const Vec4& x) const {
        Eigen::MatrixXd j(static_cast<Eigen::Index>(p_.rows.size()), 4);
        for (int k = 0; k < 4; ++k) {
            const double h = 1e-6 * std::max(std::abs(x[k]), 1.0);
            Vec4 hi = x;
            Vec4 lo = x;
            hi[k] += h;
            lo[k] -= h;
            j.col(k) = (residuals(hi) - residuals(lo)) / (2.0 * h);
        }
        return j;
    }

    // Recomputes weights from the model at x.
    void reweight_from_model(const Vec4& x) {
        for (std::size_t i = 0; i < p_.rows.size(); ++i) {
            const double m = model(x, p_.rows[i].detuning_mhz);
            weights_[i] = static_cast<double>(p_.rows[i].n_samples - 1) / (2.0 * m * m);
        }
    }

    struct Outcome {
        Vec4 x;
        double cost = 0.0;
        int iterations = 0;
        double step_norm = 0.0;
        bool converged = false;
    };

    [[nodiscard]] Outcome minimize(Vec4 x, const std::array<bool, 4>& active) const {
        Outcome out;
        Eigen::VectorXd r = residuals(x);
        double c = r.squaredNorm();
        double lambda = 1e-3;
        double last_step = std::numeric_limits<double>::infinity();

        for (int iter = 1; iter <= kMaxIterations; ++iter) {
            out.iterations = iter;
            const Eigen::MatrixXd j = jacobian(x);
            Eigen::Matrix4d a = j.transpose() * j;
            Eigen::Vector4d g = j.transpose() * r;
            for (int k = 0; k < 4; ++k) {
                if (!active[static_cast<std::size_t>(k)]) {
                    a.row(k).setZero();
                    a.col(k).setZero();
                    a(k, k) = 1.0;
                    g[k] = 0.0;
                }
            }

            bool accepted = false;
            Vec4 x_new = x;
            double c_new = c;
            Eigen::VectorXd r_new;
            while (lambda < 1e16) {
                Eigen::Matrix4d damped = a;
                for (int k = 0; k < 4; ++k) {
                    damped(k, k) += lambda * std::max(a(k, k), 1e-12);
                }
                Vec4 delta = damped.ldlt().solve(-g);
                // At most half a bandwidth of center motion per step: the
                // model is periodic and long jumps land on aliases.
                const double cap = 0.5 * p_.cavity.bandwidth_mhz();
                if (std::abs(delta[3]) > cap) {
                    delta *= cap / std::abs(delta[3]);
                }
                x_new = clamp(x + delta);
                r_new = residuals(x_new);
                c_new = r_new.squaredNorm();
                if (std::isfinite(c_new) && c_new < c) {
                    accepted = true;
                    lambda = std::max(lambda / 3.0, 1e-15);
                    break;
                }
                lambda *= 4.0;
            }
            if (!accepted) {
                // No descent direction left at any damping: a stationary point.
                out.converged = true;
                last_step = 0.0;
                break;
            }
            last_step = (x_new - x).norm() / std::max(x.norm(), 1e-12);
            const double rel_decrease = (c - c_new) / std::max(c, 1e-300);
            x = x_new;
            r = r_new;
            c = c_new;
            if (last_step < 1e-8 || rel_decrease < 1e-10) {
                out.converged = true;
                break;
            }
        }
        out.x = x;
        out.cost = c;
        out.step_norm = last_step;
        return out;
    }

    // Normal matrix J^T W J (whitened residuals already carry W).
    [[nodiscard]] Eigen::Matrix4d normal_matrix(const Vec4& x) const {
        const Eigen::MatrixXd j = jacobian(x);
        return j.transpose() * j;
    }

    [[nodiscard]] double period_mhz() const { return p_.cavity.period_mhz(); }
    [[nodiscard]] std::pair<double, double> center_range() const { return {center_lo_, center_hi_}; }
    [[nodiscard]] std::size_t size() const { return p_.rows.size(); }

private:
    const FitProblem& p_;
    std::vector<double> weights_;
    double center_lo_ = 0.0;
    double center_hi_ = 0.0;
};

// Condition number of the correlation-normalized submatrix over `active`.
inline double scaled_condition(const Eigen::Matrix4d& a, const std::array<bool, 4>& active) {
    std::vector<int> idx;
    for (int k = 0; k < 4; ++k) {
        if (active[static_cast<std::size_t>(k)]) {
            idx.push_back(k);
        }
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = std::sqrt(a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)]) *
                                       a(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(j)]));
            m(i, j) = d > 0.0 ? a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) / d
                              : (i == j ? 0.0 : 0.0);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return hi / lo;
}

// Names the parameters dominating the weakest direction of the normal matrix.
inline std::string weakest_direction(const Eigen::Matrix4d& a, const std::array<bool, 4>& active) {
    Eigen::Matrix4d m = a;
    for (int k = 0; k < 4; ++k) {
        if (!active[static_cast<std::size_t>(k)]) {
            m.row(k).setZero();
            m.col(k).setZero();
            m(k, k) = std::numeric_limits<double>::max();
        }
    }
    Eigen::Vector4d d = m.diagonal().cwiseSqrt();
    for (int k = 0; k < 4; ++k) {
        if (!(d[k] > 0.0) || !std::isfinite(d[k])) {
            d[k] = 1.0;
        }
    }
    const Eigen::Matrix4d scaled = d.asDiagonal().inverse() * m * d.asDiagonal().inverse();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(scaled);
    const Eigen::Vector4d v = es.eigenvectors().col(0);
    std::string names;
    for (int k = 0; k < 4; ++k) {
        if (active[static_cast<std::size_t>(k)] && std::abs(v[k]) > 0.3) {
            if (!names.empty()) {
                names += " + ";
            }
            names += fmt::format("{:.2f}*{}", v[k], kParamNames[static_cast<std::size_t>(k)]);
        }
    }
    return names.empty() ? "unknown" : names;
}

}  // namespace detail

// Starting point from the data alone. For a fixed center the model is linear
// in (Sp, Sq), so each candidate center on a grid over the center interval
// gets a closed-form weighted solve; the lowest-cost candidate wins. Scale is
// taken from problem.start.
[[nodiscard]] inline FitParameters initial_guess(const FitProblem& problem,
                                                 std::size_t center_candidates) {
    if (problem.rows.empty() || center_candidates < 2) {
        throw InvalidInput("initial_guess needs data and at least 2 center candidates");
    }
    const auto [lo, hi] = problem.center_bounds();
    const double eta = problem.efficiency;
    const double scale = problem.start.scale;

    FitParameters best = problem.start;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < center_candidates; ++c) {
        const double center =
            lo + (hi - lo) * static_cast<double>(c) / static_cast<double>(center_candidates - 1);
        std::vector<std::array<double, 4>> pts;  // gp, gq, target, weight
        pts.reserve(problem.rows.size());
        try {
            for (const auto& r : problem.rows) {
                const RotationCoeffs g =
                    rotation_coeffs(problem.cavity, r.detuning_mhz - center, problem.analysis_mhz);
                const double s = problem.observed(r);
                const double w = static_cast<double>(r.n_samples - 1) / (2.0 * s * s);
                pts.push_back({eta * g.amplitude_gain(), eta * g.phase_gain(),
                               s / scale - eta * g.vacuum_gain() - (1.0 - eta), w});
            }
        } catch (const SingularPoint&) {
            continue;
        }
        Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
        Eigen::Vector2d b = Eigen::Vector2d::Zero();
        for (const auto& [gp, gq, y, w] : pts) {
            const Eigen::Vector2d row(gp, gq);
            a += w * row * row.transpose();
            b += w * y * row;
        }
        Eigen::Vector2d v = a.ldlt().solve(b);
        v[0] = std::clamp(std::isfinite(v[0]) ? v[0] : 1.0, kVarianceMin, kVarianceMax);
        v[1] = std::clamp(std::isfinite(v[1]) ? v[1] : 1.0, kVarianceMin, kVarianceMax);
        double cost = 0.0;
        for (const auto& [gp, gq, y, w] : pts) {
            const double d = gp * v[0] + gq * v[1] - y;
            cost += w * d * d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = {v[0], v[1], scale, center};
        }
    }
    return best;
}

// Single fit from problem.start.
[[nodiscard]] inline FitResult fit(const FitProblem& problem) {
    detail::FitEngine engine(problem);
    std::array<bool, 4> active{true, true, problem.scale_policy != ScalePolicy::fixed, true};
    const std::array<bool, 4> all{true, true, true, true};

    FitResult result;
    detail::Vec4 x = engine.to_internal(problem.start);

    if (problem.scale_policy == ScalePolicy::automatic &&
        detail::scaled_condition(engine.normal_matrix(x), all) > kDegenerateCondition) {
        active[2] = false;
        x[2] = 1.0;
    }

    const int passes = problem.weights == WeightMode::model ? 3 : 1;
    detail::FitEngine::Outcome out;
    int total_iterations = 0;
    for (int pass = 0; pass < passes; ++pass) {
        if (problem.weights == WeightMode::model) {
            engine.reweight_from_model(x);
        }
        out = engine.minimize(x, active);
        total_iterations += out.iterations;
        x = out.x;

        if (problem.scale_policy == ScalePolicy::automatic && active[2] &&
            detail::scaled_condition(engine.normal_matrix(x), all) > kDegenerateCondition) {
            active[2] = false;
            x[2] = 1.0;
            out = engine.minimize(x, active);
            total_iterations += out.iterations;
            x = out.x;
        }
        if (!out.converged) {
            break;
        }
    }
    if (!out.converged) {
        throw FitError(FitError::Kind::non_convergence,
                       fmt::format("fit did not converge in {} iterations (relative step {:.3g})",
                                   kMaxIterations, out.step_norm));
    }

    // The model is periodic in the center; report the representative closest
    // to the middle of the scan.
    {
        const auto [lo, hi] = engine.center_range();
        const double mid = 0.5 * (lo + hi);
        const double c = mid + std::remainder(x[3] - mid, engine.period_mhz());
        if (c >= lo && c <= hi) {
            x[3] = c;
        }
    }

    const Eigen::Matrix4d a = engine.normal_matrix(x);
    result.condition_number = detail::scaled_condition(a, all);
    const double active_condition = detail::scaled_condition(a, active);
    if (active_condition > kSingularCondition) {
        throw FitError(FitError::Kind::singular,
                       fmt::format("singular normal matrix (condition {:.3g}); unidentifiable "
                                   "combination: {}",
                                   active_condition, detail::weakest_direction(a, active)));
    }

    Eigen::Matrix4d reduced = a;
    for (int k = 0; k < 4; ++k) {
        if (!active[static_cast<std::size_t>(k)]) {
            reduced.row(k).setZero();
            reduced.col(k).setZero();
            reduced(k, k) = 1.0;
        }
    }
    const Eigen::Matrix4d cov = reduced.inverse();
    const auto se = [&](int k) {
        return active[static_cast<std::size_t>(k)] ? std::sqrt(std::max(cov(k, k), 0.0)) : 0.0;
    };

    const FitParameters f = detail::FitEngine::to_external(x);
    result.sp = {f.sp, f.sp * se(0)};
    result.sq = {f.sq, f.sq * se(1)};
    result.scale = {f.scale, se(2)};
    result.center_mhz = {f.center_mhz, se(3)};
    result.cost = engine.cost(x);
    result.points = engine.size();
    result.free_parameters = static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
    result.chi2_per_dof =
        result.cost / static_cast<double>(result.points - result.free_parameters);
    result.iterations = total_iterations;
    result.final_step_norm = out.step_norm;
    result.converged = true;
    result.scale_pinned = problem.scale_policy == ScalePolicy::automatic && !active[2];
    if (result.scale_pinned) {
        result.warnings.push_back(fmt::format(
            "scale nearly degenerate with the variances (condition {:.3g} > {:.0e}); pinned to 1",
            result.condition_number, kDegenerateCondition));
    }
    const auto at_bound = [](double v, double lo, double hi) {
        return v <= lo * (1.0 + 1e-9) || v >= hi * (1.0 - 1e-9);
    };
    if (at_bound(f.sp, kVarianceMin, kVarianceMax) || at_bound(f.sq, kVarianceMin, kVarianceMax)) {
        result.warnings.push_back("a variance estimate sits on its bound");
    }
    if (active[2] && at_bound(f.scale, kScaleMin, kScaleMax)) {
        result.warnings.push_back("scale estimate sits on its bound");
    }
    return result;
}

// Fits from problem.start and from n_starts - 1 Latin-hypercube points
// inside the bounds; returns the lowest-cost converged fit, ties broken by
// start index. Starts run concurrently; the choice does not depend on
// completion order.
[[nodiscard]] inline FitResult multi_start(const FitProblem& problem, std::size_t n_starts,
                                           std::uint64_t seed) {
    if (n_starts < 1) {
        throw InvalidInput("multi_start needs at least one start");
    }
    const auto [center_lo, center_hi] = problem.center_bounds();
    std::vector<FitParameters> starts{problem.start};
    if (n_starts > 1) {
        const std::size_t m = n_starts - 1;
        std::mt19937_64 rng(substream_seed(seed, 0x6c68735f737461ULL, 0));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::array<std::vector<double>, 4> columns;
        for (auto& col : columns) {
            std::vector<std::size_t> strata(m);
            std::iota(strata.begin(), strata.end(), 0);
            std::shuffle(strata.begin(), strata.end(), rng);
            col.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                col[i] = (static_cast<double>(strata[i]) + u(rng)) / static_cast<double>(m);
            }
        }
        const double lmin = std::log(kVarianceMin);
        const double lmax = std::log(kVarianceMax);
        for (std::size_t i = 0; i < m; ++i) {
            FitParameters s;
            s.sp = std::exp(lmin + columns[0][i] * (lmax - lmin));
            s.sq = std::exp(lmin + columns[1][i] * (lmax - lmin));
            s.scale = problem.scale_policy == ScalePolicy::fixed
                          ? problem.start.scale
                          : kScaleMin + columns[2][i] * (kScaleMax - kScaleMin);
            s.center_mhz = center_lo + columns[3][i] * (center_hi - center_lo);
            starts.push_back(s);
        }
    }

    std::vector<std::optional<FitResult>> results(starts.size());
    std::vector<std::string> failures(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        FitProblem p = problem;
        p.start = starts[i];
        try {
            results[i] = fit(p);
        } catch (const NumericalFailure& e) {
            failures[i] = e.what();
        }
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i] && (!best || results[i]->cost < results[*best]->cost)) {
            best = i;
        }
    }
    if (!best) {
        throw FitError(FitError::Kind::all_starts_failed,
                       fmt::format("all {} starts failed; first: {}", starts.size(), failures[0]));
    }
    return *results[*best];
}

// Duan and EPR criteria from a sum-channel fit (sp_plus, sq_plus) and a
// difference-channel fit (sp_minus, sq_minus). EPR values assume symmetric
// beams.
[[nodiscard]] inline CriteriaReport fit_report(const FitResult& sum_result,
                                               const FitResult& diff_result, double efficiency,
                                               double efficiency_error = 0.0) {
    if (!sum_result.converged || !diff_result.converged) {
        throw InvalidInput("fit_report needs two converged fits");
    }
    CombinedEstimates in;
    in.sp_minus = diff_result.sp;
    in.sq_plus = sum_result.sq;
    in.sp_plus = sum_result.sp;
    in.sq_minus = diff_result.sq;
    return evaluate_criteria(in, efficiency, efficiency_error);
}

// Model curve of a fitted channel at the given detunings.
[[nodiscard]] inline std::vector<double> fitted_curve(const FitProblem& problem,
                                                      const FitResult& result,
                                                      std::span<const double> detunings_mhz) {
    std::vector<double> out;
    out.reserve(detunings_mhz.size());
    for (double d : detunings_mhz) {
        out.push_back(result.scale.value *
                      combined_channel_spectrum(problem.cavity, d - result.center_mhz.value,
                                                problem.analysis_mhz, result.sp.value,
                                                result.sq.value, problem.efficiency));
    }
    return out;
}

}  // namespace twinbeam
