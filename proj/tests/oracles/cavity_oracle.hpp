#pragma once

// Independent evaluation of the cavity response and rotation coefficients in
// plain real arithmetic: no std::complex, no library code.

#include <cmath>

namespace oracle {

struct C {
    double re = 0.0;
    double im = 0.0;
};

inline C add(C a, C b) { return {a.re + b.re, a.im + b.im}; }
inline C sub(C a, C b) { return {a.re - b.re, a.im - b.im}; }
inline C mul(C a, C b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline C scale(double k, C a) { return {k * a.re, k * a.im}; }
inline C conj(C a) { return {a.re, -a.im}; }
inline double norm2(C a) { return a.re * a.re + a.im * a.im; }
inline C div(C a, C b) {
    const double d = norm2(b);
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

struct Mirrors {
    double r1;
    double loss;
    double bw;
    [[nodiscard]] double r2() const { return std::sqrt(1.0 - loss); }
    [[nodiscard]] double t1() const { return std::sqrt(1.0 - r1 * r1); }
    [[nodiscard]] double t2() const { return std::sqrt(loss); }
};

inline C reflection(const Mirrors& m, double detuning) {
    const double th = detuning / m.bw;
    const C e{std::cos(th), std::sin(th)};
    const C num = sub(C{m.r1, 0.0}, scale(m.r2(), e));
    const C den = sub(C{1.0, 0.0}, scale(m.r1 * m.r2(), e));
    return div(num, den);
}

inline C transmission(const Mirrors& m, double detuning) {
    const double th = detuning / m.bw;
    const C e{std::cos(th), std::sin(th)};
    const C den = sub(C{1.0, 0.0}, scale(m.r1 * m.r2(), e));
    return div(scale(m.t1() * m.t2(), e), den);
}

struct Gains {
    double p;
    double q;
    double vac;
};

// Squared moduli of the amplitude, phase and vacuum rotation coefficients.
inline Gains gains(const Mirrors& m, double detuning, double analysis) {
    const auto pair = [&](C x0, C xp, C xm) {
        const double a = std::sqrt(norm2(x0));
        const C u = mul(scale(1.0 / a, conj(x0)), xp);
        const C l = mul(scale(1.0 / a, x0), conj(xm));
        return std::pair{norm2(scale(0.5, add(u, l))), norm2(scale(0.5, sub(u, l)))};
    };
    const auto [gp, gq] = pair(reflection(m, detuning), reflection(m, detuning + analysis),
                               reflection(m, detuning - analysis));
    double vac = 0.0;
    if (m.loss > 0.0) {
        const auto [vp, vq] = pair(transmission(m, detuning), transmission(m, detuning + analysis),
                                   transmission(m, detuning - analysis));
        vac = vp + vq;
    }
    return {gp, gq, vac};
}

}  // namespace oracle
