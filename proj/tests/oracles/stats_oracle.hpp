#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

// Central interval of the sample variance of n unit-variance normals.
inline std::pair<double, double> sample_variance_interval(std::size_t n, double coverage) {
    const boost::math::chi_squared dist(static_cast<double>(n - 1));
    const double tail = 0.5 * (1.0 - coverage);
    const double k = static_cast<double>(n - 1);
    return {boost::math::quantile(dist, tail) / k, boost::math::quantile(dist, 1.0 - tail) / k};
}

inline double chi_squared_cdf(double dof, double x) {
    return boost::math::cdf(boost::math::chi_squared(dof), x);
}

// Kolmogorov-Smirnov statistic sqrt(n) * sup|F_n - F| of the sample against
// the chi-square(dof) distribution.
inline double ks_statistic_chi_squared(std::vector<double> x, double dof) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = chi_squared_cdf(dof, x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return std::sqrt(n) * d;
}

// 99% quantile of the Kolmogorov distribution (large-n limit).
inline constexpr double kKolmogorov99 = 1.6276;

}  // namespace oracle
