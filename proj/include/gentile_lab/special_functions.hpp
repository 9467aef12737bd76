#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/zeta.hpp>

#include "gentile_lab/errors.hpp"

namespace gentile_lab::special {

/// Above this x (and above 2a) the upper incomplete gamma switches to its asymptotic series.
inline double asymptotic_switchover(double a)
{
    return std::max(30.0, 2.0 * a);
}

inline double riemann_zeta(double x)
{
    detail::require(x > 1.0, "zeta is only evaluated for arguments > 1");
    return boost::math::zeta(x);
}

namespace detail {

inline double log_prefactor(double a, double x)
{
    return a * std::log(x) - x;
}

// Power series of the lower function: gamma(a, x) = x^a e^{-x} sum_k x^k / (a (a+1) ... (a+k)).
inline double lower_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Modified Lentz evaluation of the continued fraction for Gamma(a, x) / (x^a e^{-x}), valid for x > a + 1.
inline double upper_continued_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            return h;
        }
    }
    throw ConvergenceError("incomplete gamma continued fraction did not converge for a = " + std::to_string(a) +
                           ", x = " + std::to_string(x));
}

// sum_k (a-1)(a-2)...(a-k) / x^k, truncated before the smallest term; Gamma(a, x) is x^{a-1} e^{-x} times this.
inline double upper_asymptotic(double a, double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        const double next = term * (a - k) / x;
        if (next == 0.0) {
            break; // integer a: the series terminates
        }
        if (std::abs(next) >= std::abs(term)) {
            break;
        }
        term = next;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum;
}

} // namespace detail

/// Leading asymptotic term x^{a-1} e^{-x} of Gamma(a, x).
inline double incomplete_gamma_upper_leading(double a, double x)
{
    gentile_lab::detail::require(a > 0.0 && x > 0.0, "incomplete gamma needs a > 0 and x > 0");
    return std::exp(detail::log_prefactor(a - 1.0, x));
}

/// Upper incomplete gamma function Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
inline double incomplete_gamma_upper(double a, double x)
{
    gentile_lab::detail::require(a > 0.0 && std::isfinite(a), "incomplete gamma needs a > 0");
    gentile_lab::detail::require(x >= 0.0 && !std::isnan(x), "incomplete gamma needs x >= 0");
    if (x == 0.0) {
        return std::tgamma(a);
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (x > asymptotic_switchover(a)) {
        return std::exp(detail::log_prefactor(a - 1.0, x)) * detail::upper_asymptotic(a, x);
    }
    if (x < a + 1.0) {
        return std::tgamma(a) - detail::lower_series(a, x);
    }
    return std::exp(detail::log_prefactor(a, x)) * detail::upper_continued_fraction(a, x);
}

/// ln Gamma(a, x); stays finite where Gamma(a, x) itself underflows.
inline double log_incomplete_gamma_upper(double a, double x)
{
    gentile_lab::detail::require(a > 0.0 && std::isfinite(a), "incomplete gamma needs a > 0");
    gentile_lab::detail::require(x >= 0.0 && !std::isnan(x), "incomplete gamma needs x >= 0");
    if (std::isinf(x)) {
        return -std::numeric_limits<double>::infinity();
    }
    if (x > asymptotic_switchover(a)) {
        return detail::log_prefactor(a - 1.0, x) + std::log(detail::upper_asymptotic(a, x));
    }
    if (x >= a + 1.0) {
        return detail::log_prefactor(a, x) + std::log(detail::upper_continued_fraction(a, x));
    }
    return std::log(incomplete_gamma_upper(a, x));
}

} // namespace gentile_lab::special
