#pragma once

// Closed-form asymptotic microstate counts, all evaluated in log space.
//
// For a spectrum eps_m = m^s the unrestricted count follows from a saddle
// point of S(beta) = beta E + C(s) / beta^{1/s}, with
//   C(s)     = Gamma(1 + 1/s) zeta(1 + 1/s),
//   lambda_s = (C(s) / s)^{s/(s+1)},
//   beta_0   = lambda_s E^{-s/(s+1)}.
// A cap of N particles and a cap of M per level each reduce ln Gamma(E); at
// s = 1 these are the Hardy-Ramanujan, Erdos-Lehner and bounded-multiplicity
// asymptotics.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "gentile_lab/errors.hpp"
#include "gentile_lab/special_functions.hpp"

namespace gentile_lab::asymptotics {

inline constexpr double kMinExponent = 0.2;
inline constexpr double kMaxExponent = 10.0;

struct SpectrumModel {
    double s = 1.0;
    double c_s = std::numbers::pi * std::numbers::pi / 6.0;
    double lambda_s = std::numbers::pi / std::sqrt(6.0);

    /// Spectrum eps_m = m^s. Accepts s in [0.2, 10]; zeta(1 + 1/s) is too close to its pole beyond.
    static SpectrumModel power_law(double s)
    {
        detail::require(s >= kMinExponent && s <= kMaxExponent, "spectrum exponent s must lie in [0.2, 10]");
        SpectrumModel model;
        model.s = s;
        model.c_s = std::tgamma(1.0 + 1.0 / s) * special::riemann_zeta(1.0 + 1.0 / s);
        model.lambda_s = std::pow(model.c_s / s, s / (s + 1.0));
        return model;
    }
};

struct SaddlePoint {
    double beta0 = 0.0;
    double energy = 0.0;
};

/// Which bounded-multiplicity scaling factor log_gamma_frac uses.
enum class FracVariant {
    general,     // (1 - (M+1)^{-1/s})^{s/(s+1)}
    sqrt_m_form, // (1 - M^{-1/2})^{1/2}, s = 1 only; vanishes at M = 1
};

/// ln of (1 / (4 sqrt3 n)) exp(pi sqrt(2n/3)).
inline double log_hardy_ramanujan(double n)
{
    detail::require(n > 0.0, "Hardy-Ramanujan estimate needs n > 0");
    return std::numbers::pi * std::sqrt(2.0 / 3.0) * std::sqrt(n) - std::log(4.0 * std::sqrt(3.0) * n);
}

inline SaddlePoint saddle_point(double energy, const SpectrumModel& model)
{
    detail::require(energy > 0.0, "saddle point needs E > 0");
    const double s = model.s;
    return {model.lambda_s * std::pow(energy, -s / (s + 1.0)), energy};
}

/// Saddle-point ln Gamma(E) for the unrestricted system.
inline double log_microstates(double energy, const SpectrumModel& model)
{
    detail::require(energy > 0.0, "microstate count needs E > 0");
    const double s = model.s;
    return std::log(model.lambda_s) - 0.5 * (s + 1.0) * std::log(2.0 * std::numbers::pi) +
           0.5 * std::log(s / (s + 1.0)) - (3.0 * s + 1.0) / (2.0 * (s + 1.0)) * std::log(energy) +
           model.lambda_s * (s + 1.0) * std::pow(energy, 1.0 / (s + 1.0));
}

/// ln Gamma_fin(n): at most N particles.
inline double log_gamma_fin(double n, double max_parts, const SpectrumModel& model)
{
    detail::require(n > 0.0, "finite-N count needs n > 0");
    detail::require(max_parts >= 1.0, "finite-N count needs N >= 1");
    const double s = model.s;
    const double lambda = model.lambda_s;
    const double scaled = std::pow(n, s / (s + 1.0));
    const double correction = scaled / (lambda * s) * std::pow(max_parts, 1.0 - s) *
                              std::exp(-lambda * std::pow(max_parts, s) / scaled);
    return log_microstates(n, model) - correction;
}

/// (1 - (M+1)^{-1/s})^{s/(s+1)}; tends to 1 as M grows. Infinite M gives exactly 1.
inline double frac_scaling_factor(double max_multiplicity, double s)
{
    detail::require(max_multiplicity >= 1.0, "max occupation M must be >= 1");
    if (std::isinf(max_multiplicity)) {
        return 1.0;
    }
    return std::pow(-std::expm1(-std::log1p(max_multiplicity) / s), s / (s + 1.0));
}

/// ln Gamma_frac(n): at most M particles per level.
inline double log_gamma_frac(double n, double max_multiplicity, const SpectrumModel& model,
                             FracVariant variant = FracVariant::general)
{
    detail::require(n > 0.0, "fractional count needs n > 0");
    detail::require(max_multiplicity >= 1.0, "max occupation M must be >= 1");
    if (variant == FracVariant::sqrt_m_form) {
        detail::require(model.s == 1.0, "the sqrt(M) form of the scaling factor is defined only for s = 1");
        const double g = std::isinf(max_multiplicity) ? 1.0 : std::sqrt(1.0 - 1.0 / std::sqrt(max_multiplicity));
        if (g == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        return -std::log(4.0 * std::sqrt(3.0) * n) + std::numbers::pi * std::sqrt(2.0 / 3.0) * std::sqrt(n) * g +
               std::log(g);
    }
    const double s = model.s;
    const double factor = frac_scaling_factor(max_multiplicity, s);
    return std::log(model.lambda_s) - 0.5 * (s + 1.0) * std::log(2.0 * std::numbers::pi) +
           0.5 * std::log(s / (s + 1.0)) + std::log(factor) - (3.0 * s + 1.0) / (2.0 * (s + 1.0)) * std::log(n) +
           model.lambda_s * factor * (s + 1.0) * std::pow(n, 1.0 / (s + 1.0));
}

/// beta E + C(s) / beta^{1/s}: the part of S(beta) whose stationary point is beta_0.
inline double leading_entropy_beta(double beta, double energy, const SpectrumModel& model)
{
    detail::require(beta > 0.0 && energy > 0.0, "entropy needs beta > 0 and E > 0");
    return beta * energy + model.c_s / std::pow(beta, 1.0 / model.s);
}

/// (1 / (s beta^{1/s})) Gamma(1/s, beta N^s): entropy removed by capping the particle number at N.
inline double finite_size_entropy_correction(double beta, double max_parts, const SpectrumModel& model)
{
    detail::require(beta > 0.0 && max_parts > 0.0, "finite-N correction needs beta > 0 and N > 0");
    const double s = model.s;
    return special::incomplete_gamma_upper(1.0 / s, beta * std::pow(max_parts, s)) /
           (s * std::pow(beta, 1.0 / s));
}

/// S(beta) = beta E + C(s)/beta^{1/s} + ln(beta)/2, minus the finite-N term when N is given.
inline double entropy_beta(double beta, double energy, const SpectrumModel& model,
                           std::optional<double> max_parts = std::nullopt)
{
    double entropy = leading_entropy_beta(beta, energy, model) + 0.5 * std::log(beta);
    if (max_parts) {
        entropy -= finite_size_entropy_correction(beta, *max_parts, model);
    }
    return entropy;
}

} // namespace gentile_lab::asymptotics
