#pragma once

// Ensemble thermodynamics of Gentile gases (at most M particles per level)
// and of N indistinguishable 1D oscillators. Units: hbar*omega = 1 for both
// energy and temperature. Levels are eps_j = j^s.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "gentile_lab/asymptotics.hpp"
#include "gentile_lab/errors.hpp"
#include "gentile_lab/special_functions.hpp"

namespace gentile_lab::thermo {

using asymptotics::SpectrumModel;

/// Maximum occupation per level; unbounded is the Bose-Einstein case.
class MaxOccupation {
public:
    static constexpr MaxOccupation unbounded() { return MaxOccupation{}; }

    static MaxOccupation of(std::int64_t m)
    {
        detail::require(m >= 1, "max occupation M must be >= 1");
        MaxOccupation result;
        result.value_ = m;
        return result;
    }

    constexpr bool bounded() const { return value_.has_value(); }
    constexpr std::int64_t value() const { return *value_; }
    double as_double() const { return value_ ? static_cast<double>(*value_) : std::numeric_limits<double>::infinity(); }

    friend constexpr bool operator==(const MaxOccupation&, const MaxOccupation&) = default;

private:
    constexpr MaxOccupation() = default;
    std::optional<std::int64_t> value_;
};

struct GentileGas {
    MaxOccupation max_occupation = MaxOccupation::unbounded();
    SpectrumModel spectrum{};
    double level_truncation = 1e-14;
    std::int64_t max_levels = 10'000'000;
};

struct ThermoState {
    double temperature = 0.0;
    double fugacity = 0.0;
    double log_fugacity = 0.0; // mu / T, kept separately since z is often within 1e-6 of 1
    double particle_number = 0.0;
    double energy = 0.0;

    double chemical_potential() const { return temperature * log_fugacity; }
};

/// Mean occupation of one level as a function of x = (eps - mu) / T.
inline double occupation_reduced(double x, MaxOccupation max_occupation)
{
    if (!max_occupation.bounded()) {
        detail::require(x > 0.0, "Bose occupation requires eps > mu");
        return 1.0 / std::expm1(x);
    }
    const double m = static_cast<double>(max_occupation.value());
    const double m1 = m + 1.0;
    if (x == 0.0) {
        return 0.5 * m;
    }
    if (std::abs(m1 * x) < 1e-4) {
        // Removable singularity at x = 0.
        const double m1_sq = m1 * m1;
        return 0.5 * m - x * (m1_sq - 1.0) / 12.0 + x * x * x * (m1_sq * m1_sq - 1.0) / 720.0;
    }
    return 1.0 / std::expm1(x) - m1 / std::expm1(m1 * x);
}

inline double occupation(double eps, double mu, double temperature, MaxOccupation max_occupation)
{
    detail::require(temperature > 0.0, "temperature must be positive");
    return occupation_reduced((eps - mu) / temperature, max_occupation);
}

struct LevelSums {
    double particle_number = 0.0;
    double energy = 0.0;
    std::int64_t levels = 0;
};

/// N and E summed over levels j >= 0 at log-fugacity u = mu/T, truncated with an integral tail bound.
inline LevelSums level_sums(double log_fugacity, double temperature, const GentileGas& gas)
{
    detail::require(temperature > 0.0, "temperature must be positive");
    const double s = gas.spectrum.s;
    const double tol = gas.level_truncation;
    LevelSums sums;
    for (std::int64_t j = 0; j < gas.max_levels; ++j) {
        const double eps = std::pow(static_cast<double>(j), s);
        const double f = occupation_reduced(eps / temperature - log_fugacity, gas.max_occupation);
        sums.particle_number += f;
        sums.energy += eps * f;
        sums.levels = j + 1;

        const double x_next = std::pow(static_cast<double>(j + 1), s) / temperature - log_fugacity;
        if (j == 0 || x_next <= 1.0 || eps < temperature || f > tol * sums.particle_number) {
            continue;
        }
        // Beyond j, f <= z e^{-eps/T} / (1 - e^{-x_next}) and the summands decrease.
        const double log_scale = log_fugacity - std::log(-std::expm1(-x_next)) - std::log(s);
        const double reduced = eps / temperature;
        const double tail_n = std::exp(log_scale + std::log(temperature) / s +
                                       special::log_incomplete_gamma_upper(1.0 / s, reduced));
        const double tail_e = std::exp(log_scale + (1.0 + 1.0 / s) * std::log(temperature) +
                                       special::log_incomplete_gamma_upper(1.0 + 1.0 / s, reduced));
        if (tail_n <= tol * sums.particle_number && tail_e <= tol * sums.energy) {
            return sums;
        }
    }
    std::ostringstream message;
    message << "level sum not converged after " << gas.max_levels << " levels (T = " << temperature
            << ", s = " << s << ", mu/T = " << log_fugacity << ")";
    throw ConvergenceError(message.str());
}

inline double particle_number(double log_fugacity, double temperature, const GentileGas& gas)
{
    return level_sums(log_fugacity, temperature, gas).particle_number;
}

struct SolverOptions {
    double relative_tolerance = 1e-12;
    int max_iterations = 400;
};

/// Finds the fugacity at which the level occupations sum to `target`.
inline ThermoState solve_fugacity(double target, double temperature, const GentileGas& gas,
                                  const SolverOptions& options = {})
{
    detail::require(target > 0.0 && std::isfinite(target), "particle number must be positive");
    detail::require(temperature > 0.0, "temperature must be positive");

    auto residual = [&](double u) { return particle_number(u, temperature, gas) - target; };

    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    if (!gas.max_occupation.bounded()) {
        // The ground level alone holds 2N here.
        hi = -std::log1p(0.5 / target);
        f_hi = residual(hi);
        lo = hi - 1.0;
    } else {
        hi = 1.0;
        f_hi = residual(hi);
        for (double step = 1.0; f_hi <= 0.0; step *= 2.0) {
            detail::require<BracketError>(step < 1e12, "could not bracket fugacity from above");
            hi += step;
            f_hi = residual(hi);
        }
        lo = hi - 1.0;
    }
    f_lo = residual(lo);
    for (double step = 1.0; f_lo >= 0.0; step *= 2.0) {
        detail::require<BracketError>(step < 1e6, "could not bracket fugacity from below");
        hi = lo;
        f_hi = f_lo;
        lo -= step;
        f_lo = residual(lo);
    }

    // Regula falsi with the Illinois weighting; falls back to bisection if a step stalls.
    int side = 0;
    double u = hi;
    double f_u = f_hi;
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        if (std::abs(f_u) <= options.relative_tolerance * target) {
            break;
        }
        double candidate = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        const double width = hi - lo;
        if (!(candidate > lo && candidate < hi) || iteration % 8 == 7) {
            candidate = 0.5 * (lo + hi);
        }
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
            break;
        }
        u = candidate;
        f_u = residual(u);
        if (f_u < 0.0) {
            lo = u;
            f_lo = f_u;
            if (side == -1) {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = u;
            f_hi = f_u;
            if (side == 1) {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    const auto sums = level_sums(u, temperature, gas);
    if (std::abs(sums.particle_number - target) > 1e-10 * target) {
        std::ostringstream message;
        message << "fugacity solve did not converge: N_target = " << target << ", T = " << temperature
                << ", mu/T = " << u << ", residual = " << sums.particle_number - target;
        throw ConvergenceError(message.str());
    }
    return {temperature, std::exp(u), u, sums.particle_number, sums.energy};
}

/// Grand-canonical energy sum_j eps_j f_M(eps_j) at the state's fugacity.
inline double energy_grand(const ThermoState& state, const GentileGas& gas)
{
    return level_sums(state.log_fugacity, state.temperature, gas).energy;
}

/// ln Z_N = -sum_{j=1}^{N} ln(1 - e^{-j/T}) for N indistinguishable oscillators.
inline double canonical_log_partition(std::int64_t particles, double temperature)
{
    detail::require(particles >= 1, "particle number N must be >= 1");
    detail::require(temperature > 0.0, "temperature must be positive");
    double sum = 0.0;
    for (std::int64_t j = 1; j <= particles; ++j) {
        sum -= std::log1p(-std::exp(-static_cast<double>(j) / temperature));
    }
    return sum;
}

/// E_N = sum_{j=1}^{N} j / (e^{j/T} - 1), the T-derivative T^2 d(ln Z_N)/dT.
inline double canonical_energy(std::int64_t particles, double temperature)
{
    detail::require(particles >= 1, "particle number N must be >= 1");
    detail::require(temperature > 0.0, "temperature must be positive");
    double sum = 0.0;
    for (std::int64_t j = 1; j <= particles; ++j) {
        const double e = static_cast<double>(j);
        sum += e / std::expm1(e / temperature);
    }
    return sum;
}

namespace internal {

// sum_{j > first} j / (e^{j/T} - 1), stopped once the bound (jT + T^2) e^{-j/T} / (1 - e^{-(j+1)/T}) is negligible.
inline double oscillator_energy_tail(std::int64_t first, double temperature)
{
    double sum = 0.0;
    for (std::int64_t j = first + 1;; ++j) {
        const double e = static_cast<double>(j);
        sum += e / std::expm1(e / temperature);
        if (e >= temperature) {
            const double bound =
                (e * temperature + temperature * temperature) * std::exp(-e / temperature) / -std::expm1(-(e + 1.0) / temperature);
            if (bound <= 1e-17 * sum || bound == 0.0) {
                return sum;
            }
        }
        detail::require<ConvergenceError>(j < 2'000'000'000, "oscillator tail sum did not converge");
    }
}

} // namespace internal

/// Energy of the unbounded Bose oscillator gas, sum_{j >= 1} j / (e^{j/T} - 1).
inline double bose_oscillator_energy(double temperature)
{
    detail::require(temperature > 0.0, "temperature must be positive");
    return internal::oscillator_energy_tail(0, temperature);
}

/// E_N - E_inf: minus the energy of the levels j > N missing from the finite system.
inline double energy_delta_finite(std::int64_t particles, double temperature)
{
    detail::require(particles >= 1, "particle number N must be >= 1");
    detail::require(temperature > 0.0, "temperature must be positive");
    return -internal::oscillator_energy_tail(particles, temperature);
}

/// N e^{-N/T} / (e^{1/T} - 1), the leading large-N form of |E_N - E_inf|.
inline double energy_delta_finite_leading(std::int64_t particles, double temperature)
{
    detail::require(particles >= 1, "particle number N must be >= 1");
    detail::require(temperature > 0.0, "temperature must be positive");
    const double n = static_cast<double>(particles);
    return n * std::exp(-n / temperature) / std::expm1(1.0 / temperature);
}

struct GentileCorrection {
    ThermoState gentile;
    ThermoState bose;
    double delta_energy = 0.0;   // E_M - E_Bose at equal (N, T)
    double delta_fugacity = 0.0; // z_M - z_Bose
};

/// Solves the Gentile-M and Bose systems at the same (N, T) and compares them.
inline GentileCorrection energy_delta_gentile(double target, double temperature, std::int64_t max_occupation,
                                              const SpectrumModel& spectrum = {})
{
    GentileGas gentile{.max_occupation = MaxOccupation::of(max_occupation), .spectrum = spectrum};
    GentileGas bose{.max_occupation = MaxOccupation::unbounded(), .spectrum = spectrum};
    GentileCorrection result;
    result.gentile = solve_fugacity(target, temperature, gentile);
    result.bose = solve_fugacity(target, temperature, bose);
    result.delta_energy = result.gentile.energy - result.bose.energy;
    result.delta_fugacity = result.gentile.fugacity - result.bose.fugacity;
    return result;
}

/// T from 1/T = dS/dE on the saddle-point entropy: E^{s/(1+s)} = lambda_s T.
inline double microcanonical_temperature(double energy, const SpectrumModel& spectrum = {})
{
    detail::require(energy > 0.0, "energy must be positive");
    const double s = spectrum.s;
    return std::pow(energy, s / (1.0 + s)) / spectrum.lambda_s;
}

/// Inverse of microcanonical_temperature; pi^2 T^2 / 6 at s = 1.
inline double microcanonical_energy(double temperature, const SpectrumModel& spectrum = {})
{
    detail::require(temperature > 0.0, "temperature must be positive");
    const double s = spectrum.s;
    return std::pow(spectrum.lambda_s * temperature, (1.0 + s) / s);
}

} // namespace gentile_lab::thermo
