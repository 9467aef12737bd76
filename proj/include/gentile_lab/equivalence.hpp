#pragma once

// Mapping between a Bose system capped at N particles and a Gentile system
// capped at M particles per level, together with a harness that scores the
// mapping by comparing the two entropies (ln of the microstate counts).
//
// The mapping relations keep only the leading terms in the logarithms, so
// they are scored through entropy residuals, never by matching M itself.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gentile_lab/asymptotics.hpp"
#include "gentile_lab/errors.hpp"
#include "gentile_lab/partition_core.hpp"
#include "gentile_lab/thermo.hpp"

namespace gentile_lab::equivalence {

using asymptotics::FracVariant;
using asymptotics::SpectrumModel;

/// Mapped M above this is indistinguishable from an unrestricted Bose system.
inline constexpr double kDefaultMCap = 1e9;

enum class Route { exact, asymptotic };

inline const char* to_string(Route route)
{
    return route == Route::exact ? "exact" : "asymptotic";
}

/// ln M = (pi / sqrt6) N / sqrt(n), microcanonical oscillator mapping.
inline double log_map_m_micro(double n, double particles)
{
    detail::require(n > 0.0 && particles > 0.0, "mapping needs n > 0 and N > 0");
    return std::numbers::pi / std::sqrt(6.0) * particles / std::sqrt(n);
}

inline double map_m_micro(double n, double particles)
{
    return std::exp(log_map_m_micro(n, particles));
}

/// ln M = N / T - ln N, grand-canonical oscillator mapping.
inline double log_map_m_grand(double particles, double temperature)
{
    detail::require(particles > 0.0 && temperature > 0.0, "mapping needs N > 0 and T > 0");
    return particles / temperature - std::log(particles);
}

inline double map_m_grand(double particles, double temperature)
{
    return std::exp(log_map_m_grand(particles, temperature));
}

/// ln M for the spectrum eps = m^s:
/// M^{1/s} = n^{(1-s)/(1+s)} N^{s-1} exp(lambda_s n^{-s/(1+s)} N^s).
inline double log_map_m_power(double n, double particles, const SpectrumModel& model)
{
    detail::require(n > 0.0 && particles > 0.0, "mapping needs n > 0 and N > 0");
    const double s = model.s;
    return s * ((1.0 - s) / (1.0 + s) * std::log(n) + (s - 1.0) * std::log(particles) +
                model.lambda_s * std::pow(n, -s / (1.0 + s)) * std::pow(particles, s));
}

inline double map_m_power(double n, double particles, const SpectrumModel& model)
{
    return std::exp(log_map_m_power(n, particles, model));
}

/// Leading large-N part of log_map_m_power: ln M ~ s N^s / T.
inline double log_map_m_leading(double particles, double temperature, double s)
{
    detail::require(particles > 0.0 && temperature > 0.0 && s > 0.0, "mapping needs N, T, s > 0");
    return s * std::pow(particles, s) / temperature;
}

struct ValidationOptions {
    double m_cap = kDefaultMCap;
    FracVariant frac_variant = FracVariant::general;
    bool scan_best_m = false;
    std::int64_t best_m_scan_limit = 256; // largest number of candidate M values
};

struct RouteEntropies {
    double s_fin = 0.0;
    double s_frac = 0.0;
    double residual = 0.0;
    double relative_residual = 0.0;
};

inline RouteEntropies make_route_entropies(double s_fin, double s_frac)
{
    RouteEntropies result{s_fin, s_frac, std::abs(s_fin - s_frac), 0.0};
    result.relative_residual = result.residual / std::abs(s_fin);
    return result;
}

struct EquivalenceReport {
    std::int64_t n = 0;
    std::int64_t particles = 0; // N
    int s = 1;
    Route route = Route::exact;

    double mapped_m = 0.0;
    double log_mapped_m = 0.0;
    std::optional<std::int64_t> m_rounded; // empty when clamped to unrestricted
    double rounding_delta = 0.0;           // m_rounded - mapped_m
    bool m_clamped = false;

    std::optional<partitions::BigInt> count_fin;
    std::optional<partitions::BigInt> count_frac;
    std::optional<RouteEntropies> exact;
    RouteEntropies asymptotic;

    std::optional<std::int64_t> best_m_exact;
    std::optional<double> best_relative_residual_exact;

    std::vector<std::string> notes;

    /// Residual of the requested route.
    const RouteEntropies& headline() const { return route == Route::exact ? *exact : asymptotic; }
};

namespace internal {

inline partitions::BigInt frac_count(std::int64_t n, int s, std::optional<std::int64_t> max_multiplicity)
{
    partitions::PartitionConstraint restrictions;
    restrictions.max_multiplicity = max_multiplicity;
    return partitions::count_power(n, s, restrictions).exact;
}

} // namespace internal

inline EquivalenceReport validate_equivalence(std::int64_t n, std::int64_t particles, int s, Route route,
                                              const ValidationOptions& options = {})
{
    detail::require(n >= 1, "equivalence needs n >= 1");
    detail::require(particles >= 1, "equivalence needs N >= 1");
    detail::require(s >= 1, "equivalence needs an integer s >= 1");
    detail::require(options.m_cap >= 1.0, "M cap must be >= 1");
    const auto model = SpectrumModel::power_law(static_cast<double>(s));

    EquivalenceReport report;
    report.n = n;
    report.particles = particles;
    report.s = s;
    report.route = route;
    report.log_mapped_m = log_map_m_power(static_cast<double>(n), static_cast<double>(particles), model);
    report.mapped_m = std::exp(report.log_mapped_m);

    if (!(report.mapped_m <= options.m_cap)) {
        report.m_clamped = true;
        report.notes.push_back("M clamped to unrestricted (mapped M exceeds cap " + std::to_string(options.m_cap) +
                               ")");
    } else {
        report.m_rounded = std::max<std::int64_t>(1, std::llround(report.mapped_m));
        report.rounding_delta = static_cast<double>(*report.m_rounded) - report.mapped_m;
    }
    if (options.frac_variant == FracVariant::sqrt_m_form) {
        report.notes.push_back("paper-literal-eq5 used");
    }

    const double frac_m =
        report.m_rounded ? static_cast<double>(*report.m_rounded) : std::numeric_limits<double>::infinity();
    report.asymptotic = make_route_entropies(
        asymptotics::log_gamma_fin(static_cast<double>(n), static_cast<double>(particles), model),
        asymptotics::log_gamma_frac(static_cast<double>(n), frac_m, model, options.frac_variant));

    if (route == Route::asymptotic) {
        return report;
    }

    partitions::PartitionConstraint fin_restriction;
    fin_restriction.max_parts = particles;
    report.count_fin = partitions::count_power(n, s, fin_restriction).exact;
    report.count_frac = internal::frac_count(n, s, report.m_rounded);
    report.exact = make_route_entropies(partitions::log_big(*report.count_fin), partitions::log_big(*report.count_frac));

    if (options.scan_best_m && report.m_rounded) {
        const auto mapped = static_cast<double>(*report.m_rounded);
        // Counts saturate once M >= n, so larger candidates add nothing.
        const std::int64_t first = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(0.5 * mapped)));
        const std::int64_t last = std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(1.5 * mapped)), n);
        if (last - first + 1 > options.best_m_scan_limit) {
            report.notes.push_back("best_m scan skipped: range exceeds " + std::to_string(options.best_m_scan_limit) +
                                   " candidates");
        } else {
            const double s_fin = report.exact->s_fin;
            for (std::int64_t m = first; m <= last; ++m) {
                const double rel = std::abs(s_fin - partitions::log_big(internal::frac_count(n, s, m))) / std::abs(s_fin);
                if (!report.best_relative_residual_exact || rel < *report.best_relative_residual_exact) {
                    report.best_relative_residual_exact = rel;
                    report.best_m_exact = m;
                }
            }
        }
    }
    return report;
}

} // namespace gentile_lab::equivalence
