#include <cmath>
#include <cstdlib>
#include <numbers>

#include <gtest/gtest.h>

#include "gentile_lab/equivalence.hpp"
#include "gentile_lab/errors.hpp"
#include "gentile_lab/partition_core.hpp"
#include "gentile_lab/thermo.hpp"

namespace eq = gentile_lab::equivalence;
namespace pc = gentile_lab::partitions;
using gentile_lab::asymptotics::SpectrumModel;

namespace {

const SpectrumModel kOne = SpectrumModel::power_law(1.0);

double temperature_of(double n)
{
    return std::sqrt(6.0 * n) / std::numbers::pi;
}

std::int64_t twice_root(std::int64_t n)
{
    return static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
}

} // namespace

TEST(MapMicro, Examples)
{
    EXPECT_NEAR(eq::log_map_m_micro(100.0, 20.0), 2.5651, 1e-4);
    EXPECT_NEAR(eq::map_m_micro(100.0, 20.0), 13.0, 0.01);
    EXPECT_NEAR(eq::map_m_micro(100.0, 1e-12), 1.0, 1e-12);
    for (double n : {25.0, 400.0}) {
        for (double cap : {3.0, 11.0}) {
            const double m = eq::map_m_micro(n, cap);
            EXPECT_NEAR(eq::map_m_micro(n, 2.0 * cap) / (m * m), 1.0, 1e-12);
        }
    }
    EXPECT_THROW(eq::map_m_micro(0.0, 1.0), gentile_lab::DomainError);
    EXPECT_THROW(eq::map_m_micro(1.0, -1.0), gentile_lab::DomainError);
}

TEST(MapGrand, Examples)
{
    const double t = temperature_of(100.0);
    EXPECT_NEAR(t, 7.797, 1e-3);
    EXPECT_NEAR(eq::map_m_grand(20.0, t), std::exp(2.5651) / 20.0, 1e-3);
    for (double n : {50.0, 400.0, 3000.0}) {
        for (double cap : {1.0, 7.0, 40.0, 123.4}) {
            EXPECT_NEAR(eq::log_map_m_grand(cap, temperature_of(n)) + std::log(cap), eq::log_map_m_micro(n, cap),
                        1e-12 * std::max(1.0, eq::log_map_m_micro(n, cap)));
        }
    }
    double previous = 0.0;
    for (double cap = 8.0; cap < 60.0; cap += 1.5) {
        const double m = eq::map_m_grand(cap, 7.5);
        EXPECT_GT(m, previous) << cap;
        previous = m;
    }
    EXPECT_THROW(eq::map_m_grand(1.0, 0.0), gentile_lab::DomainError);
}

TEST(MapPower, ReducesToMicroAtOne)
{
    for (double n : {10.0, 100.0, 1000.0}) {
        for (double cap : {1.0, 5.0, 20.0}) {
            EXPECT_NEAR(eq::map_m_power(n, cap, kOne) / eq::map_m_micro(n, cap), 1.0, 1e-12);
        }
    }
}

TEST(MapPower, LeadingLogForSquares)
{
    const auto two = SpectrumModel::power_law(2.0);
    const double log_m = eq::log_map_m_power(1000.0, 10.0, two);
    ASSERT_TRUE(std::isfinite(log_m));
    EXPECT_GT(log_m, 0.0);
    const double t = gentile_lab::thermo::microcanonical_temperature(1000.0, two);
    const double leading = eq::log_map_m_leading(10.0, t, 2.0);
    EXPECT_NEAR(leading, 2.0 * 100.0 / t, 1e-12);
    EXPECT_LT(std::abs(log_m - leading) / leading, 0.30);
}

TEST(Validate, MappedOccupationAndRounding)
{
    const auto report = eq::validate_equivalence(400, 20, 1, eq::Route::exact);
    EXPECT_NEAR(report.mapped_m, 3.606, 1e-3);
    ASSERT_TRUE(report.m_rounded.has_value());
    EXPECT_EQ(*report.m_rounded, 4);
    EXPECT_NEAR(report.rounding_delta, 4.0 - report.mapped_m, 1e-15);
    EXPECT_FALSE(report.m_clamped);
    ASSERT_TRUE(report.exact.has_value());
    EXPECT_EQ(*report.count_fin, pc::count_max_parts(400, 20).exact);
    EXPECT_EQ(*report.count_frac, pc::count_max_multiplicity(400, 4).exact);
    EXPECT_NEAR(report.exact->s_fin, pc::count_max_parts(400, 20).log_value, 1e-12);
    EXPECT_NEAR(report.exact->residual, std::abs(report.exact->s_fin - report.exact->s_frac), 1e-12);
    EXPECT_NEAR(report.exact->relative_residual, report.exact->residual / report.exact->s_fin, 1e-15);
    // N = 20 is below the 2 sqrt(n) scale at n = 400; the residual there is about 8%.
    EXPECT_GT(report.exact->relative_residual, 0.0);
    EXPECT_LT(report.exact->relative_residual, 0.10);
}

TEST(Validate, ResidualSmallAtTwiceRootN)
{
    for (std::int64_t n : {400, 900}) {
        const auto report = eq::validate_equivalence(n, twice_root(n), 1, eq::Route::exact);
        EXPECT_LT(report.exact->relative_residual, 0.05) << n;
        EXPECT_LT(report.asymptotic.relative_residual, 0.05) << n;
    }
}

TEST(Validate, SaturatesWhenCapCoversN)
{
    for (std::int64_t n : {10, 30, 400}) {
        const auto report = eq::validate_equivalence(n, n, 1, eq::Route::exact);
        const auto p = pc::count_unrestricted(n).exact;
        EXPECT_EQ(*report.count_fin, p);
        EXPECT_EQ(*report.count_frac, p);
        EXPECT_EQ(report.exact->residual, 0.0);
    }
    const auto clamped = eq::validate_equivalence(400, 400, 1, eq::Route::exact);
    EXPECT_TRUE(clamped.m_clamped);
    EXPECT_FALSE(clamped.m_rounded.has_value());
    EXPECT_FALSE(clamped.notes.empty());
}

TEST(Validate, CapIsConfigurable)
{
    eq::ValidationOptions options;
    options.m_cap = 3.0;
    const auto report = eq::validate_equivalence(400, 20, 1, eq::Route::exact, options);
    EXPECT_TRUE(report.m_clamped);
    EXPECT_EQ(*report.count_frac, pc::count_unrestricted(400).exact);
    options.m_cap = 0.5;
    EXPECT_THROW(eq::validate_equivalence(400, 20, 1, eq::Route::exact, options), gentile_lab::DomainError);
}

TEST(Validate, AsymptoticRouteSkipsCounts)
{
    const auto report = eq::validate_equivalence(100000, 632, 1, eq::Route::asymptotic);
    EXPECT_FALSE(report.exact.has_value());
    EXPECT_FALSE(report.count_fin.has_value());
    EXPECT_TRUE(std::isfinite(report.asymptotic.relative_residual));
    EXPECT_EQ(&report.headline(), &report.asymptotic);
    EXPECT_THROW(eq::validate_equivalence(100000, 632, 1, eq::Route::exact), gentile_lab::InfeasibleError);
}

TEST(Validate, AsymptoticResidualNonIncreasingAtFixedRatio)
{
    double previous = INFINITY;
    for (std::int64_t n : {400, 900, 1600}) {
        const auto report = eq::validate_equivalence(n, twice_root(n), 1, eq::Route::asymptotic);
        EXPECT_LE(report.asymptotic.relative_residual, previous) << n;
        previous = report.asymptotic.relative_residual;
    }
}

TEST(Validate, RoutesAgreeInOrderOfMagnitude)
{
    for (std::int64_t n : {400, 900}) {
        const auto report = eq::validate_equivalence(n, twice_root(n), 1, eq::Route::exact);
        const double ratio = report.asymptotic.residual / report.exact->residual;
        EXPECT_GE(ratio, 0.1) << n;
        EXPECT_LE(ratio, 10.0) << n;
    }
}

TEST(Validate, HigherPowers)
{
    const auto report = eq::validate_equivalence(500, 6, 2, eq::Route::exact);
    ASSERT_TRUE(report.exact.has_value());
    const auto two = SpectrumModel::power_law(2.0);
    EXPECT_NEAR(report.log_mapped_m, eq::log_map_m_power(500.0, 6.0, two), 1e-12);
    pc::PartitionConstraint fin;
    fin.max_parts = 6;
    EXPECT_EQ(*report.count_fin, pc::count_power(500, 2, fin).exact);
    EXPECT_TRUE(std::isfinite(report.exact->relative_residual));
}

TEST(Validate, BestOccupationScanIsDiagnostic)
{
    eq::ValidationOptions options;
    options.scan_best_m = true;
    const auto report = eq::validate_equivalence(400, 20, 1, eq::Route::exact, options);
    ASSERT_TRUE(report.best_m_exact.has_value());
    EXPECT_LE(*report.best_relative_residual_exact, report.exact->relative_residual);
    EXPECT_GE(*report.best_m_exact, 2);
    EXPECT_LE(*report.best_m_exact, 6);
    EXPECT_EQ(*report.m_rounded, 4);

    options.best_m_scan_limit = 2;
    const auto skipped = eq::validate_equivalence(400, 20, 1, eq::Route::exact, options);
    EXPECT_FALSE(skipped.best_m_exact.has_value());
    EXPECT_EQ(skipped.notes.size(), 1u);
}

TEST(Validate, SqrtFormIsNoted)
{
    eq::ValidationOptions options;
    options.frac_variant = eq::FracVariant::sqrt_m_form;
    const auto report = eq::validate_equivalence(400, 20, 1, eq::Route::asymptotic, options);
    ASSERT_EQ(report.notes.size(), 1u);
    EXPECT_EQ(report.notes[0], "paper-literal-eq5 used");
    const auto general = eq::validate_equivalence(400, 20, 1, eq::Route::asymptotic);
    EXPECT_NE(report.asymptotic.s_frac, general.asymptotic.s_frac);
    EXPECT_EQ(report.asymptotic.s_fin, general.asymptotic.s_fin);
}

TEST(Validate, RejectsInvalid)
{
    EXPECT_THROW(eq::validate_equivalence(0, 5, 1, eq::Route::exact), gentile_lab::DomainError);
    EXPECT_THROW(eq::validate_equivalence(10, 0, 1, eq::Route::exact), gentile_lab::DomainError);
    EXPECT_THROW(eq::validate_equivalence(10, 5, 0, eq::Route::exact), gentile_lab::DomainError);
}
