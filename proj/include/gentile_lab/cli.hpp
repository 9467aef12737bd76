#pragma once

// Command-line surface: count, asympt, thermo, equiv and validate.
//
// Every value flag accepts a single value, a list "a,b,c" or an inclusive range
// "a:b:step" (list items may themselves be ranges). A run evaluates the
// Cartesian product of all flag values, outermost loop first in the documented
// flag order, and emits one row per grid point.
//
// Exit codes: 0 success, 1 input / domain / solver errors, 2 validation
// threshold failure (validate only).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gentile_lab/asymptotics.hpp"
#include "gentile_lab/equivalence.hpp"
#include "gentile_lab/errors.hpp"
#include "gentile_lab/partition_core.hpp"
#include "gentile_lab/report.hpp"
#include "gentile_lab/thermo.hpp"

namespace gentile_lab::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::size_t kMaxRows = 100000;

/// Malformed flags or flag values.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Sweep grid larger than kMaxRows.
class SweepCapError : public std::runtime_error {
public:
    explicit SweepCapError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { csv, json };

enum class FlagKind { numeric, text, toggle };

struct FlagDef {
    std::string name;
    FlagKind kind = FlagKind::numeric;
    std::string default_value; // empty: no default
    std::string help;
};

struct SubcommandDef {
    std::string name;
    std::string description;
    std::vector<FlagDef> flags;
    std::vector<std::string> columns;
};

namespace detail {

inline std::vector<std::string> equiv_columns()
{
    return {"n",
            "N",
            "s",
            "route",
            "mapped_m",
            "log_mapped_m",
            "m_rounded",
            "rounding_delta",
            "m_clamped",
            "count_fin",
            "count_frac",
            "s_fin_exact",
            "s_frac_exact",
            "relative_residual_exact",
            "s_fin_asymptotic",
            "s_frac_asymptotic",
            "relative_residual_asymptotic",
            "residual",
            "relative_residual",
            "best_m_exact",
            "log_m_grand",
            "log_m_leading"};
}

inline std::vector<FlagDef> equiv_flags()
{
    return {{"n", FlagKind::numeric, "", "energy level n (integer)"},
            {"cap-n", FlagKind::numeric, "", "particle cap N (integer or 'auto' = ceil(2 sqrt n))"},
            {"s", FlagKind::numeric, "1", "spectrum exponent (integer)"},
            {"route", FlagKind::text, "exact", "exact | asymptotic"},
            {"m-cap", FlagKind::numeric, "1e9", "mapped M above this is treated as unrestricted"},
            {"paper-literal-eq5", FlagKind::toggle, "", "use the (1 - 1/sqrt M)^(1/2) scaling in ln Gamma_frac"},
            {"best-m", FlagKind::toggle, "", "scan M within +-50% for the smallest exact residual"}};
}

} // namespace detail

inline const std::vector<SubcommandDef>& subcommands()
{
    static const std::vector<SubcommandDef> defs = [] {
        std::vector<SubcommandDef> out;
        out.push_back({"count",
                       "exact restricted partition counts",
                       {{"n", FlagKind::numeric, "", "target integer n"},
                        {"max-parts", FlagKind::numeric, "", "at most N parts"},
                        {"max-mult", FlagKind::numeric, "", "each part at most M times"},
                        {"s", FlagKind::numeric, "1", "parts are s-th powers"}},
                       {"n", "s", "max_parts", "max_mult", "exact", "log"}});
        out.push_back({"asympt",
                       "asymptotic formulas (log space)",
                       {{"formula", FlagKind::text, "", "hr | micro | fin | frac | entropy | saddle | igamma"},
                        {"n", FlagKind::numeric, "", "energy n (E)"},
                        {"N", FlagKind::numeric, "", "particle cap N"},
                        {"M", FlagKind::numeric, "", "occupation cap M (or inf)"},
                        {"s", FlagKind::numeric, "1", "spectrum exponent"},
                        {"beta", FlagKind::numeric, "", "inverse temperature"},
                        {"a", FlagKind::numeric, "", "incomplete gamma order"},
                        {"x", FlagKind::numeric, "", "incomplete gamma argument"},
                        {"paper-literal-eq5", FlagKind::toggle, "", "use the (1 - 1/sqrt M)^(1/2) scaling for frac"}},
                       {"formula", "s", "n", "N", "M", "beta", "a", "x", "value"}});
        out.push_back({"thermo",
                       "ensemble thermodynamics",
                       {{"mode", FlagKind::text, "",
                         "occupation | grand | canonical | delta-finite | delta-gentile | micro"},
                        {"N", FlagKind::numeric, "", "particle number"},
                        {"T", FlagKind::numeric, "", "temperature"},
                        {"M", FlagKind::numeric, "inf", "occupation cap M (or inf)"},
                        {"s", FlagKind::numeric, "1", "spectrum exponent"},
                        {"eps", FlagKind::numeric, "", "level energy (occupation)"},
                        {"mu", FlagKind::numeric, "", "chemical potential (occupation)"},
                        {"E", FlagKind::numeric, "", "energy (micro)"}},
                       {"mode", "s", "N", "T", "M", "eps", "mu", "z", "log_z", "energy", "log_partition", "delta",
                        "delta_z", "leading", "value"}});
        out.push_back({"equiv", "Bose(N) <-> Gentile(M) equivalence report", detail::equiv_flags(),
                       detail::equiv_columns()});
        auto validate_flags = detail::equiv_flags();
        validate_flags.push_back({"threshold", FlagKind::numeric, "0.05", "maximum relative entropy residual"});
        auto validate_columns = detail::equiv_columns();
        validate_columns.push_back("threshold");
        validate_columns.push_back("pass");
        out.push_back({"validate", "equivalence check against a residual threshold (exit 2 on failure)",
                       std::move(validate_flags), std::move(validate_columns)});
        return out;
    }();
    return defs;
}

inline const SubcommandDef& find_subcommand(const std::string& name)
{
    for (const auto& def : subcommands()) {
        if (def.name == name) {
            return def;
        }
    }
    throw InputError("unknown subcommand '" + name + "'");
}

struct CommandSpec {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> parameters; // value flags in flag order, raw text
    std::set<std::string> switches;
    OutputFormat output_format = OutputFormat::csv;
    std::optional<std::string> output_path;

    const std::string* raw(const std::string& name) const
    {
        for (const auto& [key, value] : parameters) {
            if (key == name) {
                return &value;
            }
        }
        return nullptr;
    }
};

struct RunResult {
    report::ReportDocument document;
    int exit_code = 0;
};

// ---------------------------------------------------------------------------
// Value grids

namespace detail {

inline std::string trim(const std::string& text)
{
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& text, char separator)
{
    std::vector<std::string> parts;
    std::string current;
    for (const char c : text) {
        if (c == separator) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

inline std::optional<double> parse_double(const std::string& text)
{
    const auto value = trim(text);
    if (value.empty()) {
        return std::nullopt;
    }
    double parsed = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || end != value.data() + value.size()) {
        return std::nullopt;
    }
    return parsed;
}

inline std::vector<std::string> expand_range(const std::string& flag, const std::string& item)
{
    const auto pieces = split(item, ':');
    if (pieces.size() != 3) {
        throw InputError("--" + flag + ": range '" + item + "' must have the form a:b:step");
    }
    const auto a = parse_double(pieces[0]);
    const auto b = parse_double(pieces[1]);
    const auto step = parse_double(pieces[2]);
    if (!a || !b || !step) {
        throw InputError("--" + flag + ": range '" + item + "' has a non-numeric bound");
    }
    if (!(*step > 0.0) || *b < *a) {
        throw InputError("--" + flag + ": range '" + item + "' is empty");
    }
    const double span = (*b - *a) / *step;
    if (span + 1.0 > static_cast<double>(kMaxRows)) {
        throw SweepCapError("--" + flag + ": range '" + item + "' exceeds " + std::to_string(kMaxRows) + " values");
    }
    const auto count = static_cast<std::int64_t>(std::floor(span + 1e-9)) + 1;
    std::vector<std::string> values;
    for (std::int64_t k = 0; k < count; ++k) {
        values.push_back(report::format_real(*a + static_cast<double>(k) * *step));
    }
    return values;
}

} // namespace detail

/// Expands "a,b:c:step,..." into the individual values, preserving order.
inline std::vector<std::string> expand_values(const std::string& flag, const std::string& raw, FlagKind kind)
{
    std::vector<std::string> values;
    for (const auto& piece : detail::split(raw, ',')) {
        const auto item = detail::trim(piece);
        if (item.empty()) {
            throw InputError("--" + flag + ": empty value in '" + raw + "'");
        }
        if (kind == FlagKind::numeric && item.find(':') != std::string::npos) {
            for (auto& value : detail::expand_range(flag, item)) {
                values.push_back(std::move(value));
            }
        } else {
            values.push_back(item);
        }
    }
    return values;
}

using GridPoint = std::map<std::string, std::string>;

/// Cartesian product of all value flags; the first flag varies slowest.
inline std::vector<GridPoint> expand_grid(const CommandSpec& spec)
{
    const auto& def = find_subcommand(spec.subcommand);
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::size_t total = 1;
    for (const auto& flag : def.flags) {
        if (flag.kind == FlagKind::toggle) {
            continue;
        }
        const std::string* raw = spec.raw(flag.name);
        if (!raw) {
            continue;
        }
        auto values = expand_values(flag.name, *raw, flag.kind);
        total *= values.size();
        if (total > kMaxRows) {
            throw SweepCapError("sweep grid exceeds " + std::to_string(kMaxRows) + " rows");
        }
        axes.emplace_back(flag.name, std::move(values));
    }
    std::vector<GridPoint> grid(1);
    for (const auto& [name, values] : axes) {
        std::vector<GridPoint> next;
        next.reserve(grid.size() * values.size());
        for (const auto& point : grid) {
            for (const auto& value : values) {
                auto extended = point;
                extended[name] = value;
                next.push_back(std::move(extended));
            }
        }
        grid = std::move(next);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Row evaluation

namespace detail {

using report::Cell;

struct Row {
    std::vector<Cell> cells;
    std::vector<std::string> notes;
    bool failed_threshold = false;
};

class PointReader {
public:
    explicit PointReader(const GridPoint& point) : point_(point) {}

    bool has(const std::string& name) const { return point_.count(name) > 0; }

    const std::string& text(const std::string& name) const
    {
        auto it = point_.find(name);
        if (it == point_.end()) {
            throw InputError("missing required flag --" + name);
        }
        return it->second;
    }

    double real(const std::string& name) const
    {
        const auto& value = text(name);
        if (value == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        const auto parsed = parse_double(value);
        if (!parsed || std::isnan(*parsed)) {
            throw InputError("--" + name + ": '" + value + "' is not a number");
        }
        return *parsed;
    }

    std::int64_t integer(const std::string& name) const
    {
        const double value = real(name);
        if (!std::isfinite(value) || std::abs(value - std::round(value)) > 1e-9 || std::abs(value) > 9e15) {
            throw InputError("--" + name + ": '" + text(name) + "' is not an integer");
        }
        return static_cast<std::int64_t>(std::llround(value));
    }

    Cell real_cell(const std::string& name) const { return has(name) ? Cell{real(name)} : Cell{}; }
    Cell integer_cell(const std::string& name) const { return has(name) ? Cell{integer(name)} : Cell{}; }

private:
    const GridPoint& point_;
};

inline Cell optional_cell(const std::optional<std::int64_t>& value)
{
    return value ? Cell{*value} : Cell{};
}

inline Cell decimal_cell(const std::optional<partitions::BigInt>& value)
{
    return value ? Cell{report::Decimal{value->str()}} : Cell{};
}

inline Row evaluate_count(const PointReader& p)
{
    partitions::PartitionConstraint constraint;
    constraint.n = p.integer("n");
    if (p.has("max-parts")) {
        constraint.max_parts = p.integer("max-parts");
    }
    if (p.has("max-mult")) {
        constraint.max_multiplicity = p.integer("max-mult");
    }
    const auto power = p.integer("s");
    gentile_lab::detail::require(power >= 1 && power <= 64, "count needs an integer s >= 1");
    constraint.power = static_cast<int>(power);
    const auto result = partitions::count(constraint);
    return {{constraint.n, static_cast<std::int64_t>(constraint.power), optional_cell(constraint.max_parts),
             optional_cell(constraint.max_multiplicity), report::Decimal{result.exact.str()}, result.log_value},
            {}};
}

inline Row evaluate_asympt(const PointReader& p, bool sqrt_m_form)
{
    const auto& formula = p.text("formula");
    const double s = p.real("s");
    const auto model = asymptotics::SpectrumModel::power_law(s);
    double value = 0.0;
    std::vector<std::string> notes;
    if (formula == "hr") {
        value = asymptotics::log_hardy_ramanujan(p.real("n"));
    } else if (formula == "micro") {
        value = asymptotics::log_microstates(p.real("n"), model);
    } else if (formula == "fin") {
        value = asymptotics::log_gamma_fin(p.real("n"), p.real("N"), model);
    } else if (formula == "frac") {
        const auto variant = sqrt_m_form ? asymptotics::FracVariant::sqrt_m_form : asymptotics::FracVariant::general;
        value = asymptotics::log_gamma_frac(p.real("n"), p.real("M"), model, variant);
        if (sqrt_m_form) {
            notes.emplace_back("paper-literal-eq5 used");
        }
    } else if (formula == "entropy") {
        std::optional<double> cap;
        if (p.has("N")) {
            cap = p.real("N");
        }
        value = asymptotics::entropy_beta(p.real("beta"), p.real("n"), model, cap);
    } else if (formula == "saddle") {
        value = asymptotics::saddle_point(p.real("n"), model).beta0;
    } else if (formula == "igamma") {
        value = special::incomplete_gamma_upper(p.real("a"), p.real("x"));
    } else {
        throw InputError("--formula: unknown formula '" + formula + "'");
    }
    return {{formula, s, p.real_cell("n"), p.real_cell("N"), p.real_cell("M"), p.real_cell("beta"), p.real_cell("a"),
             p.real_cell("x"), value},
            std::move(notes)};
}

inline thermo::MaxOccupation read_occupation(const PointReader& p)
{
    const double m = p.real("M");
    if (std::isinf(m)) {
        return thermo::MaxOccupation::unbounded();
    }
    return thermo::MaxOccupation::of(p.integer("M"));
}

inline Row evaluate_thermo(const PointReader& p)
{
    const auto& mode = p.text("mode");
    const double s = p.real("s");
    const auto model = asymptotics::SpectrumModel::power_law(s);
    Row row;
    row.cells.assign(15, Cell{});
    enum Column { kMode, kS, kN, kT, kM, kEps, kMu, kZ, kLogZ, kEnergy, kLogPartition, kDelta, kDeltaZ, kLeading, kValue };
    row.cells[kMode] = mode;
    row.cells[kS] = s;
    if (mode == "occupation") {
        const auto occupancy = read_occupation(p);
        const double value = thermo::occupation(p.real("eps"), p.real("mu"), p.real("T"), occupancy);
        row.cells[kT] = p.real("T");
        row.cells[kM] = occupancy.as_double();
        row.cells[kEps] = p.real("eps");
        row.cells[kMu] = p.real("mu");
        row.cells[kValue] = value;
    } else if (mode == "grand") {
        const auto occupancy = read_occupation(p);
        thermo::GentileGas gas{.max_occupation = occupancy, .spectrum = model};
        const auto state = thermo::solve_fugacity(p.real("N"), p.real("T"), gas);
        row.cells[kN] = p.real("N");
        row.cells[kT] = p.real("T");
        row.cells[kM] = occupancy.as_double();
        row.cells[kMu] = state.chemical_potential();
        row.cells[kZ] = state.fugacity;
        row.cells[kLogZ] = state.log_fugacity;
        row.cells[kEnergy] = state.energy;
        row.cells[kValue] = state.energy;
    } else if (mode == "canonical") {
        const auto n = p.integer("N");
        const double t = p.real("T");
        const double energy = thermo::canonical_energy(n, t);
        row.cells[kN] = n;
        row.cells[kT] = t;
        row.cells[kEnergy] = energy;
        row.cells[kLogPartition] = thermo::canonical_log_partition(n, t);
        row.cells[kValue] = energy;
    } else if (mode == "delta-finite") {
        const auto n = p.integer("N");
        const double t = p.real("T");
        const double delta = thermo::energy_delta_finite(n, t);
        const double leading = thermo::energy_delta_finite_leading(n, t);
        row.cells[kN] = n;
        row.cells[kT] = t;
        row.cells[kDelta] = delta;
        row.cells[kLeading] = leading;
        row.cells[kValue] = delta / leading;
    } else if (mode == "delta-gentile") {
        const auto m = p.integer("M");
        const auto correction = thermo::energy_delta_gentile(p.real("N"), p.real("T"), m, model);
        row.cells[kN] = p.real("N");
        row.cells[kT] = p.real("T");
        row.cells[kM] = m;
        row.cells[kZ] = correction.gentile.fugacity;
        row.cells[kLogZ] = correction.gentile.log_fugacity;
        row.cells[kEnergy] = correction.gentile.energy;
        row.cells[kDelta] = correction.delta_energy;
        row.cells[kDeltaZ] = correction.delta_fugacity;
        row.cells[kValue] = static_cast<double>(m) * correction.delta_energy;
    } else if (mode == "micro") {
        const double energy = p.real("E");
        const double t = thermo::microcanonical_temperature(energy, model);
        row.cells[kT] = t;
        row.cells[kEnergy] = energy;
        row.cells[kValue] = t;
    } else {
        throw InputError("--mode: unknown mode '" + mode + "'");
    }
    return row;
}

inline Row evaluate_equiv(const PointReader& p, const std::set<std::string>& switches, bool with_threshold)
{
    const auto n = p.integer("n");
    std::int64_t cap_n = 0;
    if (p.text("cap-n") == "auto") {
        gentile_lab::detail::require(n >= 1, "equivalence needs n >= 1");
        cap_n = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(n)) - 1e-12));
    } else {
        cap_n = p.integer("cap-n");
    }
    const auto power = p.integer("s");
    gentile_lab::detail::require(power >= 1 && power <= 10, "equivalence needs an integer s in [1, 10]");
    const auto& route_text = p.text("route");
    equivalence::Route route;
    if (route_text == "exact") {
        route = equivalence::Route::exact;
    } else if (route_text == "asymptotic") {
        route = equivalence::Route::asymptotic;
    } else {
        throw InputError("--route: expected exact or asymptotic, got '" + route_text + "'");
    }
    equivalence::ValidationOptions options;
    options.m_cap = p.real("m-cap");
    options.scan_best_m = switches.count("best-m") > 0;
    if (switches.count("paper-literal-eq5")) {
        options.frac_variant = asymptotics::FracVariant::sqrt_m_form;
    }
    const auto result = equivalence::validate_equivalence(n, cap_n, static_cast<int>(power), route, options);

    const auto model = asymptotics::SpectrumModel::power_law(static_cast<double>(power));
    const double temperature = thermo::microcanonical_temperature(static_cast<double>(n), model);
    const auto& headline = result.headline();

    Row row;
    auto& c = row.cells;
    c.emplace_back(result.n);
    c.emplace_back(result.particles);
    c.emplace_back(static_cast<std::int64_t>(result.s));
    c.emplace_back(std::string(equivalence::to_string(result.route)));
    c.emplace_back(result.mapped_m);
    c.emplace_back(result.log_mapped_m);
    c.push_back(optional_cell(result.m_rounded));
    c.push_back(result.m_rounded ? Cell{result.rounding_delta} : Cell{});
    c.emplace_back(result.m_clamped);
    c.push_back(decimal_cell(result.count_fin));
    c.push_back(decimal_cell(result.count_frac));
    c.push_back(result.exact ? Cell{result.exact->s_fin} : Cell{});
    c.push_back(result.exact ? Cell{result.exact->s_frac} : Cell{});
    c.push_back(result.exact ? Cell{result.exact->relative_residual} : Cell{});
    c.emplace_back(result.asymptotic.s_fin);
    c.emplace_back(result.asymptotic.s_frac);
    c.emplace_back(result.asymptotic.relative_residual);
    c.emplace_back(headline.residual);
    c.emplace_back(headline.relative_residual);
    c.push_back(optional_cell(result.best_m_exact));
    c.emplace_back(equivalence::log_map_m_grand(static_cast<double>(cap_n), temperature));
    c.emplace_back(equivalence::log_map_m_leading(static_cast<double>(cap_n), temperature, model.s));
    if (with_threshold) {
        const double threshold = p.real("threshold");
        const bool pass = headline.relative_residual < threshold;
        c.emplace_back(threshold);
        c.emplace_back(pass);
        row.failed_threshold = !pass;
    }
    for (const auto& note : result.notes) {
        row.notes.push_back("n=" + std::to_string(n) + " N=" + std::to_string(cap_n) + ": " + note);
    }
    return row;
}

inline Row evaluate_point(const CommandSpec& spec, const GridPoint& point)
{
    const PointReader reader(point);
    if (spec.subcommand == "count") {
        return evaluate_count(reader);
    }
    if (spec.subcommand == "asympt") {
        return evaluate_asympt(reader, spec.switches.count("paper-literal-eq5") > 0);
    }
    if (spec.subcommand == "thermo") {
        return evaluate_thermo(reader);
    }
    if (spec.subcommand == "equiv") {
        return evaluate_equiv(reader, spec.switches, false);
    }
    if (spec.subcommand == "validate") {
        return evaluate_equiv(reader, spec.switches, true);
    }
    throw InputError("unknown subcommand '" + spec.subcommand + "'");
}

// Evaluates rows on a few worker threads; results land by index, so the order is fixed.
inline std::vector<Row> evaluate_grid(const CommandSpec& spec, const std::vector<GridPoint>& grid)
{
    std::vector<Row> rows(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), grid.size()));
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < grid.size(); i += workers) {
            try {
                rows[i] = evaluate_point(spec, grid[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back(work, w);
        }
        for (auto& thread : threads) {
            thread.join();
        }
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
    return rows;
}

} // namespace detail

/// Evaluates a parsed command; throws on input, domain and solver errors.
inline RunResult execute(const CommandSpec& spec)
{
    const auto& def = find_subcommand(spec.subcommand);
    RunResult result;
    auto& document = result.document;
    document.version = kVersion;
    document.subcommand = spec.subcommand;
    for (const auto& flag : def.flags) {
        if (flag.kind == FlagKind::toggle) {
            document.parameters.emplace_back(flag.name, spec.switches.count(flag.name) ? "true" : "false");
        } else if (const std::string* raw = spec.raw(flag.name)) {
            document.parameters.emplace_back(flag.name, *raw);
        }
    }
    document.columns = def.columns;

    const auto grid = expand_grid(spec);
    bool failed = false;
    for (auto& row : detail::evaluate_grid(spec, grid)) {
        for (const auto& note : row.notes) {
            document.add_note(note);
        }
        failed = failed || row.failed_threshold;
        document.rows.push_back(std::move(row.cells));
    }
    result.exit_code = failed ? 2 : 0;
    return result;
}

struct ParseOutcome {
    std::optional<CommandSpec> spec; // empty when help was printed
};

/// Parses argv-style arguments (without the program name).
inline ParseOutcome parse_command_line(const std::vector<std::string>& args, std::ostream& help_out)
{
    CLI::App app{"Exact and asymptotic restricted-partition counts, Gentile thermodynamics and the "
                 "Bose(N) <-> Gentile(M) equivalence",
                 "gentile_lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> toggles;
    std::map<std::string, std::string> formats;
    std::map<std::string, std::string> outputs;
    std::map<std::string, CLI::App*> apps;

    for (const auto& def : subcommands()) {
        auto* sub = app.add_subcommand(def.name, def.description);
        apps[def.name] = sub;
        for (const auto& flag : def.flags) {
            if (flag.kind == FlagKind::toggle) {
                toggles[def.name][flag.name] = false;
                sub->add_flag("--" + flag.name, toggles[def.name][flag.name], flag.help);
            } else {
                auto* option = sub->add_option("--" + flag.name, values[def.name][flag.name], flag.help);
                if (!flag.default_value.empty()) {
                    option->default_str(flag.default_value);
                }
            }
        }
        formats[def.name] = "csv";
        sub->add_option("--format", formats[def.name], "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", outputs[def.name], "output file (default: standard output)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        help_out << app.help();
        return {};
    } catch (const CLI::CallForAllHelp&) {
        help_out << app.help("", CLI::AppFormatMode::All);
        return {};
    } catch (const CLI::CallForVersion&) {
        help_out << kVersion << '\n';
        return {};
    } catch (const CLI::ParseError& error) {
        throw InputError(error.what());
    }

    CommandSpec spec;
    for (const auto& def : subcommands()) {
        auto* sub = apps[def.name];
        if (!sub->parsed()) {
            continue;
        }
        spec.subcommand = def.name;
        for (const auto& flag : def.flags) {
            if (flag.kind == FlagKind::toggle) {
                if (toggles[def.name][flag.name]) {
                    spec.switches.insert(flag.name);
                }
            } else if (sub->count("--" + flag.name) > 0) {
                spec.parameters.emplace_back(flag.name, values[def.name][flag.name]);
            } else if (!flag.default_value.empty()) {
                spec.parameters.emplace_back(flag.name, flag.default_value);
            }
        }
        spec.output_format = formats[def.name] == "json" ? OutputFormat::json : OutputFormat::csv;
        if (sub->count("--output") > 0) {
            spec.output_path = outputs[def.name];
        }
    }
    return {spec};
}

inline void write_document(const report::ReportDocument& document, OutputFormat format, std::ostream& out)
{
    if (format == OutputFormat::json) {
        report::write_json(document, out);
    } else {
        report::write_csv(document, out);
    }
}

/// Full CLI behaviour: parse, evaluate, write, and map failures to exit codes.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        const auto parsed = parse_command_line(args, out);
        if (!parsed.spec) {
            return 0;
        }
        const auto& spec = *parsed.spec;
        const auto result = execute(spec);
        if (spec.output_path) {
            std::ofstream file(*spec.output_path, std::ios::binary);
            if (!file) {
                throw InputError("cannot open output file '" + *spec.output_path + "'");
            }
            write_document(result.document, spec.output_format, file);
        } else {
            write_document(result.document, spec.output_format, out);
        }
        if (spec.output_format == OutputFormat::csv) {
            for (const auto& note : result.document.notes) {
                err << "note: " << note << '\n';
            }
        }
        if (result.exit_code == 2) {
            err << "validation failed: relative residual above threshold\n";
        }
        return result.exit_code;
    } catch (const InputError& e) {
        err << "error[input]: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "error[domain]: " << e.what() << '\n';
    } catch (const InfeasibleError& e) {
        err << "error[infeasible]: " << e.what() << '\n';
    } catch (const CapExceededError& e) {
        err << "error[cap]: " << e.what() << '\n';
    } catch (const SweepCapError& e) {
        err << "error[cap]: " << e.what() << '\n';
    } catch (const ConvergenceError& e) {
        err << "error[solver]: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << '\n';
    }
    return 1;
}

} // namespace gentile_lab::cli
