#pragma once

// Tabular report documents and their CSV / JSON encodings. Numbers are written
// with 12 significant digits through std::to_chars, so output never depends on
// the process locale.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gentile_lab::report {

inline constexpr int kSignificantDigits = 12;

/// A decimal integer of arbitrary size, serialized as a string.
struct Decimal {
    std::string digits;
};

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string, Decimal>;

inline std::string format_real(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto [end, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, kSignificantDigits);
    if (ec != std::errc{}) {
        return "nan";
    }
    return {buffer, end};
}

/// The double a formatted cell reads back as; CSV and JSON share it.
inline double rounded_real(double value)
{
    const auto text = format_real(value);
    double parsed = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), parsed);
    return parsed;
}

inline std::string format_cell(const Cell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(const Decimal& v) const { return v.digits; }
    };
    return std::visit(Visitor{}, cell);
}

inline nlohmann::ordered_json to_json(const Cell& cell)
{
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(double v) const
        {
            if (!std::isfinite(v)) {
                return format_real(v);
            }
            return rounded_real(v);
        }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
        nlohmann::ordered_json operator()(const Decimal& v) const { return v.digits; }
    };
    return std::visit(Visitor{}, cell);
}

struct ReportDocument {
    std::string tool = "gentile_lab";
    std::string version;
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> parameters; // flag echo, in flag order
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;

    void add_note(const std::string& note)
    {
        for (const auto& existing : notes) {
            if (existing == note) {
                return;
            }
        }
        notes.push_back(note);
    }
};

inline std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline void write_csv(const ReportDocument& document, std::ostream& out)
{
    for (std::size_t i = 0; i < document.columns.size(); ++i) {
        out << (i ? "," : "") << csv_escape(document.columns[i]);
    }
    out << '\n';
    for (const auto& row : document.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_escape(format_cell(row[i]));
        }
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(const ReportDocument& document)
{
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    for (const auto& [name, value] : document.parameters) {
        parameters[name] = value;
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : document.rows) {
        nlohmann::ordered_json object = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            object[document.columns[i]] = to_json(row[i]);
        }
        rows.push_back(std::move(object));
    }
    nlohmann::ordered_json root;
    root["metadata"] = {{"tool", document.tool},
                        {"version", document.version},
                        {"subcommand", document.subcommand},
                        {"parameters", parameters}};
    root["rows"] = std::move(rows);
    root["notes"] = document.notes;
    return root;
}

inline void write_json(const ReportDocument& document, std::ostream& out)
{
    out << to_json(document).dump(2) << '\n';
}

} // namespace gentile_lab::report
