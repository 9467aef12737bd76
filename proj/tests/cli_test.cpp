#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gentile_lab/cli.hpp"

namespace cli = gentile_lab::cli;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_in_process(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell; stderr is discarded.
Outcome run_binary(const std::string& args)
{
    const std::string command = std::string(GENTILE_LAB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) {
        return {-1, "", ""};
    }
    std::string out;
    char buffer[4096];
    std::size_t read = 0;
    while ((read = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        out.append(buffer, read);
    }
    const int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\n') {
            row.push_back(field);
            field.clear();
            rows.push_back(row);
            row.clear();
        } else {
            field += c;
        }
    }
    return rows;
}

} // namespace

TEST(Cli, CountRow)
{
    const auto result = run_in_process({"count", "--n", "100"});
    ASSERT_EQ(result.code, 0) << result.err;
    const auto rows = parse_csv(result.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "s", "max_parts", "max_mult", "exact", "log"}));
    EXPECT_EQ(rows[1][0], "100");
    EXPECT_EQ(rows[1][4], "190569292");
    EXPECT_NEAR(std::stod(rows[1][5]), std::log(190569292.0), 1e-10);
}

TEST(Cli, ExactCountsSerialiseAsDecimalStrings)
{
    const auto result = run_in_process({"count", "--n", "1000", "--format", "json"});
    ASSERT_EQ(result.code, 0) << result.err;
    const auto doc = nlohmann::json::parse(result.out);
    EXPECT_EQ(doc["rows"][0]["exact"], "24061467864032622473692149727991");
}

TEST(Cli, EquivalenceReport)
{
    const auto result = run_in_process({"equiv", "--n", "400", "--cap-n", "40", "--s", "1", "--route", "exact"});
    ASSERT_EQ(result.code, 0) << result.err;
    const auto rows = parse_csv(result.out);
    ASSERT_EQ(rows.size(), 2u);
    const auto& header = rows[0];
    const auto column = std::find(header.begin(), header.end(), "relative_residual") - header.begin();
    ASSERT_LT(static_cast<std::size_t>(column), header.size());
    EXPECT_LT(std::stod(rows[1][column]), 0.05);
}

TEST(Cli, ValidateExitCodes)
{
    EXPECT_EQ(run_in_process({"validate", "--n", "400", "--cap-n", "40"}).code, 0);
    const auto failing = run_in_process({"validate", "--n", "400", "--cap-n", "20", "--threshold", "0.05"});
    EXPECT_EQ(failing.code, 2);
    EXPECT_NE(failing.err.find("validation failed"), std::string::npos);
    const auto rows = parse_csv(failing.out);
    EXPECT_EQ(rows[1].back(), "false");
}

TEST(Cli, ErrorPrefixes)
{
    const auto domain = run_in_process({"asympt", "--formula", "hr", "--n", "0"});
    EXPECT_EQ(domain.code, 1);
    EXPECT_EQ(domain.err.rfind("error[domain]:", 0), 0u) << domain.err;

    const auto input = run_in_process({"count", "--n", "5", "--bogus", "1"});
    EXPECT_EQ(input.code, 1);
    EXPECT_EQ(input.err.rfind("error[input]:", 0), 0u) << input.err;

    const auto unknown = run_in_process({"frobnicate"});
    EXPECT_EQ(unknown.code, 1);
    EXPECT_EQ(unknown.err.rfind("error[input]:", 0), 0u);

    const auto sweep = run_in_process({"count", "--n", "1:1000:1", "--max-parts", "1:1000:1"});
    EXPECT_EQ(sweep.code, 1);
    EXPECT_EQ(sweep.err.rfind("error[cap]:", 0), 0u) << sweep.err;

    const auto formula = run_in_process({"asympt", "--formula", "nope", "--n", "5"});
    EXPECT_EQ(formula.code, 1);
    EXPECT_EQ(formula.err.rfind("error[input]:", 0), 0u) << formula.err;
}

TEST(Cli, FeasibilityLimitFromEnvironment)
{
    ::setenv("GENTILE_LAB_MAX_DP_N", "50", 1);
    const auto result = run_in_process({"count", "--n", "60"});
    ::unsetenv("GENTILE_LAB_MAX_DP_N");
    EXPECT_EQ(result.code, 1);
    EXPECT_EQ(result.err.rfind("error[infeasible]:", 0), 0u) << result.err;
    EXPECT_EQ(run_in_process({"count", "--n", "60"}).code, 0);
}

TEST(Cli, RangesAndLists)
{
    const auto canonical = run_in_process({"thermo", "--mode", "canonical", "--N", "10:50:10", "--T", "10"});
    ASSERT_EQ(canonical.code, 0) << canonical.err;
    const auto rows = parse_csv(canonical.out);
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][2], std::to_string(10 * i));
        EXPECT_NEAR(std::stod(rows[i][9]), gentile_lab::thermo::canonical_energy(10 * i, 10.0), 1e-9 * std::stod(rows[i][9]));
    }

    const auto equiv = run_in_process({"equiv", "--n", "400,900", "--cap-n", "auto"});
    ASSERT_EQ(equiv.code, 0) << equiv.err;
    const auto equiv_rows = parse_csv(equiv.out);
    ASSERT_EQ(equiv_rows.size(), 3u);
    EXPECT_EQ(equiv_rows[1][1], "40");
    EXPECT_EQ(equiv_rows[2][1], "60");

    EXPECT_EQ(run_in_process({"count", "--n", "5:1:1"}).code, 1);
    EXPECT_EQ(run_in_process({"count", "--n", "1:5:0"}).code, 1);
    EXPECT_EQ(run_in_process({"count", "--n", "1,,2"}).code, 1);
}

TEST(Cli, SweepOrderFollowsFlagOrder)
{
    // --max-parts is declared after --n, so it varies fastest whatever the argv order.
    const auto result = run_in_process({"count", "--max-parts", "1,2", "--n", "5,6"});
    ASSERT_EQ(result.code, 0) << result.err;
    const auto rows = parse_csv(result.out);
    ASSERT_EQ(rows.size(), 5u);
    const std::vector<std::pair<std::string, std::string>> expected{{"5", "1"}, {"5", "2"}, {"6", "1"}, {"6", "2"}};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(rows[i + 1][0], expected[i].first);
        EXPECT_EQ(rows[i + 1][2], expected[i].second);
    }
}

TEST(Cli, CsvAndJsonCarryIdenticalValues)
{
    const std::vector<std::vector<std::string>> invocations{
        {"count", "--n", "0:40:8", "--max-mult", "2"},
        {"asympt", "--formula", "fin", "--n", "100,400", "--N", "10:30:10"},
        {"asympt", "--formula", "igamma", "--a", "0.5", "--x", "0.5,50"},
        {"thermo", "--mode", "grand", "--N", "50", "--T", "10", "--M", "3,inf"},
        {"thermo", "--mode", "delta-gentile", "--N", "50", "--T", "10", "--M", "20,40"},
        {"equiv", "--n", "400", "--cap-n", "20,auto", "--best-m"},
    };
    for (auto args : invocations) {
        const auto csv = run_in_process(args);
        args.insert(args.end(), {"--format", "json"});
        const auto json = run_in_process(args);
        ASSERT_EQ(csv.code, 0) << csv.err;
        ASSERT_EQ(json.code, 0) << json.err;
        const auto rows = parse_csv(csv.out);
        const auto doc = nlohmann::json::parse(json.out);
        ASSERT_EQ(doc["rows"].size() + 1, rows.size());
        const auto& header = rows[0];
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& object = doc["rows"][r - 1];
            ASSERT_EQ(object.size(), header.size());
            for (std::size_t c = 0; c < header.size(); ++c) {
                const auto& value = object[header[c]];
                const auto& text = rows[r][c];
                if (value.is_null()) {
                    EXPECT_EQ(text, "") << header[c];
                } else if (value.is_boolean()) {
                    EXPECT_EQ(text, value.get<bool>() ? "true" : "false");
                } else if (value.is_number()) {
                    EXPECT_EQ(std::stod(text), value.get<double>()) << header[c];
                } else {
                    EXPECT_EQ(text, value.get<std::string>()) << header[c];
                }
            }
        }
    }
}

TEST(Cli, JsonDocumentShape)
{
    const auto result = run_in_process({"equiv", "--n", "400", "--cap-n", "20", "--paper-literal-eq5", "--format", "json"});
    ASSERT_EQ(result.code, 0) << result.err;
    const auto doc = nlohmann::json::parse(result.out);
    EXPECT_EQ(doc["metadata"]["tool"], "gentile_lab");
    EXPECT_EQ(doc["metadata"]["version"], cli::kVersion);
    EXPECT_EQ(doc["metadata"]["subcommand"], "equiv");
    EXPECT_EQ(doc["metadata"]["parameters"]["n"], "400");
    EXPECT_EQ(doc["metadata"]["parameters"]["paper-literal-eq5"], "true");
    ASSERT_EQ(doc["notes"].size(), 1u);
    EXPECT_EQ(doc["notes"][0], "n=400 N=20: paper-literal-eq5 used");
}

TEST(Cli, NotesGoToStandardErrorForCsv)
{
    const auto result = run_in_process({"equiv", "--n", "400", "--cap-n", "400"});
    ASSERT_EQ(result.code, 0);
    EXPECT_NE(result.err.find("note: n=400 N=400: M clamped"), std::string::npos);
    EXPECT_EQ(result.out.find("note"), std::string::npos);
}

TEST(Cli, OutputFile)
{
    const auto path = std::filesystem::temp_directory_path() / "gentile_lab_cli_test.csv";
    const auto result = run_in_process({"count", "--n", "5", "--output", path.string()});
    ASSERT_EQ(result.code, 0);
    EXPECT_TRUE(result.out.empty());
    std::ifstream file(path, std::ios::binary);
    std::stringstream contents;
    contents << file.rdbuf();
    EXPECT_EQ(contents.str(), "n,s,max_parts,max_mult,exact,log\n5,1,,,7,1.94591014906\n");
    std::filesystem::remove(path);
}

TEST(Cli, HelpAndVersion)
{
    const auto help = run_in_process({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("equiv"), std::string::npos);
    const auto version = run_in_process({"--version"});
    EXPECT_EQ(version.code, 0);
    EXPECT_EQ(version.out, std::string(cli::kVersion) + "\n");
}

TEST(Cli, CsvEscaping)
{
    EXPECT_EQ(gentile_lab::report::csv_escape("plain"), "plain");
    EXPECT_EQ(gentile_lab::report::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(gentile_lab::report::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(gentile_lab::report::format_real(0.1 + 0.2), "0.3");
    EXPECT_EQ(gentile_lab::report::format_real(-INFINITY), "-inf");
}

TEST(CliBinary, ByteIdenticalAcrossRuns)
{
    const std::vector<std::string> matrix{
        "count --n 0:60:6 --max-parts 3,5",
        "count --n 10:30:10 --max-parts 2:4:1 --format json",
        "asympt --formula micro --n 100:1000:300 --s 1,2",
        "thermo --mode grand --N 20,50 --T 2:10:4 --M 1,3,inf",
        "thermo --mode canonical --N 10:50:10 --T 10",
        "equiv --n 400,900 --cap-n auto --format json",
        "validate --n 400 --cap-n 20",
    };
    for (const auto& args : matrix) {
        const auto first = run_binary(args);
        const auto second = run_binary(args);
        EXPECT_EQ(first.code, second.code) << args;
        EXPECT_EQ(first.out, second.out) << args;
        EXPECT_EQ(first.out, run_in_process([&] {
                                 std::vector<std::string> split;
                                 std::istringstream stream(args);
                                 for (std::string word; stream >> word;) {
                                     split.push_back(word);
                                 }
                                 return split;
                             }())
                                 .out)
            << args;
    }
}

TEST(CliBinary, ExitCodeMatrix)
{
    const std::vector<std::pair<std::string, int>> matrix{
        {"count --n 100", 0},
        {"count --n -1", 1},
        {"count --n 5 --max-parts 0", 1},
        {"count --n 5:1:1", 1},
        {"count --n 5 --unknown-flag 3", 1},
        {"asympt --formula hr --n 0", 1},
        {"asympt --formula igamma --a 0.5 --x 50", 0},
        {"thermo --mode canonical --N 10:50:10 --T 10", 0},
        {"thermo --mode occupation --eps 0 --mu 0 --T 1", 1},
        {"thermo --mode occupation --eps 0 --mu 0 --T 1 --M 4", 0},
        {"equiv --n 400 --cap-n 20", 0},
        {"validate --n 400 --cap-n 40", 0},
        {"validate --n 400 --cap-n 20", 2},
        {"", 1},
    };
    for (const auto& [args, code] : matrix) {
        EXPECT_EQ(run_binary(args).code, code) << args;
    }
}
