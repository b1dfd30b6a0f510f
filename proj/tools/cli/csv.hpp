#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace itolab::cli {

inline constexpr const char* kCsvColumns =
    "command,preset,param_json,t,x_json,T,n_paths,n_steps,dt,seed,estimate,stderr,extra_json,wall_ms";

// One result row. Optional numeric cells render empty when absent.
struct CsvRow {
    std::string command;
    std::string preset;
    nlohmann::json params = nlohmann::json::object();
    std::optional<double> t;
    std::vector<double> x;
    std::optional<double> T;
    std::size_t n_paths = 0;
    std::optional<std::size_t> n_steps;
    std::optional<double> dt;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    nlohmann::json extra = nlohmann::json::object();
    long long wall_ms = 0;

    std::vector<std::string> cells() const;
    // Every cell except wall_ms, joined as in the file: the part of a row
    // that must reproduce bit-exactly.
    std::string payload() const;
    std::string line() const;
};

// %.17g
std::string format_number(double v);

// JSON text with every floating-point number written as %.17g and
// non-finite numbers as null. Object keys come out sorted.
std::string json_text(const nlohmann::json& j);

// RFC 4180 quoting when the cell contains a comma, quote or line break.
std::string csv_quote(const std::string& cell);

// "# ito-lab v<version> <UTC ISO 8601 timestamp>"
std::string csv_banner();

std::string csv_document(const std::vector<CsvRow>& rows);

} // namespace itolab::cli
