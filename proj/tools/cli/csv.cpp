#include "cli/csv.hpp"

#include <itolab/itolab.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>

namespace itolab::cli {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_text(const nlohmann::json& j) {
    switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
        const double v = j.get<double>();
        return std::isfinite(v) ? format_number(v) : "null";
    }
    case nlohmann::json::value_t::array: {
        std::string out = "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += (i ? "," : "") + json_text(j[i]);
        }
        return out + "]";
    }
    case nlohmann::json::value_t::object: {
        std::string out = "{";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            out += (first ? "" : ",") + nlohmann::json(key).dump() + ":" + json_text(value);
            first = false;
        }
        return out + "}";
    }
    default:
        return j.dump();
    }
}

std::string csv_quote(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) {
        return cell;
    }
    std::string out = "\"";
    for (char c : cell) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::vector<std::string> CsvRow::cells() const {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    return {command,
            preset,
            json_text(params),
            opt(t),
            json_text(nlohmann::json(x)),
            opt(T),
            std::to_string(n_paths),
            n_steps ? std::to_string(*n_steps) : std::string(),
            opt(dt),
            std::to_string(seed),
            format_number(estimate),
            format_number(std_error),
            json_text(extra),
            std::to_string(wall_ms)};
}

namespace {

std::string join_cells(const std::vector<std::string>& cells, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        out += (i ? "," : "") + csv_quote(cells[i]);
    }
    return out;
}

} // namespace

std::string CsvRow::payload() const {
    const auto c = cells();
    return join_cells(c, c.size() - 1);
}

std::string CsvRow::line() const {
    const auto c = cells();
    return join_cells(c, c.size());
}

std::string csv_banner() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return std::string("# ito-lab v") + kVersion + " " + stamp;
}

std::string csv_document(const std::vector<CsvRow>& rows) {
    std::string out = csv_banner() + "\n" + kCsvColumns + "\n";
    for (const auto& r : rows) {
        out += r.line() + "\n";
    }
    return out;
}

} // namespace itolab::cli
