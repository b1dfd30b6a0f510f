#include "cli/run.hpp"

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"

#include <itolab/error.hpp>

#include <json.hpp>

#include <fstream>

namespace itolab::cli {

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw ConfigError("cannot open output file " + path);
    }
    file << text;
    file.flush();
    if (!file) {
        throw ConfigError("failed writing output file " + path);
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_arguments(args, out);
        if (!cfg) {
            return 0;
        }
        const CommandResult result = execute(*cfg);
        const std::string path = cfg->output_path.empty() ? "itolab-" + cfg->command + ".csv" : cfg->output_path;
        write_file(path, csv_document({result.row}));
        for (const auto& w : result.warnings) {
            err << "warning: " << w << '\n';
        }
        out << result.summary << '\n';
        return 0;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "configuration error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace itolab::cli
