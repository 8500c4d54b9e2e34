// Command line front end: reads a JSON job spec, applies flag overrides,
// validates, runs, and writes the result document.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "infgeo/cli.hpp"

namespace {

using nlohmann::json;

std::optional<std::string> read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<std::vector<double>> parse_components(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (values.empty()) return std::nullopt;
    return values;
}

int report_issues(const std::vector<infgeo::cli::ValidationIssue>& issues) {
    for (const auto& issue : issues)
        std::cerr << "error at " << (issue.pointer.empty() ? "/" : issue.pointer) << ": "
                  << issue.message << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dually flat information geometry toolkit"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    std::string format;
    std::string p_inline, q_inline;
    double tolerance = 0.0, step = 0.0;
    bool validate_only = false;

    for (const std::string& name : infgeo::cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--spec", spec_path, "job spec JSON file ('-' reads stdin)")
            ->required();
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "output format: json or csv");
        sub->add_option("--p", p_inline, "override point p, comma separated reals");
        sub->add_option("--q", q_inline, "override point q, comma separated reals");
        sub->add_option("--tolerance", tolerance, "numeric tolerance override");
        sub->add_option("--step", step, "integration step override");
        sub->add_flag("--validate-only", validate_only, "validate the job and exit");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    auto text = read_input(spec_path);
    if (!text) {
        std::cerr << "error: cannot read job spec '" << spec_path << "'\n";
        return 2;
    }

    // Apply flag overrides onto the raw document, then validate once so
    // every error is reported with its JSON pointer.
    json doc = json::parse(*text, nullptr, false);
    if (doc.is_discarded()) {
        std::cerr << "error at /: not valid JSON\n";
        return 2;
    }
    if (doc.is_object()) {
        if (!doc.contains("command")) doc["command"] = command;
        if (doc.contains("command") && doc["command"].is_string() &&
            doc["command"].get<std::string>() != command) {
            std::cerr << "error at /command: job spec says '"
                      << doc["command"].get<std::string>() << "' but the subcommand is '"
                      << command << "'\n";
            return 2;
        }
        auto override_point = [&doc](const char* key, const std::string& inline_text) {
            if (inline_text.empty()) return true;
            auto values = parse_components(inline_text);
            if (!values) return false;
            doc["arguments"][key] = *values;
            return true;
        };
        if (!override_point("p", p_inline)) {
            std::cerr << "error: --p is not a comma separated list of reals\n";
            return 2;
        }
        if (!override_point("q", q_inline)) {
            std::cerr << "error: --q is not a comma separated list of reals\n";
            return 2;
        }
        if (tolerance > 0.0) doc["arguments"]["tolerance"] = tolerance;
        if (step > 0.0) doc["arguments"]["step"] = step;
        if (!out_path.empty()) doc["output"]["path"] = out_path;
        if (!format.empty()) doc["output"]["format"] = format;
    }

    auto validated = infgeo::cli::validate(doc.dump());
    if (std::holds_alternative<std::vector<infgeo::cli::ValidationIssue>>(validated))
        return report_issues(std::get<std::vector<infgeo::cli::ValidationIssue>>(validated));
    const infgeo::cli::JobSpec& job = std::get<infgeo::cli::JobSpec>(validated);

    if (validate_only) {
        std::cout << "ok\n";
        return 0;
    }

    const infgeo::cli::RunResult result = infgeo::cli::run(job);
    if (result.exit_code != 0 && !result.error_message.empty())
        std::cerr << "error: " << result.error_message << "\n";

    if (!result.document.empty()) {
        if (job.out_path.empty()) {
            std::cout << result.document;
            if (result.document.back() != '\n') std::cout << "\n";
        } else {
            std::ofstream out(job.out_path);
            if (!out) {
                std::cerr << "error: cannot write '" << job.out_path << "'\n";
                return 2;
            }
            out << result.document;
        }
    }
    return result.exit_code;
}
