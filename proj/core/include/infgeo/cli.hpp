#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infgeo/check.hpp"
#include "infgeo/dually_flat.hpp"
#include "infgeo/families.hpp"

namespace infgeo::cli {

enum class Command { divergence, legendre, metric, geodesic, distance, project, check };
enum class OutputFormat { json, csv };

const std::vector<std::string>& command_names();
std::optional<Command> parse_command(const std::string& name);

/// Submanifold description as it appears in job specs: chart name,
/// offset, basis given as dim rows of length m, optional chart-space box.
struct SubmanifoldSpec {
    Chart chart = Chart::dual;
    Vector offset;
    Matrix basis;
    std::optional<Vector> box_lo, box_hi;
};

struct JobArguments {
    std::optional<Vector> p, q;        // divergence / distance
    std::optional<Vector> point;       // legendre / metric / geodesic / project
    std::optional<Vector> velocity;    // geodesic
    std::optional<double> t_end;       // geodesic
    std::optional<double> step;        // geodesic / distance
    std::optional<double> tolerance;   // numeric tolerance override
    std::string legendre_direction = "to_dual";
    std::optional<SubmanifoldSpec> submanifold;  // project
    bool dual_projection = false;                // project
    std::optional<std::uint64_t> seed;           // check
    std::optional<int> samples;                  // check
    std::vector<std::string> suites;             // check
};

struct JobSpec {
    Command command = Command::divergence;
    FamilySpec manifold;
    JobArguments args;
    std::string out_path;  // empty: stdout
    OutputFormat format = OutputFormat::json;
};

/// One schema violation, addressed by a JSON pointer into the job text.
struct ValidationIssue {
    std::string pointer;
    std::string message;
};

/// Full validation of a job document: parses the JSON, checks the schema
/// and cross-field consistency (dimensions, per-command arguments) and
/// returns either a ready-to-run JobSpec or the aggregated issue list.
/// Never partially executes a job.
std::variant<JobSpec, std::vector<ValidationIssue>> validate(const std::string& job_text);

/// Exit codes: 0 success, 2 validation error, 3 numerical failure.
struct RunResult {
    int exit_code = 0;
    std::string document;       // result document (JSON or CSV)
    std::string error_message;  // set when exit_code != 0
};

/// Executes a validated job and renders the result document. JSON output
/// uses fixed field order and 17-significant-digit floats, so identical
/// jobs produce byte-identical documents; CSV uses shortest round-trip
/// decimals with a header row.
RunResult run(const JobSpec& job);

/// Checks a JSON result document against the published output schema for
/// the command; returns issues (empty means valid). Used by tests and the
/// round-trip invariant.
std::vector<ValidationIssue> validate_result_document(Command command,
                                                      const std::string& document);

}  // namespace infgeo::cli
