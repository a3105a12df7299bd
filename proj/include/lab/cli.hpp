#pragma once

// Batch experiment runner: parses a JSON run configuration, validates it
// against the owning operation's preconditions, executes the experiment,
// and writes <output_dir>/<experiment>.csv plus summary.json.  Numeric CSV
// output is deterministic byte-for-byte for a fixed config.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "lab/divergence.hpp"

namespace ergolab {

struct RunConfig {
    std::string experiment;
    std::string system = "golden";
    std::string function;  // filled with the experiment default when omitted
    std::string phi;       // "power:p" | "llog:b" | "composite:s:p"
    std::string sequence;  // "prefix:N" | block literal | generator spec
    std::map<std::string, double> parameters;
    std::string output_dir = "out";
};

struct ValidationIssue {
    std::string key;
    std::string message;
};

std::vector<std::string> known_experiments();

// Full schema validation; either a complete config (defaults filled) or the
// list of issues.  No partial execution happens on invalid input.
std::variant<RunConfig, std::vector<ValidationIssue>> validate_config(const std::string& text);

// Dispatches to the owning module and writes the output files.  Exit status
// semantics: 0 success, 2 validation failure, 3 computation error (the error
// name lands in summary.json).
int run_experiment(const RunConfig& config);

// descriptor parsers shared with tests
MonotoneFunction parse_function(const std::string& descriptor);
OrliczFunction parse_phi(const std::string& descriptor);
std::vector<long long> parse_sequence_times(const std::string& descriptor, long long default_n);

}  // namespace ergolab
