// Configuration-driven experiment runners behind the command-line front end.
//
// Config files are flat "key = value" text ('#' starts a comment). Unknown
// keys are rejected. Every run writes the fully resolved config (defaults
// included) beside its outputs. CSV output uses a header row, comma
// separator, '.' decimal and 12 significant digits.

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace nonmarkov::harness {

// Usage / configuration problem: exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure during a run: exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_file(const std::filesystem::path& path);

// Exit codes: 0 success, 3 success with flagged windows / recorded cell
// failures. ConfigError and NumericError map to 1 and 2 in the front end.
int run_dephasing(const KeyValues& config, const std::filesystem::path& out_dir);
int run_gaussian_sweep(const KeyValues& config, const std::filesystem::path& out_dir,
                       int jobs, bool emit_plots);
int run_divisibility(const KeyValues& config, const std::filesystem::path& out_dir);

std::string format_csv_value(double v);

}  // namespace nonmarkov::harness
