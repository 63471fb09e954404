#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qlab::cli {

enum class ExitCode : int {
    Ok = 0,
    ToleranceFailure = 1,
    ConfigError = 2,
    NumericalFailure = 3,
};

struct ExperimentConfig {
    std::string kind;  // simulate | moment | duality-check | det-scan | invert |
                       // tw-convergence | polymer | identity-suite
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "csv";  // csv | json | plot
    std::map<std::string, double> num;
    std::map<std::string, std::string> str;
    std::map<std::string, std::vector<double>> vec;

    double get(const std::string& key, double fallback) const;
    std::vector<double> get_vec(const std::string& key, std::vector<double> fallback) const;
};

/// Parses and validates a JSON config; throws std::invalid_argument with the
/// offending field path on schema violations.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> header;  // provenance comments
    bool tolerance_ok = true;
    std::string summary;
};

/// Runs the experiment and writes its outputs atomically under out_dir.
/// Returns the summary report; numerical failures surface as exceptions.
Report run_experiment(const ExperimentConfig& config);

/// Writes the report (deterministic column order, 17 significant digits,
/// seed echoed as a header comment) as csv / json / gnuplot-style plot text.
std::string render_report(const Report& report, const std::string& format);
void emit_report(const Report& report, const ExperimentConfig& config,
                 const std::string& filename_stem);

/// Atomic write: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

int cli_main(int argc, char** argv);

}  // namespace qlab::cli
