#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvlab/flows.hpp"

namespace nvlab::cli {

enum class OutputFormat { kCsv, kJson, kBoth };

/// Fully resolved settings of one invocation. Every field has a default;
/// config files and flags only override.
struct RunConfig {
    std::string command;
    std::string problem = "heisenberg";
    std::string scheme = "nv";
    std::uint64_t seed = 42;
    int paths = 10000;
    std::vector<int> nladder{8, 16, 32, 64, 128, 256, 512};
    int p = 1;
    int refine = 64;
    int batches = 20;
    FlowSettings flows;

    // limit-law
    int N = 256;
    int nfine = 4096;

    // source-term
    std::vector<int> source_N{4};
    int j = 2;
    int m = 1;
    double t = 1.0;
    double T = 1.0;
    int substeps = 64;

    // mlmc
    std::string payoff = "coord1";
    int levels = 6;
    int paths_per_level = 10000;
    int base_steps = 1;
    int beta_min_level = 2;

    // flow-check
    int trials = 1000;

    // Not part of the hash.
    int threads = 0;
    std::filesystem::path out = "out";
    OutputFormat format = OutputFormat::kCsv;
    bool force = false;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class NumericalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// key=value lines, '#' or ';' comments, "[section]" prefixes following keys
/// with "section.". Throws IoError if unreadable, UsageError if malformed.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies recognised keys to `config`; unknown keys are a UsageError.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& values);

/// Sorted key=value lines of the settings that influence results of `config.command`.
std::vector<std::pair<std::string, std::string>> resolved_settings(const RunConfig& config);

/// FNV-1a 64 over resolved_settings, rendered as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::string format_name(OutputFormat format);
OutputFormat parse_format(const std::string& name);

}  // namespace nvlab::cli
