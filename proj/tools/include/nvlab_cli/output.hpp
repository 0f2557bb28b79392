#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nvlab_cli/config.hpp"

namespace nvlab::cli {

/// Shortest decimal that round-trips, so equal doubles print equal bytes.
std::string format_double(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Writes `<stem>.csv` and/or `<stem>.json` under config.out. CSV files start
/// with a "# key=value" metadata block followed by the header; JSON files hold
/// {"metadata": {...}, <body>}. Both embed the config hash.
class OutputSink {
public:
    explicit OutputSink(const RunConfig& config);

    /// Refuses (IoError) when an existing output for any stem carries a
    /// different config hash, unless --force. Call before running the study.
    void preflight(const std::vector<std::string>& stems) const;

    void write(const std::string& stem, const Table& table, nlohmann::ordered_json body) const;

    [[nodiscard]] const std::string& hash() const { return hash_; }
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> metadata() const;

private:
    const RunConfig& config_;
    std::string hash_;
};

/// Config hash stored in an existing output file, empty if none is found.
std::string stored_hash(const std::filesystem::path& file);

/// Lines of a CSV file after its metadata block.
std::string csv_body(const std::filesystem::path& file);

}  // namespace nvlab::cli
