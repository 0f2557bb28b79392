#include "nvlab_cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nvlab/parallel.hpp"
#include "nvlab/random.hpp"

#ifndef NVLAB_GIT_DESCRIBE
#define NVLAB_GIT_DESCRIBE "unknown"
#endif

namespace nvlab::cli {

namespace {

constexpr const char* kHashKey = "config_hash";

std::filesystem::path file_for(const RunConfig& config, const std::string& stem, const char* ext) {
    return config.out / (stem + ext);
}

std::vector<const char*> extensions(OutputFormat format) {
    switch (format) {
        case OutputFormat::kCsv: return {".csv"};
        case OutputFormat::kJson: return {".json"};
        case OutputFormat::kBoth: return {".csv", ".json"};
    }
    return {".csv"};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

OutputSink::OutputSink(const RunConfig& config) : config_(config), hash_(config_hash(config)) {}

std::vector<std::pair<std::string, std::string>> OutputSink::metadata() const {
    auto meta = resolved_settings(config_);
    meta.emplace_back(kHashKey, hash_);
    meta.emplace_back("git_describe", NVLAB_GIT_DESCRIBE);
    meta.emplace_back("rng", std::string(kRngAlgorithm));
    meta.emplace_back("threads", std::to_string(resolve_threads(config_.threads)));
    return meta;
}

void OutputSink::preflight(const std::vector<std::string>& stems) const {
    std::error_code ec;
    std::filesystem::create_directories(config_.out, ec);
    if (ec) throw IoError("cannot create output directory " + config_.out.string() + ": " + ec.message());
    if (config_.force) return;
    for (const auto& stem : stems) {
        for (const char* ext : {".csv", ".json"}) {
            const auto file = file_for(config_, stem, ext);
            if (!std::filesystem::exists(file)) continue;
            const std::string previous = stored_hash(file);
            if (previous != hash_) {
                throw IoError(file.string() + " was produced by a different configuration (hash " +
                              (previous.empty() ? "missing" : previous) + ", now " + hash_ +
                              "); use --force to overwrite");
            }
        }
    }
}

void OutputSink::write(const std::string& stem, const Table& table, nlohmann::ordered_json body) const {
    const auto meta = metadata();
    // After --force, a sibling in the other format may describe an older
    // configuration; remove it so the directory stays consistent.
    const auto written = extensions(config_.format);
    for (const char* ext : {".csv", ".json"}) {
        if (std::find_if(written.begin(), written.end(), [ext](const char* w) { return std::string(w) == ext; }) !=
            written.end()) {
            continue;
        }
        const auto sibling = file_for(config_, stem, ext);
        if (std::filesystem::exists(sibling) && stored_hash(sibling) != hash_) std::filesystem::remove(sibling);
    }
    for (const char* ext : extensions(config_.format)) {
        std::ostringstream os;
        if (std::string(ext) == ".csv") {
            for (const auto& [key, value] : meta) os << "# " << key << '=' << value << '\n';
            for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
            os << '\n';
            for (const auto& row : table.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
                os << '\n';
            }
        } else {
            nlohmann::ordered_json doc;
            nlohmann::ordered_json m = nlohmann::ordered_json::object();
            for (const auto& [key, value] : meta) m[key] = value;
            doc["metadata"] = std::move(m);
            for (auto& [key, value] : body.items()) doc[key] = value;
            os << doc.dump(2) << '\n';
        }
        write_file(file_for(config_, stem, ext), os.str());
    }
}

std::string stored_hash(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    if (file.extension() == ".json") {
        try {
            const auto doc = nlohmann::json::parse(in);
            return doc.at("metadata").at(kHashKey).get<std::string>();
        } catch (const nlohmann::json::exception&) {
            return {};
        }
    }
    const std::string prefix = std::string("# ") + kHashKey + "=";
    std::string line;
    while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    }
    return {};
}

std::string csv_body(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::string body;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) continue;
        body += line;
        body += '\n';
    }
    return body;
}

}  // namespace nvlab::cli
