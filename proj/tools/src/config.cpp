#include "nvlab_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "nvlab_cli/output.hpp"

namespace nvlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw UsageError("bad value '" + text + "' for config key " + key);
    return value;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
    if (out.empty()) throw UsageError("empty list for config key " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw UsageError("bad boolean '" + text + "' for config key " + key);
}

std::string join(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::map<std::string, std::string> values;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw UsageError("unterminated section at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value at line " + std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (!section.empty()) key = section + "." + key;
        values[key] = value;
    }
    return values;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& values) {
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto integer = [](int& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = parse_number<int>(k, v); };
    };
    auto real = [](double& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = parse_number<double>(k, v); };
    };
    auto text = [](std::string& field) -> Setter {
        return [&field](const std::string&, const std::string& v) { field = v; };
    };
    const std::map<std::string, Setter> setters{
        {"problem", text(c.problem)},
        {"scheme", text(c.scheme)},
        {"seed", [&c](const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"paths", integer(c.paths)},
        {"nladder", [&c](const std::string& k, const std::string& v) { c.nladder = parse_int_list(k, v); }},
        {"p", integer(c.p)},
        {"refine", integer(c.refine)},
        {"batches", integer(c.batches)},
        {"flows.delta_max", real(c.flows.delta_max)},
        {"flows.substeps_min", integer(c.flows.substeps_min)},
        {"N", [&c](const std::string& k, const std::string& v) {
             c.source_N = parse_int_list(k, v);
             c.N = c.source_N.front();
         }},
        {"nfine", integer(c.nfine)},
        {"j", integer(c.j)},
        {"m", integer(c.m)},
        {"t", real(c.t)},
        {"T", real(c.T)},
        {"substeps", integer(c.substeps)},
        {"payoff", text(c.payoff)},
        {"levels", integer(c.levels)},
        {"paths_per_level", integer(c.paths_per_level)},
        {"base_steps", integer(c.base_steps)},
        {"beta_min_level", integer(c.beta_min_level)},
        {"trials", integer(c.trials)},
        {"threads", integer(c.threads)},
        {"out", [&c](const std::string&, const std::string& v) { c.out = v; }},
        {"format", [&c](const std::string&, const std::string& v) { c.format = parse_format(v); }},
        {"force", [&c](const std::string& k, const std::string& v) { c.force = parse_bool(k, v); }},
    };
    for (const auto& [key, value] : values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
        it->second(key, value);
    }
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> s{{"command", c.command}, {"seed", std::to_string(c.seed)}};
    auto add = [&s](std::string key, std::string value) { s.emplace_back(std::move(key), std::move(value)); };
    const std::string& cmd = c.command;
    if (cmd == "convergence" || cmd == "limit-law" || cmd == "mlmc" || cmd == "flow-check") {
        add("problem", c.problem);
        add("flows.delta_max", format_double(c.flows.delta_max));
        add("flows.substeps_min", std::to_string(c.flows.substeps_min));
    }
    if (cmd == "convergence") {
        add("scheme", c.scheme);
        add("paths", std::to_string(c.paths));
        add("nladder", join(c.nladder));
        add("p", std::to_string(c.p));
        add("refine", std::to_string(c.refine));
        add("batches", std::to_string(c.batches));
    } else if (cmd == "limit-law") {
        add("paths", std::to_string(c.paths));
        add("N", std::to_string(c.N));
        add("nfine", std::to_string(c.nfine));
        add("refine", std::to_string(c.refine));
    } else if (cmd == "source-term") {
        add("paths", std::to_string(c.paths));
        add("N", join(c.source_N));
        add("j", std::to_string(c.j));
        add("m", std::to_string(c.m));
        add("t", format_double(c.t));
        add("T", format_double(c.T));
        add("substeps", std::to_string(c.substeps));
    } else if (cmd == "mlmc") {
        add("payoff", c.payoff);
        add("levels", std::to_string(c.levels));
        add("paths_per_level", std::to_string(c.paths_per_level));
        add("base_steps", std::to_string(c.base_steps));
        add("beta_min_level", std::to_string(c.beta_min_level));
    } else if (cmd == "flow-check") {
        add("trials", std::to_string(c.trials));
    }
    std::sort(s.begin(), s.end());
    return s;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [key, value] : resolved_settings(config)) {
        for (unsigned char ch : key + "=" + value + "\n") {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_name(OutputFormat format) {
    switch (format) {
        case OutputFormat::kCsv: return "csv";
        case OutputFormat::kJson: return "json";
        case OutputFormat::kBoth: return "both";
    }
    return "csv";
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::kCsv;
    if (name == "json") return OutputFormat::kJson;
    if (name == "both") return OutputFormat::kBoth;
    throw UsageError("format must be csv, json or both");
}

}  // namespace nvlab::cli
