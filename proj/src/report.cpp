#include "winr/report.hpp"

#include <fstream>

#include "json.hpp"

namespace winr {

void RunReport::set_compression(std::int64_t raw, std::int64_t params) {
    if (params <= 0) throw InvalidInput("RunReport: parameter count must be positive");
    raw_values = raw;
    parameters = params;
    compression_ratio = static_cast<double>(raw) / static_cast<double>(params);
}

void save_report(const RunReport& r, const std::filesystem::path& path) {
    nlohmann::json j{
        {"schema_version", RunReport::kSchemaVersion},
        {"command", r.command},
        {"resolved_config", r.resolved_config},
        {"input_hashes", r.input_hashes},
        {"arch", r.arch_summary},
        {"parameters", r.parameters},
        {"raw_values", r.raw_values},
        {"compression_ratio", r.compression_ratio},
        {"nmse_mean_percent", r.nmse_mean_percent},
        {"nmse_min_percent", r.nmse_min_percent},
        {"nmse_max_percent", r.nmse_max_percent},
        {"nmse_stddev_percent", r.nmse_stddev_percent},
        {"nmse_per_channel", r.nmse_per_channel},
        {"spectral", r.spectral},
        {"artifacts", r.artifacts},
        {"wall_time_s", r.wall_time_s},
    };
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write report '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

RunReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad report '" + path.string() + "': " + e.what());
    }
    RunReport r;
    try {
        if (j.at("schema_version").get<int>() != RunReport::kSchemaVersion)
            throw ParseError("unsupported report schema_version");
        r.command = j.at("command").get<std::string>();
        r.resolved_config = j.value("resolved_config", std::map<std::string, std::string>{});
        r.input_hashes = j.value("input_hashes", std::map<std::string, std::string>{});
        r.arch_summary = j.value("arch", std::string{});
        r.parameters = j.value("parameters", std::int64_t{0});
        r.raw_values = j.value("raw_values", std::int64_t{0});
        r.compression_ratio = j.value("compression_ratio", 0.0);
        r.nmse_mean_percent = j.value("nmse_mean_percent", 0.0);
        r.nmse_min_percent = j.value("nmse_min_percent", 0.0);
        r.nmse_max_percent = j.value("nmse_max_percent", 0.0);
        r.nmse_stddev_percent = j.value("nmse_stddev_percent", 0.0);
        r.nmse_per_channel = j.value("nmse_per_channel", std::vector<double>{});
        r.spectral = j.value("spectral", std::map<std::string, double>{});
        r.artifacts = j.value("artifacts", std::vector<std::string>{});
        r.wall_time_s = j.value("wall_time_s", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("report '" + path.string() + "' missing field: " + e.what());
    }
    return r;
}

std::string fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot hash missing file '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace winr
