#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "winr/model.hpp"

namespace winr {

// Machine-readable run summary written next to each command's outputs.
// Serialized as versioned JSON (schema_version below).
struct RunReport {
    static constexpr int kSchemaVersion = 1;

    std::string command;
    std::map<std::string, std::string> resolved_config;
    std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
    std::string arch_summary;
    std::int64_t parameters = 0;
    std::int64_t raw_values = 0;  // samples x channels
    double compression_ratio = 0.0;
    double nmse_mean_percent = 0.0;
    double nmse_min_percent = 0.0;
    double nmse_max_percent = 0.0;
    double nmse_stddev_percent = 0.0;
    std::vector<double> nmse_per_channel;
    std::map<std::string, double> spectral;  // named spectral findings
    std::vector<std::string> artifacts;      // paths written by the command
    double wall_time_s = 0.0;

    void set_compression(std::int64_t raw, std::int64_t params);
};

void save_report(const RunReport& r, const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

/// FNV-1a 64-bit content hash, hex-encoded; used for input provenance.
std::string fnv1a64_file(const std::filesystem::path& path);

}  // namespace winr
