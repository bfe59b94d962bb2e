#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "winr/common.hpp"

namespace winr {

// Sampling geometry of a capture. sample_rate_hz is derived, never stored
// separately, so the invariant rate = f0 * spc holds by construction.
struct SamplingSpec {
    double system_freq_hz = 60.0;
    int samples_per_cycle = 128;

    double sample_rate_hz() const { return system_freq_hz * samples_per_cycle; }
    void validate() const;
    bool operator==(const SamplingSpec&) const = default;
};

enum class SignalUnit { Volts, Amperes };

std::string to_string(SignalUnit u);
SignalUnit unit_from_string(const std::string& s);

// One sampled channel. Immutable by convention after construction.
struct Waveform {
    std::vector<double> samples;
    SamplingSpec spec;
    std::string label = "x";
    SignalUnit unit = SignalUnit::Volts;

    std::size_t size() const { return samples.size(); }
    void validate() const;
};

// Channels sharing one time base. All channels must agree in length and spec.
struct WaveformSet {
    std::vector<Waveform> channels;

    std::size_t channel_count() const { return channels.size(); }
    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }
    const SamplingSpec& spec() const;
    std::vector<std::string> labels() const;
    void validate() const;
};

// Normalized time grid on [-1, 1], the network input domain.
struct TimeGrid {
    std::vector<double> t;

    std::size_t size() const { return t.size(); }
    double operator[](std::size_t k) const { return t[k]; }
};

/// t_k = -1 + 2k/(n-1); requires n >= 2.
TimeGrid normalize_time(std::size_t n_samples);

/// Capture minus the periodic extension of the mean pre-event cycle.
Waveform differential_waveform(const Waveform& capture, int pre_event_cycles);

/// Energy-normalized MSE in percent: 100 * sum((raw-recon)^2) / sum(raw^2).
double nmse_percent(const Waveform& raw, const Waveform& recon);
double nmse_percent(const std::vector<double>& raw, const std::vector<double>& recon);

// Multichannel error summary. `mean` averages per-channel NMSE with equal
// weight; `pooled` normalizes total error energy by total signal energy.
struct NmseSummary {
    std::vector<double> per_channel;
    double mean = 0.0;
    double pooled = 0.0;
};

NmseSummary nmse_summary(const WaveformSet& raw, const WaveformSet& recon);

// Capture file I/O. UTF-8 text; '#'-prefixed header lines carry
// system_freq_hz, samples_per_cycle, labels (and optionally units);
// data rows are comma-separated, one row per sample instant.
WaveformSet load_capture(const std::filesystem::path& path);
WaveformSet load_capture(const std::filesystem::path& path,
                         const std::map<std::string, int>& column_map);
void save_capture(const WaveformSet& set, const std::filesystem::path& path);

}  // namespace winr
