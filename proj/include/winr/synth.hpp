#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winr/waveform.hpp"

namespace winr {

enum class EventClass {
    Steady,
    SubcycleOscillation,
    SingleMode,
    DualModeModulated,
    StepSag,
};

std::string to_string(EventClass c);
EventClass event_class_from_string(const std::string& s);

struct HarmonicSpec {
    int order = 3;          // multiple of the fundamental
    double amplitude = 0.0; // relative to fundamental amplitude 1.0
    double phase_rad = 0.0;
};

// Parametric description of a synthetic capture. Defaults mirror the
// reference geometry: 62 cycles at 128 samples/cycle, event centered.
struct SynthSpec {
    EventClass event_class = EventClass::Steady;
    int capture_cycles = 62;
    SamplingSpec sampling;                 // 60 Hz, 128 s/c by default
    int channels = 3;                      // three-phase by default
    double fundamental_amplitude = 1.0;
    double fundamental_phase_rad = 0.0;    // phase of channel A
    std::vector<HarmonicSpec> harmonics;
    SignalUnit unit = SignalUnit::Volts;

    // Event parameters. start/duration are in cycles; duration <= 0 means
    // "to the end of the capture" (used by sustained event classes).
    double event_start_cycle = 30.0;
    double event_duration_cycles = 2.0;
    double event_freq_hz = 450.0;          // burst / sustained-tone frequency
    double event_amplitude = 2.0;          // relative to fundamental
    double burst_tau_cycles = 0.0;         // 0 = half the event window
    double modulation_depth = 0.3;         // dual-mode m
    double f_sideband_hz = 5.0;            // dual-mode modulation frequency
    double sag_factor = 0.6;               // step_sag amplitude multiplier

    double noise_std = 0.005;              // absolute, per sample
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deterministic synthetic capture. Channels B and C take -120/+120 degree
/// fundamental phase shifts (and order-scaled shifts on harmonics).
WaveformSet gen(const SynthSpec& spec);

/// n randomized specs cycling through all event classes, with amplitudes,
/// frequencies, and phases drawn from documented ranges. Deterministic
/// given seed.
std::vector<std::pair<SynthSpec, WaveformSet>> gen_suite(int n_events, std::uint64_t seed);

// Sidecar provenance files for generated captures.
void save_synth_spec(const SynthSpec& spec, const std::filesystem::path& path);
SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace winr
