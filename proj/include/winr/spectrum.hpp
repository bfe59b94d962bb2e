#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "winr/model.hpp"
#include "winr/waveform.hpp"

namespace winr {

// One-sided DFT magnitude spectrum. Scaling: 2/n for interior bins, 1/n at
// DC and Nyquist, so a pure on-bin sinusoid of amplitude A reads A.
struct Spectrum {
    std::vector<double> magnitudes;  // n/2 + 1 bins
    std::vector<double> freq_axis;   // Hz; bin k at k * sample_rate / n
    std::size_t source_length = 0;

    double bin_width_hz() const { return freq_axis.size() > 1 ? freq_axis[1] : 0.0; }
    std::size_t size() const { return magnitudes.size(); }
};

struct Peak {
    double freq_hz = 0.0;
    double magnitude = 0.0;
    std::size_t bin = 0;
};

// Peaks paired symmetrically about a carrier.
struct SidebandPair {
    Peak lower;
    Peak upper;
    double f_sideband_hz = 0.0;
};

struct PeakSet {
    std::vector<Peak> peaks;  // sorted by magnitude, descending
};

struct DominantMode {
    double freq_hz = 0.0;
    double magnitude = 0.0;
    std::size_t bin = 0;
    // False when the winning bin is below the significance threshold
    // relative to the spectrum's global maximum (noise-floor result).
    bool significant = true;
};

enum class SpectralWindow { None, Hann };

/// One-sided DFT magnitude spectrum of a waveform.
Spectrum dft_magnitude(const Waveform& w, SpectralWindow window = SpectralWindow::None);

/// Largest-magnitude bin at or above exclude_below_hz. The default exclusion
/// skips DC and fundamental residue when analyzing differential waveforms.
DominantMode dominant_frequency(const Spectrum& s, double exclude_below_hz = 90.0,
                                double significance_rel = 0.1);

/// Local maxima above min_rel_magnitude * global max, paired symmetrically
/// about carrier_hz within one bin. Empty result when nothing pairs up.
std::vector<SidebandPair> detect_sidebands(const Spectrum& s, double carrier_hz,
                                           double min_rel_magnitude = 0.1);

/// All local maxima above the relative threshold, strongest first.
PeakSet find_peaks(const Spectrum& s, double min_rel_magnitude = 0.1);

struct SpectrumReport {
    Spectrum raw;
    Spectrum reconstruction;
    DominantMode raw_dominant;
    DominantMode recon_dominant;
    std::vector<SidebandPair> raw_sidebands;
    std::vector<SidebandPair> recon_sidebands;
    double spectral_nmse_percent = 0.0;
    bool differential = false;
};

struct SpectrumReportOptions {
    // Analyze differential waveforms (capture minus tiled mean pre-event
    // cycle) instead of the captures themselves.
    bool differential = false;
    int pre_event_cycles = 5;
    double exclude_below_hz = 90.0;
    std::optional<double> sideband_carrier_hz;  // engage sideband detection
    double min_rel_magnitude = 0.1;
    int channel = 0;  // which channel of a multi-output model to analyze
};

/// Paired raw-vs-reconstruction spectral analysis of one channel.
SpectrumReport spectrum_report(const Waveform& raw, const InrModel& model,
                               const TimeGrid& grid, const SpectrumReportOptions& opts = {});

/// Two-column (frequency_hz, magnitude) text export.
void save_spectrum(const Spectrum& s, const std::filesystem::path& path);

}  // namespace winr
