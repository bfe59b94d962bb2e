#include "winr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>

namespace winr {

namespace {

using cd = std::complex<double>;

// Iterative radix-2 Cooley-Tukey, n a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Full complex DFT of a real signal. Power-of-two lengths go straight to
// the radix-2 transform; everything else uses Bluestein's chirp-z
// identity, with the chirp phase reduced mod 2n to keep large indices
// accurate.
std::vector<cd> dft_real(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if ((n & (n - 1)) == 0) {
        std::vector<cd> a(x.begin(), x.end());
        fft_pow2(a, false);
        return a;
    }
    const std::size_t L = next_pow2(2 * n - 1);
    std::vector<cd> chirp(n);
    for (std::size_t m = 0; m < n; ++m) {
        const std::size_t m2 = (m * m) % (2 * n);
        const double ang = -kPi * static_cast<double>(m2) / static_cast<double>(n);
        chirp[m] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> a(L, cd(0.0)), b(L, cd(0.0));
    for (std::size_t m = 0; m < n; ++m) a[m] = x[m] * chirp[m];
    b[0] = std::conj(chirp[0]);
    for (std::size_t m = 1; m < n; ++m) b[m] = b[L - m] = std::conj(chirp[m]);
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t q = 0; q < L; ++q) a[q] *= b[q];
    fft_pow2(a, true);
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    return out;
}

}  // namespace

Spectrum dft_magnitude(const Waveform& w, SpectralWindow window) {
    if (w.size() < 2) throw InvalidInput("dft_magnitude: need at least 2 samples");
    const std::size_t n = w.size();

    std::vector<double> x = w.samples;
    if (window == SpectralWindow::Hann) {
        for (std::size_t k = 0; k < n; ++k)
            x[k] *= 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) /
                                          static_cast<double>(n - 1)));
    }

    const auto X = dft_real(x);
    const std::size_t nbins = n / 2 + 1;
    Spectrum s;
    s.source_length = n;
    s.magnitudes.resize(nbins);
    s.freq_axis.resize(nbins);
    const double fs = w.spec.sample_rate_hz();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < nbins; ++k) {
        // Amplitude scaling: interior bins carry both half-spectrum copies.
        const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
        s.magnitudes[k] = (edge ? 1.0 : 2.0) * std::abs(X[k]) * inv_n;
        s.freq_axis[k] = static_cast<double>(k) * fs * inv_n;
    }
    return s;
}

DominantMode dominant_frequency(const Spectrum& s, double exclude_below_hz,
                                double significance_rel) {
    if (s.size() == 0) throw InvalidInput("dominant_frequency: empty spectrum");
    std::size_t first = 0;
    while (first < s.size() && s.freq_axis[first] < exclude_below_hz) ++first;
    if (first >= s.size())
        throw InvalidInput("dominant_frequency: exclusion threshold " +
                           std::to_string(exclude_below_hz) + " Hz leaves no bins");
    std::size_t best = first;
    for (std::size_t k = first + 1; k < s.size(); ++k)
        if (s.magnitudes[k] > s.magnitudes[best]) best = k;
    const double gmax = *std::max_element(s.magnitudes.begin(), s.magnitudes.end());
    DominantMode d;
    d.freq_hz = s.freq_axis[best];
    d.magnitude = s.magnitudes[best];
    d.bin = best;
    d.significant = d.magnitude >= significance_rel * gmax;
    return d;
}

PeakSet find_peaks(const Spectrum& s, double min_rel_magnitude) {
    PeakSet out;
    if (s.size() < 3) return out;
    const double gmax = *std::max_element(s.magnitudes.begin(), s.magnitudes.end());
    const double floor = min_rel_magnitude * gmax;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        if (s.magnitudes[k] >= s.magnitudes[k - 1] && s.magnitudes[k] > s.magnitudes[k + 1] &&
            s.magnitudes[k] >= floor)
            out.peaks.push_back({s.freq_axis[k], s.magnitudes[k], k});
    }
    std::sort(out.peaks.begin(), out.peaks.end(),
              [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
    return out;
}

std::vector<SidebandPair> detect_sidebands(const Spectrum& s, double carrier_hz,
                                           double min_rel_magnitude) {
    std::vector<SidebandPair> pairs;
    const double bw = s.bin_width_hz();
    if (bw <= 0.0) return pairs;

    PeakSet peaks = find_peaks(s, min_rel_magnitude);
    // The carrier itself (and its immediate leakage) is not a sideband.
    std::vector<Peak> lower, upper;
    for (const auto& p : peaks.peaks) {
        if (std::abs(p.freq_hz - carrier_hz) <= 1.5 * bw) continue;
        (p.freq_hz < carrier_hz ? lower : upper).push_back(p);
    }

    std::vector<bool> used(upper.size(), false);
    for (const auto& lo : lower) {
        int best = -1;
        double best_err = bw;  // symmetric within one bin
        for (std::size_t q = 0; q < upper.size(); ++q) {
            if (used[q]) continue;
            const double mid = 0.5 * (lo.freq_hz + upper[q].freq_hz);
            const double err = std::abs(mid - carrier_hz);
            if (err <= best_err) {
                best_err = err;
                best = static_cast<int>(q);
            }
        }
        if (best >= 0) {
            used[static_cast<std::size_t>(best)] = true;
            SidebandPair sp;
            sp.lower = lo;
            sp.upper = upper[static_cast<std::size_t>(best)];
            sp.f_sideband_hz = 0.5 * (sp.upper.freq_hz - sp.lower.freq_hz);
            pairs.push_back(sp);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const SidebandPair& a, const SidebandPair& b) {
        return a.lower.magnitude + a.upper.magnitude > b.lower.magnitude + b.upper.magnitude;
    });
    return pairs;
}

SpectrumReport spectrum_report(const Waveform& raw, const InrModel& model, const TimeGrid& grid,
                               const SpectrumReportOptions& opts) {
    const WaveformSet recon_set = reconstruct_set(model, grid);
    if (opts.channel < 0 || static_cast<std::size_t>(opts.channel) >= recon_set.channel_count())
        throw InvalidInput("spectrum_report: channel " + std::to_string(opts.channel) +
                           " out of range");
    const Waveform& recon = recon_set.channels[static_cast<std::size_t>(opts.channel)];
    if (recon.size() != raw.size())
        throw InvalidInput("spectrum_report: reconstruction length differs from raw");

    SpectrumReport rep;
    rep.differential = opts.differential;
    const Waveform raw_sig =
        opts.differential ? differential_waveform(raw, opts.pre_event_cycles) : raw;
    const Waveform rec_sig =
        opts.differential ? differential_waveform(recon, opts.pre_event_cycles) : recon;

    rep.raw = dft_magnitude(raw_sig);
    rep.reconstruction = dft_magnitude(rec_sig);
    rep.raw_dominant = dominant_frequency(rep.raw, opts.exclude_below_hz);
    rep.recon_dominant = dominant_frequency(rep.reconstruction, opts.exclude_below_hz);
    if (opts.sideband_carrier_hz) {
        rep.raw_sidebands =
            detect_sidebands(rep.raw, *opts.sideband_carrier_hz, opts.min_rel_magnitude);
        rep.recon_sidebands =
            detect_sidebands(rep.reconstruction, *opts.sideband_carrier_hz,
                             opts.min_rel_magnitude);
    }

    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < rep.raw.size(); ++k) {
        const double e = rep.raw.magnitudes[k] - rep.reconstruction.magnitudes[k];
        num += e * e;
        den += rep.raw.magnitudes[k] * rep.raw.magnitudes[k];
    }
    if (den == 0.0) throw NumericError("spectrum_report: raw spectrum has zero energy");
    rep.spectral_nmse_percent = 100.0 * num / den;
    return rep;
}

void save_spectrum(const Spectrum& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write spectrum file '" + path.string() + "'");
    out << "# frequency_hz magnitude\n";
    char buf[80];
    for (std::size_t k = 0; k < s.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g %.10g\n", s.freq_axis[k], s.magnitudes[k]);
        out << buf;
    }
}

}  // namespace winr
