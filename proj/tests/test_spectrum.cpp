#include <cmath>
#include <filesystem>

#include "doctest.h"

#include "winr/spectrum.hpp"
#include "winr/synth.hpp"
#include "winr/train.hpp"

using namespace winr;

namespace {

Waveform make_signal(std::size_t n, const std::vector<std::pair<double, double>>& tones,
                     double dc = 0.0) {
    Waveform w;
    w.spec = {60.0, 128};
    w.label = "x";
    w.samples.assign(n, dc);
    const double fs = w.spec.sample_rate_hz();
    for (auto [freq, amp] : tones)
        for (std::size_t k = 0; k < n; ++k)
            w.samples[k] += amp * std::sin(kTwoPi * freq * static_cast<double>(k) / fs);
    return w;
}

// Energy identity with the one-sided amplitude scaling unapplied:
// edge bins contribute mag^2, interior bins mag^2 / 2, summing to the
// mean signal energy.
void check_parseval(const Waveform& w) {
    const Spectrum s = dft_magnitude(w);
    const std::size_t n = w.size();
    double lhs = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
        lhs += (edge ? 1.0 : 0.5) * s.magnitudes[k] * s.magnitudes[k];
    }
    double energy = 0.0;
    for (double v : w.samples) energy += v * v;
    energy /= static_cast<double>(n);
    CHECK(lhs == doctest::Approx(energy).epsilon(1e-9));
}

}  // namespace

TEST_SUITE_BEGIN("spectrum");

TEST_CASE("constant signal concentrates at DC") {
    const Waveform w = make_signal(1024, {}, 3.25);
    const Spectrum s = dft_magnitude(w);
    CHECK(s.magnitudes[0] == doctest::Approx(3.25).epsilon(1e-12));
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.magnitudes[k] < 1e-10);
    CHECK(s.freq_axis[0] == 0.0);
}

TEST_CASE("exact-bin sinusoid reads its amplitude at its bin") {
    // 900 Hz at 7680 Hz rate over 7936 samples: bin 930 exactly
    const Waveform w = make_signal(7936, {{900.0, 1.0}});
    const Spectrum s = dft_magnitude(w);
    CHECK(s.magnitudes[930] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.freq_axis[930] == doctest::Approx(900.0).epsilon(1e-12));
    double rest = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (k != 930) rest = std::max(rest, s.magnitudes[k]);
    CHECK(rest < 1e-9);
}

TEST_CASE("superposition of disjoint exact-bin tones") {
    const Waveform x = make_signal(2048, {{60.0, 0.8}});
    const Waveform y = make_signal(2048, {{300.0, 0.4}});
    Waveform both = x;
    for (std::size_t k = 0; k < both.samples.size(); ++k) both.samples[k] += y.samples[k];
    const Spectrum sx = dft_magnitude(x);
    const Spectrum sy = dft_magnitude(y);
    const Spectrum sb = dft_magnitude(both);
    for (std::size_t k = 0; k < sb.size(); ++k) {
        CHECK(sb.magnitudes[k] <= sx.magnitudes[k] + sy.magnitudes[k] + 1e-10);
    }
    // equality at the two tone bins (60 Hz -> bin 16, 300 Hz -> bin 80 at n=2048)
    CHECK(sb.magnitudes[16] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(sb.magnitudes[80] == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("Parseval consistency across transform paths") {
    Rng rng(8);
    // power-of-two (radix-2 path), even composite (Bluestein), odd length
    for (std::size_t n : {1024UL, 7936UL, 999UL}) {
        Waveform w;
        w.spec = {60.0, 128};
        w.label = "noise";
        w.samples.resize(n);
        for (auto& v : w.samples) v = rng.uniform(-1.0, 1.0);
        check_parseval(w);
    }
    check_parseval(make_signal(7936, {{60.0, 1.0}, {450.0, 0.5}, {900.0, 0.25}}, 0.1));
}

TEST_CASE("magnitude spectrum is invariant under time reversal") {
    Rng rng(19);
    Waveform w;
    w.spec = {60.0, 128};
    w.label = "x";
    w.samples.resize(640);
    for (auto& v : w.samples) v = rng.uniform(-1.0, 1.0);
    Waveform rev = w;
    std::reverse(rev.samples.begin(), rev.samples.end());
    const Spectrum a = dft_magnitude(w);
    const Spectrum b = dft_magnitude(rev);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a.magnitudes[k] == doctest::Approx(b.magnitudes[k]).epsilon(0).scale(1e-9));
}

TEST_CASE("dominant_frequency basics") {
    const Waveform w = make_signal(7936, {{300.0, 1.0}, {500.0, 0.5}});
    const Spectrum s = dft_magnitude(w);
    const DominantMode d = dominant_frequency(s, 90.0);
    CHECK(d.freq_hz == s.freq_axis[d.bin]);
    CHECK(d.freq_hz == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(d.significant);

    // exclusion above the only real content leaves a noise-floor answer
    const Waveform only900 = make_signal(7936, {{900.0, 1.0}});
    const DominantMode floor_hit = dominant_frequency(dft_magnitude(only900), 1000.0);
    CHECK(!floor_hit.significant);

    CHECK_THROWS_AS(dominant_frequency(s, 1e9), InvalidInput);
}

TEST_CASE("sidebands of an amplitude-modulated carrier") {
    // 60 cycles -> 1 Hz bins, so 60 +- 5 Hz sit exactly on bins.
    const std::size_t n = 60 * 128;
    Waveform w;
    w.spec = {60.0, 128};
    w.label = "v_A";
    w.samples.resize(n);
    const double fs = w.spec.sample_rate_hz();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / fs;
        w.samples[k] = std::sin(kTwoPi * 60.0 * t) * (1.0 + 0.3 * std::cos(kTwoPi * 5.0 * t));
    }
    const Spectrum s = dft_magnitude(w);
    const auto pairs = detect_sidebands(s, 60.0);
    REQUIRE(pairs.size() >= 1);
    // product-to-sum: components at 55 and 65 Hz with amplitude 0.15
    CHECK(pairs[0].lower.freq_hz == doctest::Approx(55.0).epsilon(1e-9));
    CHECK(pairs[0].upper.freq_hz == doctest::Approx(65.0).epsilon(1e-9));
    CHECK(pairs[0].f_sideband_hz == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(pairs[0].lower.magnitude == doctest::Approx(0.15).epsilon(1e-6));
    CHECK(pairs[0].upper.magnitude == doctest::Approx(0.15).epsilon(1e-6));
    // pair symmetry about the carrier within one bin
    CHECK(std::abs(0.5 * (pairs[0].lower.freq_hz + pairs[0].upper.freq_hz) - 60.0) <=
          s.bin_width_hz());

    const Waveform bare = make_signal(n, {{60.0, 1.0}});
    CHECK(detect_sidebands(dft_magnitude(bare), 60.0).empty());
}

TEST_CASE("sidebands off-bin still pair within one bin") {
    // default 62-cycle geometry: 55/65 Hz fall between bins
    SynthSpec spec;
    spec.event_class = EventClass::DualModeModulated;
    spec.modulation_depth = 0.3;
    spec.f_sideband_hz = 5.0;
    spec.noise_std = 0.0;
    spec.channels = 1;
    const WaveformSet set = gen(spec);
    const Spectrum s = dft_magnitude(set.channels[0]);
    const auto pairs = detect_sidebands(s, 60.0);
    REQUIRE(!pairs.empty());
    CHECK(std::abs(pairs[0].lower.freq_hz - 55.0) <= s.bin_width_hz());
    CHECK(std::abs(pairs[0].upper.freq_hz - 65.0) <= s.bin_width_hz());
}

TEST_CASE("spectrum_report on an exactly reproducing model") {
    // a model whose reconstruction equals the target bitwise gives
    // identical spectra and zero spectral NMSE
    ArchSpec a{ArchKind::Double, 6, 7, 1, Activation::Sine, 400.0};
    InrModel model = init_model(a, 55);
    ModelMeta meta;
    meta.sampling = {60.0, 128};
    meta.n_samples = 1024;
    meta.labels = {"v_A"};
    meta.scale = 1.0;
    set_meta(model, meta);

    const TimeGrid grid = normalize_time(1024);
    const WaveformSet target = reconstruct_set(model, grid);

    SpectrumReportOptions opts;
    opts.exclude_below_hz = 0.0;
    const SpectrumReport rep = spectrum_report(target.channels[0], model, grid, opts);
    CHECK(rep.spectral_nmse_percent == 0.0);
    CHECK(rep.raw_dominant.bin == rep.recon_dominant.bin);
    for (std::size_t k = 0; k < rep.raw.size(); ++k)
        CHECK(rep.raw.magnitudes[k] == rep.reconstruction.magnitudes[k]);
}

TEST_CASE("spectrum_report stays well-formed for a poor model") {
    SynthSpec spec;
    spec.channels = 1;
    spec.capture_cycles = 16;
    spec.event_class = EventClass::Steady;
    spec.seed = 4;
    const WaveformSet target = gen(spec);
    const TimeGrid grid = normalize_time(target.n_samples());

    TrainConfig c;
    c.epochs = 5;
    const FitResult res = fit(target, {ArchKind::Double, 6, 6, 1, Activation::Sine, 500.0}, c);
    const SpectrumReport rep = spectrum_report(target.channels[0], res.model, grid);
    CHECK(rep.raw.size() == target.n_samples() / 2 + 1);
    CHECK(rep.reconstruction.size() == rep.raw.size());
    CHECK(rep.spectral_nmse_percent > 1.0);  // five epochs cannot fit much
    CHECK(std::isfinite(rep.spectral_nmse_percent));
}

TEST_CASE("hann window suppresses leakage of off-bin tones") {
    // 61.5 cycles: the fundamental is off-bin, leakage spreads without a window
    const std::size_t n = 7872;
    Waveform w;
    w.spec = {60.0, 128};
    w.label = "x";
    w.samples.resize(n);
    const double fs = w.spec.sample_rate_hz();
    for (std::size_t k = 0; k < n; ++k)
        w.samples[k] = std::sin(kTwoPi * 60.0 * static_cast<double>(k) / fs);
    const Spectrum plain = dft_magnitude(w);
    const Spectrum hann = dft_magnitude(w, SpectralWindow::Hann);
    // far-from-carrier leakage at e.g. 300 Hz is orders lower with Hann
    const std::size_t far_bin = static_cast<std::size_t>(300.0 * n / fs);
    CHECK(hann.magnitudes[far_bin] < 0.01 * plain.magnitudes[far_bin]);
}

TEST_CASE("spectrum export writes two columns") {
    const Waveform w = make_signal(256, {{60.0, 1.0}});
    const Spectrum s = dft_magnitude(w);
    const auto path = std::filesystem::temp_directory_path() / "winr_spec_export.txt";
    save_spectrum(s, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("frequency_hz") != std::string::npos);
    double f = 0, m = 0;
    std::size_t rows = 0;
    while (in >> f >> m) ++rows;
    CHECK(rows == s.size());
    std::filesystem::remove(path);
}

TEST_SUITE_END();
