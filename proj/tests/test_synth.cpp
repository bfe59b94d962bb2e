#include <cmath>
#include <set>

#include "doctest.h"

#include "winr/spectrum.hpp"
#include "winr/synth.hpp"

using namespace winr;

TEST_SUITE_BEGIN("synth");

TEST_CASE("steady channel A is an exact fundamental") {
    SynthSpec spec;
    spec.event_class = EventClass::Steady;
    spec.noise_std = 0.0;
    spec.channels = 1;
    spec.fundamental_phase_rad = 0.4;
    const WaveformSet set = gen(spec);
    const double fs = spec.sampling.sample_rate_hz();
    for (std::size_t k = 0; k < set.n_samples(); ++k) {
        const double want = std::sin(kTwoPi * 60.0 * static_cast<double>(k) / fs + 0.4);
        CHECK(set.channels[0].samples[k] == doctest::Approx(want).epsilon(0).scale(1e-10));
    }
}

TEST_CASE("balanced three-phase fundamentals sum to zero pointwise") {
    SynthSpec spec;
    spec.event_class = EventClass::Steady;
    spec.noise_std = 0.0;
    spec.channels = 3;
    const WaveformSet set = gen(spec);
    for (std::size_t k = 0; k < set.n_samples(); ++k) {
        const double sum = set.channels[0].samples[k] + set.channels[1].samples[k] +
                           set.channels[2].samples[k];
        CHECK(std::abs(sum) < 1e-12);
    }
}

TEST_CASE("noise-free steady capture has zero differential") {
    SynthSpec spec;
    spec.event_class = EventClass::Steady;
    spec.noise_std = 0.0;
    spec.harmonics = {{3, 0.05, 0.2}, {5, 0.02, 1.1}};
    const WaveformSet set = gen(spec);
    for (const auto& ch : set.channels) {
        const Waveform d = differential_waveform(ch, 5);
        for (double v : d.samples) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("subcycle event is confined to its window") {
    SynthSpec steady;
    steady.event_class = EventClass::Steady;
    steady.seed = 17;
    SynthSpec burst = steady;
    burst.event_class = EventClass::SubcycleOscillation;
    burst.event_start_cycle = 30.0;
    burst.event_duration_cycles = 2.0;

    const WaveformSet a = gen(steady);
    const WaveformSet b = gen(burst);
    const int spc = steady.sampling.samples_per_cycle;
    const std::size_t lo = 30 * static_cast<std::size_t>(spc);
    const std::size_t hi = 32 * static_cast<std::size_t>(spc);
    for (std::size_t c = 0; c < 3; ++c) {
        bool differs_inside = false;
        for (std::size_t k = 0; k < a.n_samples(); ++k) {
            if (k >= lo && k < hi) {
                differs_inside |= a.channels[c].samples[k] != b.channels[c].samples[k];
            } else {
                // identical noise stream, identical steady part
                CHECK(a.channels[c].samples[k] == b.channels[c].samples[k]);
            }
        }
        CHECK(differs_inside);
    }
}

TEST_CASE("single-mode event dominates the differential spectrum at its frequency") {
    SynthSpec spec;
    spec.event_class = EventClass::SingleMode;
    spec.event_freq_hz = 900.0;
    spec.event_amplitude = 0.3;
    spec.event_duration_cycles = 0.0;  // sustained
    spec.seed = 23;
    const WaveformSet set = gen(spec);
    const Waveform diff = differential_waveform(set.channels[0], 5);
    const DominantMode d = dominant_frequency(dft_magnitude(diff), 90.0);
    // 900 Hz on the 62-cycle grid is exactly bin 930
    CHECK(d.bin == 930);
    CHECK(d.significant);
}

TEST_CASE("dual-mode event produces the sideband pair") {
    SynthSpec spec;
    spec.event_class = EventClass::DualModeModulated;
    spec.f_sideband_hz = 5.0;
    spec.modulation_depth = 0.3;
    spec.seed = 29;
    const WaveformSet set = gen(spec);
    const Spectrum s = dft_magnitude(set.channels[0]);
    const auto pairs = detect_sidebands(s, 60.0);
    REQUIRE(!pairs.empty());
    CHECK(std::abs(pairs[0].lower.freq_hz - 55.0) <= s.bin_width_hz());
    CHECK(std::abs(pairs[0].upper.freq_hz - 65.0) <= s.bin_width_hz());
}

TEST_CASE("step sag scales the fundamental inside the window") {
    SynthSpec spec;
    spec.event_class = EventClass::StepSag;
    spec.noise_std = 0.0;
    spec.channels = 1;
    spec.event_start_cycle = 10.0;
    spec.event_duration_cycles = 5.0;
    spec.capture_cycles = 20;
    spec.sag_factor = 0.5;
    const WaveformSet set = gen(spec);
    const int spc = spec.sampling.samples_per_cycle;
    // quarter-cycle sample inside vs outside the sag window
    const std::size_t in_peak = 12 * static_cast<std::size_t>(spc) + spc / 4;
    const std::size_t out_peak = 2 * static_cast<std::size_t>(spc) + spc / 4;
    CHECK(set.channels[0].samples[in_peak] ==
          doctest::Approx(0.5 * set.channels[0].samples[out_peak]).epsilon(1e-12));
}

TEST_CASE("gen is deterministic") {
    SynthSpec spec;
    spec.event_class = EventClass::SubcycleOscillation;
    spec.seed = 31;
    const WaveformSet a = gen(spec);
    const WaveformSet b = gen(spec);
    for (std::size_t c = 0; c < a.channel_count(); ++c)
        CHECK(a.channels[c].samples == b.channels[c].samples);
}

TEST_CASE("gen_suite covers every class deterministically") {
    const auto suite1 = gen_suite(30, 7);
    const auto suite2 = gen_suite(30, 7);
    REQUIRE(suite1.size() == 30);
    std::set<std::string> classes;
    for (std::size_t i = 0; i < suite1.size(); ++i) {
        classes.insert(to_string(suite1[i].first.event_class));
        CHECK_NOTHROW(suite1[i].second.validate());
        CHECK(suite1[i].second.n_samples() == 7936);
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(suite1[i].second.channels[c].samples == suite2[i].second.channels[c].samples);
    }
    CHECK(classes.size() == 5);
}

TEST_CASE("invalid event windows are rejected") {
    SynthSpec spec;
    spec.event_class = EventClass::SubcycleOscillation;
    spec.event_start_cycle = 61.0;
    spec.event_duration_cycles = 5.0;  // extends past 62 cycles
    CHECK_THROWS_AS(gen(spec), InvalidInput);

    spec.event_start_cycle = -1.0;
    CHECK_THROWS_AS(gen(spec), InvalidInput);

    SynthSpec nyq;
    nyq.event_class = EventClass::SingleMode;
    nyq.event_freq_hz = 4000.0;  // past Nyquist at 7680 Hz
    CHECK_THROWS_AS(gen(nyq), InvalidInput);
}

TEST_SUITE_END();
