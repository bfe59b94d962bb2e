#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "winr/common.hpp"
#include "winr/synth.hpp"
#include "winr/waveform.hpp"

using namespace winr;
namespace fs = std::filesystem;

namespace {

Waveform sine_waveform(std::size_t n, double freq_hz, double phase = 0.0, double amp = 1.0) {
    Waveform w;
    w.spec = {60.0, 128};
    w.label = "v_A";
    w.samples.resize(n);
    const double fs = w.spec.sample_rate_hz();
    for (std::size_t k = 0; k < n; ++k)
        w.samples[k] = amp * std::sin(kTwoPi * freq_hz * static_cast<double>(k) / fs + phase);
    return w;
}

fs::path tmp_file(const char* name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE_BEGIN("waveform");

TEST_CASE("normalize_time endpoints and formula") {
    const TimeGrid g2 = normalize_time(2);
    CHECK(g2.t == std::vector<double>{-1.0, 1.0});

    const TimeGrid g3 = normalize_time(3);
    CHECK(g3.t == std::vector<double>{-1.0, 0.0, 1.0});

    const TimeGrid g = normalize_time(7936);
    // direct formula evaluation as the oracle
    CHECK(g.t[930] == doctest::Approx(-1.0 + 2.0 * 930.0 / 7935.0).epsilon(1e-15));
    CHECK(g.t.front() == -1.0);
    CHECK(g.t.back() == 1.0);

    CHECK_THROWS_AS(normalize_time(1), InvalidInput);
    CHECK_THROWS_AS(normalize_time(0), InvalidInput);
}

TEST_CASE("normalize_time symmetry property") {
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(5000);
        const TimeGrid g = normalize_time(n);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(g.t[k] == doctest::Approx(-g.t[n - 1 - k]).epsilon(0).scale(1e-15));
        for (std::size_t k = 1; k < n; ++k) CHECK(g.t[k] > g.t[k - 1]);
    }
}

TEST_CASE("differential of an exactly periodic signal is zero") {
    const Waveform w = sine_waveform(7936, 60.0, 0.3);
    for (int pre : {1, 5, 20}) {
        const Waveform d = differential_waveform(w, pre);
        double mx = 0;
        for (double v : d.samples) mx = std::max(mx, std::abs(v));
        CHECK(mx < 1e-10);
    }
}

TEST_CASE("differential recovers an additive burst") {
    // steady + burst in cycles 31..32, constructed by superposition
    Waveform steady = sine_waveform(7936, 60.0);
    std::vector<double> burst(7936, 0.0);
    const double fs = steady.spec.sample_rate_hz();
    for (std::size_t k = 31 * 128; k < 33 * 128; ++k)
        burst[k] = 0.7 * std::sin(kTwoPi * 900.0 * static_cast<double>(k) / fs);
    Waveform capture = steady;
    for (std::size_t k = 0; k < capture.samples.size(); ++k) capture.samples[k] += burst[k];

    const Waveform d = differential_waveform(capture, 5);
    for (std::size_t k = 0; k < d.samples.size(); ++k)
        CHECK(d.samples[k] == doctest::Approx(burst[k]).epsilon(0).scale(1e-9));
}

TEST_CASE("differential length bounds") {
    Waveform two_cycles = sine_waveform(256, 60.0);
    CHECK_NOTHROW(differential_waveform(two_cycles, 1));
    CHECK_THROWS_AS(differential_waveform(two_cycles, 2), InvalidInput);
    CHECK_THROWS_AS(differential_waveform(two_cycles, 0), InvalidInput);
}

TEST_CASE("nmse closed forms") {
    const Waveform raw = sine_waveform(7936, 60.0);
    CHECK(nmse_percent(raw, raw) == 0.0);

    Waveform zero = raw;
    for (auto& v : zero.samples) v = 0.0;
    CHECK(nmse_percent(raw, zero) == doctest::Approx(100.0).epsilon(1e-12));

    Waveform scaled = raw;
    for (auto& v : scaled.samples) v *= 0.9;
    // sum((0.1 s)^2) / sum(s^2) = 0.01 -> 1%
    CHECK(nmse_percent(raw, scaled) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("nmse errors") {
    const Waveform raw = sine_waveform(512, 60.0);
    Waveform shorter = raw;
    shorter.samples.pop_back();
    CHECK_THROWS_AS(nmse_percent(raw, shorter), InvalidInput);

    Waveform zeros = raw;
    for (auto& v : zeros.samples) v = 0.0;
    CHECK_THROWS_AS(nmse_percent(zeros, raw), NumericError);
}

TEST_CASE("nmse scale invariance property") {
    Rng rng(7);
    Waveform raw = sine_waveform(640, 60.0);
    Waveform recon = raw;
    for (auto& v : recon.samples) v += 0.05 * (rng.uniform() - 0.5);
    const double base = nmse_percent(raw, recon);
    for (double c : {3.0, -2.5, 1e-4, 1e6}) {
        Waveform r2 = raw, q2 = recon;
        for (auto& v : r2.samples) v *= c;
        for (auto& v : q2.samples) v *= c;
        CHECK(nmse_percent(r2, q2) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("capture save/load round-trip is exact") {
    SynthSpec spec;
    spec.seed = 99;
    spec.capture_cycles = 4;  // keep the file small
    spec.event_class = EventClass::Steady;
    const WaveformSet set = gen(spec);
    const fs::path path = tmp_file("winr_capture_roundtrip.csv");
    save_capture(set, path);
    const WaveformSet back = load_capture(path);

    REQUIRE(back.channel_count() == set.channel_count());
    CHECK(back.spec() == set.spec());
    CHECK(back.labels() == set.labels());
    for (std::size_t c = 0; c < set.channel_count(); ++c) {
        CHECK(back.channels[c].unit == set.channels[c].unit);
        REQUIRE(back.channels[c].samples.size() == set.channels[c].samples.size());
        for (std::size_t k = 0; k < set.n_samples(); ++k)
            CHECK(back.channels[c].samples[k] == set.channels[c].samples[k]);
    }
    fs::remove(path);
}

TEST_CASE("capture load shape and header") {
    const fs::path path = tmp_file("winr_capture_shape.csv");
    {
        std::ofstream out(path);
        out << "# system_freq_hz: 60\n# samples_per_cycle: 2\n# labels: v_A,v_B,v_C\n";
        for (int k = 0; k < 6; ++k) out << k << "," << k + 10 << "," << k + 20 << "\n";
    }
    const WaveformSet set = load_capture(path);
    CHECK(set.channel_count() == 3);
    CHECK(set.n_samples() == 6);
    CHECK(set.channels[1].label == "v_B");
    CHECK(set.channels[2].samples[3] == 23.0);

    // column selection remaps and relabels
    const WaveformSet sel = load_capture(path, {{"x", 2}, {"y", 0}});
    CHECK(sel.channel_count() == 2);
    CHECK(sel.channels[0].samples[0] == 20.0);
    CHECK_THROWS_AS(load_capture(path, {{"x", 5}}), ParseError);
    fs::remove(path);
}

TEST_CASE("capture parse errors name the offending cell") {
    const fs::path path = tmp_file("winr_capture_bad.csv");
    auto write_and_expect = [&](const char* body, const char* needle) {
        {
            std::ofstream out(path);
            out << "# system_freq_hz: 60\n# samples_per_cycle: 2\n# labels: a,b\n" << body;
        }
        try {
            load_capture(path);
            FAIL_CHECK("expected ParseError for body: " << body);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    write_and_expect("1,2\n3,nan\n5,6\n7,8\n", "row 2");
    write_and_expect("1,2\n3\n5,6\n7,8\n", "ragged");
    write_and_expect("1,2\nx,4\n5,6\n7,8\n", "column 0");

    {
        std::ofstream out(path);
        out << "# labels: a,b\n1,2\n3,4\n";
    }
    CHECK_THROWS_AS(load_capture(path), ParseError);  // missing sampling header
    fs::remove(path);
}

TEST_CASE("waveform set invariants") {
    WaveformSet set;
    set.channels.push_back(sine_waveform(512, 60.0));
    set.channels.push_back(sine_waveform(512, 60.0, 1.0));
    CHECK_NOTHROW(set.validate());

    set.channels[1].samples.pop_back();
    CHECK_THROWS_AS(set.validate(), InvalidInput);

    set.channels[1].samples.push_back(std::nan(""));
    CHECK_THROWS_AS(set.validate(), InvalidInput);

    WaveformSet empty;
    CHECK_THROWS_AS(empty.validate(), InvalidInput);
}

TEST_SUITE_END();
