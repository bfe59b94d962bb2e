#include "winr/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace winr {

std::string to_string(EventClass c) {
    switch (c) {
        case EventClass::Steady: return "steady";
        case EventClass::SubcycleOscillation: return "subcycle_oscillation";
        case EventClass::SingleMode: return "single_mode";
        case EventClass::DualModeModulated: return "dual_mode_modulated";
        case EventClass::StepSag: return "step_sag";
    }
    return "?";
}

EventClass event_class_from_string(const std::string& s) {
    if (s == "steady") return EventClass::Steady;
    if (s == "subcycle_oscillation" || s == "subcycle") return EventClass::SubcycleOscillation;
    if (s == "single_mode") return EventClass::SingleMode;
    if (s == "dual_mode_modulated" || s == "dual_mode") return EventClass::DualModeModulated;
    if (s == "step_sag" || s == "sag") return EventClass::StepSag;
    throw ParseError("unknown event class '" + s + "'");
}

void SynthSpec::validate() const {
    sampling.validate();
    if (capture_cycles < 1) throw InvalidInput("SynthSpec: capture_cycles must be >= 1");
    if (channels < 1) throw InvalidInput("SynthSpec: channels must be >= 1");
    if (fundamental_amplitude < 0.0 || event_amplitude < 0.0)
        throw InvalidInput("SynthSpec: amplitudes must be nonnegative");
    if (noise_std < 0.0) throw InvalidInput("SynthSpec: noise_std must be nonnegative");
    if (modulation_depth < 0.0) throw InvalidInput("SynthSpec: modulation_depth must be >= 0");
    for (const auto& h : harmonics) {
        if (h.order < 1) throw InvalidInput("SynthSpec: harmonic order must be >= 1");
        if (h.amplitude < 0.0) throw InvalidInput("SynthSpec: harmonic amplitude must be >= 0");
    }
    const bool windowed = event_class == EventClass::SubcycleOscillation ||
                          event_class == EventClass::SingleMode ||
                          event_class == EventClass::StepSag;
    if (windowed) {
        if (event_start_cycle < 0.0 || event_start_cycle >= capture_cycles)
            throw InvalidInput("SynthSpec: event start outside the capture");
        if (event_duration_cycles > 0.0 &&
            event_start_cycle + event_duration_cycles > capture_cycles)
            throw InvalidInput("SynthSpec: event window extends past the capture");
        if (event_freq_hz >= 0.5 * sampling.sample_rate_hz())
            throw InvalidInput("SynthSpec: event frequency at or above Nyquist");
    }
}

WaveformSet gen(const SynthSpec& spec) {
    spec.validate();
    const int spc = spec.sampling.samples_per_cycle;
    const std::size_t n = static_cast<std::size_t>(spec.capture_cycles) * spc;
    const double fs = spec.sampling.sample_rate_hz();
    const double f0 = spec.sampling.system_freq_hz;

    const double t_ev_start = spec.event_start_cycle / f0;
    const double dur = spec.event_duration_cycles > 0.0
                           ? spec.event_duration_cycles / f0
                           : (spec.capture_cycles - spec.event_start_cycle) / f0;
    const double t_ev_end = t_ev_start + dur;
    const double tau = (spec.burst_tau_cycles > 0.0 ? spec.burst_tau_cycles / f0 : dur / 2.0);

    Rng rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    WaveformSet set;
    for (int c = 0; c < spec.channels; ++c) {
        // Phases A/B/C at 0/-120/+120 degrees; further channels repeat the
        // pattern (synchro-waveform channels are modeled the same way).
        const double shift = (c % 3 == 0) ? 0.0 : (c % 3 == 1 ? -kTwoPi / 3.0 : kTwoPi / 3.0);
        Waveform w;
        w.spec = spec.sampling;
        w.unit = spec.unit;
        w.label = std::string(spec.unit == SignalUnit::Volts ? "v_" : "i_") +
                  static_cast<char>('A' + c);
        w.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double ta = static_cast<double>(k) / fs;
            // Cycle-local phase keeps the steady part exactly periodic.
            const double cyc_phase = kTwoPi * static_cast<double>(k % spc) / spc;
            const double ph = cyc_phase + spec.fundamental_phase_rad + shift;

            double fund_amp = spec.fundamental_amplitude;
            if (spec.event_class == EventClass::StepSag && ta >= t_ev_start && ta < t_ev_end)
                fund_amp *= spec.sag_factor;

            double fund = fund_amp * std::sin(ph);
            if (spec.event_class == EventClass::DualModeModulated)
                fund *= 1.0 + spec.modulation_depth * std::cos(kTwoPi * spec.f_sideband_hz * ta);

            double v = fund;
            for (const auto& hm : spec.harmonics)
                v += spec.fundamental_amplitude * hm.amplitude *
                     std::sin(hm.order * (cyc_phase + shift) + hm.phase_rad);

            if (spec.event_class == EventClass::SubcycleOscillation && ta >= t_ev_start &&
                ta < t_ev_end) {
                const double te = ta - t_ev_start;
                v += spec.fundamental_amplitude * spec.event_amplitude * std::exp(-te / tau) *
                     std::sin(kTwoPi * spec.event_freq_hz * te + shift);
            } else if (spec.event_class == EventClass::SingleMode && ta >= t_ev_start &&
                       ta < t_ev_end) {
                const double te = ta - t_ev_start;
                v += spec.fundamental_amplitude * spec.event_amplitude *
                     std::sin(kTwoPi * spec.event_freq_hz * te + shift);
            }

            if (spec.noise_std > 0.0) v += spec.noise_std * rng.normal();
            w.samples[k] = v;
        }
        set.channels.push_back(std::move(w));
    }
    set.validate();
    return set;
}

std::vector<std::pair<SynthSpec, WaveformSet>> gen_suite(int n_events, std::uint64_t seed) {
    if (n_events < 1) throw InvalidInput("gen_suite: n_events must be >= 1");
    Rng rng(seed);
    const EventClass classes[] = {
        EventClass::SubcycleOscillation, EventClass::SingleMode,
        EventClass::DualModeModulated, EventClass::StepSag, EventClass::Steady,
    };
    std::vector<std::pair<SynthSpec, WaveformSet>> out;
    out.reserve(static_cast<std::size_t>(n_events));
    for (int e = 0; e < n_events; ++e) {
        SynthSpec s;
        s.event_class = classes[e % 5];
        s.fundamental_amplitude = rng.uniform(0.8, 1.2);
        s.fundamental_phase_rad = rng.uniform(0.0, kTwoPi);
        s.harmonics = {
            {3, rng.uniform(0.01, 0.06), rng.uniform(0.0, kTwoPi)},
            {5, rng.uniform(0.005, 0.04), rng.uniform(0.0, kTwoPi)},
        };
        switch (s.event_class) {
            case EventClass::SubcycleOscillation:
                s.event_start_cycle = std::floor(rng.uniform(25.0, 35.0));
                s.event_duration_cycles = rng.uniform(1.5, 3.0);
                s.event_freq_hz = rng.uniform(400.0, 700.0);
                s.event_amplitude = rng.uniform(1.0, 2.5);
                break;
            case EventClass::SingleMode:
                s.event_start_cycle = std::floor(rng.uniform(28.0, 32.0));
                s.event_duration_cycles = 0.0;  // sustained to the end
                s.event_freq_hz = rng.uniform(400.0, 1000.0);
                s.event_amplitude = rng.uniform(0.2, 0.5);
                break;
            case EventClass::DualModeModulated:
                s.modulation_depth = rng.uniform(0.1, 0.4);
                s.f_sideband_hz = rng.uniform(2.0, 15.0);
                break;
            case EventClass::StepSag:
                s.event_start_cycle = std::floor(rng.uniform(25.0, 32.0));
                s.event_duration_cycles = std::floor(rng.uniform(3.0, 8.0));
                s.sag_factor = rng.uniform(0.4, 0.8);
                break;
            case EventClass::Steady:
                break;
        }
        s.seed = rng.next_u64();
        WaveformSet set = gen(s);
        out.emplace_back(std::move(s), std::move(set));
    }
    return out;
}

namespace {

nlohmann::json harmonics_json(const std::vector<HarmonicSpec>& hs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& h : hs)
        arr.push_back({{"order", h.order}, {"amplitude", h.amplitude}, {"phase_rad", h.phase_rad}});
    return arr;
}

}  // namespace

void save_synth_spec(const SynthSpec& s, const std::filesystem::path& path) {
    nlohmann::json j{
        {"schema_version", 1},
        {"event_class", to_string(s.event_class)},
        {"capture_cycles", s.capture_cycles},
        {"system_freq_hz", s.sampling.system_freq_hz},
        {"samples_per_cycle", s.sampling.samples_per_cycle},
        {"channels", s.channels},
        {"fundamental_amplitude", s.fundamental_amplitude},
        {"fundamental_phase_rad", s.fundamental_phase_rad},
        {"harmonics", harmonics_json(s.harmonics)},
        {"unit", to_string(s.unit)},
        {"event_start_cycle", s.event_start_cycle},
        {"event_duration_cycles", s.event_duration_cycles},
        {"event_freq_hz", s.event_freq_hz},
        {"event_amplitude", s.event_amplitude},
        {"burst_tau_cycles", s.burst_tau_cycles},
        {"modulation_depth", s.modulation_depth},
        {"f_sideband_hz", s.f_sideband_hz},
        {"sag_factor", s.sag_factor},
        {"noise_std", s.noise_std},
        {"seed", s.seed},
    };
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write synth spec '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open synth spec '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad synth spec '" + path.string() + "': " + e.what());
    }
    SynthSpec s;
    try {
        s.event_class = event_class_from_string(j.at("event_class").get<std::string>());
        s.capture_cycles = j.at("capture_cycles").get<int>();
        s.sampling.system_freq_hz = j.at("system_freq_hz").get<double>();
        s.sampling.samples_per_cycle = j.at("samples_per_cycle").get<int>();
        s.channels = j.at("channels").get<int>();
        s.fundamental_amplitude = j.at("fundamental_amplitude").get<double>();
        s.fundamental_phase_rad = j.at("fundamental_phase_rad").get<double>();
        for (const auto& h : j.at("harmonics"))
            s.harmonics.push_back({h.at("order").get<int>(), h.at("amplitude").get<double>(),
                                   h.at("phase_rad").get<double>()});
        s.unit = unit_from_string(j.at("unit").get<std::string>());
        s.event_start_cycle = j.at("event_start_cycle").get<double>();
        s.event_duration_cycles = j.at("event_duration_cycles").get<double>();
        s.event_freq_hz = j.at("event_freq_hz").get<double>();
        s.event_amplitude = j.at("event_amplitude").get<double>();
        s.burst_tau_cycles = j.at("burst_tau_cycles").get<double>();
        s.modulation_depth = j.at("modulation_depth").get<double>();
        s.f_sideband_hz = j.at("f_sideband_hz").get<double>();
        s.sag_factor = j.at("sag_factor").get<double>();
        s.noise_std = j.at("noise_std").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("synth spec '" + path.string() + "' missing field: " + e.what());
    }
    s.validate();
    return s;
}

}  // namespace winr
