#include "winr/waveform.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace winr {

void SamplingSpec::validate() const {
    if (!(system_freq_hz > 0.0))
        throw InvalidInput("SamplingSpec: system_freq_hz must be positive");
    if (samples_per_cycle < 2)
        throw InvalidInput("SamplingSpec: samples_per_cycle must be >= 2");
}

std::string to_string(SignalUnit u) {
    return u == SignalUnit::Volts ? "volts" : "amperes";
}

SignalUnit unit_from_string(const std::string& s) {
    if (s == "volts" || s == "V") return SignalUnit::Volts;
    if (s == "amperes" || s == "A") return SignalUnit::Amperes;
    throw ParseError("unknown signal unit '" + s + "'");
}

void Waveform::validate() const {
    spec.validate();
    if (samples.size() < static_cast<std::size_t>(spec.samples_per_cycle))
        throw InvalidInput("waveform '" + label + "' shorter than one cycle");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!std::isfinite(samples[k]))
            throw InvalidInput("waveform '" + label + "' has non-finite sample at index " +
                               std::to_string(k));
    }
}

const SamplingSpec& WaveformSet::spec() const {
    if (channels.empty()) throw InvalidInput("empty waveform set");
    return channels.front().spec;
}

std::vector<std::string> WaveformSet::labels() const {
    std::vector<std::string> out;
    out.reserve(channels.size());
    for (const auto& c : channels) out.push_back(c.label);
    return out;
}

void WaveformSet::validate() const {
    if (channels.empty()) throw InvalidInput("empty waveform set");
    const auto& first = channels.front();
    for (const auto& c : channels) {
        c.validate();
        if (c.size() != first.size())
            throw InvalidInput("channel '" + c.label + "' length differs from '" +
                               first.label + "'");
        if (!(c.spec == first.spec))
            throw InvalidInput("channel '" + c.label + "' sampling spec differs");
    }
}

TimeGrid normalize_time(std::size_t n_samples) {
    if (n_samples < 2) throw InvalidInput("normalize_time: need at least 2 samples");
    TimeGrid g;
    g.t.resize(n_samples);
    const double step = 2.0 / static_cast<double>(n_samples - 1);
    for (std::size_t k = 0; k < n_samples; ++k)
        g.t[k] = -1.0 + step * static_cast<double>(k);
    g.t.back() = 1.0;  // pin the endpoint against rounding
    return g;
}

Waveform differential_waveform(const Waveform& capture, int pre_event_cycles) {
    if (pre_event_cycles < 1)
        throw InvalidInput("differential_waveform: pre_event_cycles must be >= 1");
    const int spc = capture.spec.samples_per_cycle;
    const std::size_t needed = static_cast<std::size_t>(pre_event_cycles + 1) * spc;
    if (capture.size() < needed)
        throw InvalidInput("differential_waveform: capture has " +
                           std::to_string(capture.size()) + " samples, needs at least " +
                           std::to_string(needed));

    std::vector<double> avg(spc, 0.0);
    for (int c = 0; c < pre_event_cycles; ++c)
        for (int j = 0; j < spc; ++j)
            avg[j] += capture.samples[static_cast<std::size_t>(c) * spc + j];
    for (auto& v : avg) v /= pre_event_cycles;

    Waveform out = capture;
    for (std::size_t k = 0; k < out.samples.size(); ++k)
        out.samples[k] = capture.samples[k] - avg[k % spc];
    return out;
}

double nmse_percent(const std::vector<double>& raw, const std::vector<double>& recon) {
    if (raw.size() != recon.size())
        throw InvalidInput("nmse_percent: length mismatch (" + std::to_string(raw.size()) +
                           " vs " + std::to_string(recon.size()) + ")");
    if (raw.empty()) throw InvalidInput("nmse_percent: empty input");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double e = raw[k] - recon[k];
        num += e * e;
        den += raw[k] * raw[k];
    }
    if (den == 0.0)
        throw NumericError("nmse_percent: raw signal has zero energy; metric undefined");
    return 100.0 * num / den;
}

double nmse_percent(const Waveform& raw, const Waveform& recon) {
    return nmse_percent(raw.samples, recon.samples);
}

NmseSummary nmse_summary(const WaveformSet& raw, const WaveformSet& recon) {
    if (raw.channel_count() != recon.channel_count())
        throw InvalidInput("nmse_summary: channel count mismatch (" +
                           std::to_string(raw.channel_count()) + " vs " +
                           std::to_string(recon.channel_count()) + ")");
    NmseSummary s;
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < raw.channel_count(); ++c) {
        s.per_channel.push_back(nmse_percent(raw.channels[c], recon.channels[c]));
        for (std::size_t k = 0; k < raw.channels[c].size(); ++k) {
            const double e = raw.channels[c].samples[k] - recon.channels[c].samples[k];
            num += e * e;
            den += raw.channels[c].samples[k] * raw.channels[c].samples[k];
        }
    }
    for (double v : s.per_channel) s.mean += v;
    s.mean /= static_cast<double>(s.per_channel.size());
    s.pooled = 100.0 * num / den;
    return s;
}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    auto b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(trim(s.substr(pos)));
            break;
        }
        out.push_back(trim(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const std::string t = trim(cell);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || p != end)
        throw ParseError("non-numeric cell at data row " + std::to_string(row) +
                         ", column " + std::to_string(col) + ": '" + t + "'");
    if (!std::isfinite(v))
        throw ParseError("non-finite value at data row " + std::to_string(row) +
                         ", column " + std::to_string(col));
    return v;
}

struct CaptureHeader {
    SamplingSpec spec;
    std::vector<std::string> labels;
    std::vector<SignalUnit> units;
    bool have_freq = false, have_spc = false;
};

void parse_header_line(const std::string& body, CaptureHeader& h) {
    auto colon = body.find(':');
    if (colon == std::string::npos) return;  // free-form comment
    const std::string key = trim(body.substr(0, colon));
    const std::string val = trim(body.substr(colon + 1));
    if (key == "system_freq_hz") {
        h.spec.system_freq_hz = std::stod(val);
        h.have_freq = true;
    } else if (key == "samples_per_cycle") {
        h.spec.samples_per_cycle = std::stoi(val);
        h.have_spc = true;
    } else if (key == "labels") {
        h.labels = split(val, ',');
    } else if (key == "units") {
        for (const auto& u : split(val, ',')) h.units.push_back(unit_from_string(u));
    }
}

}  // namespace

WaveformSet load_capture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open capture file '" + path.string() + "'");

    CaptureHeader h;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            parse_header_line(trim(t.substr(1)), h);
            continue;
        }
        ++data_row;
        const auto cells = split(t, ',');
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            row.push_back(parse_cell(cells[c], data_row, c));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged row at data row " + std::to_string(data_row) +
                             ": expected " + std::to_string(rows.front().size()) +
                             " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("capture file '" + path.string() + "' has no data rows");
    if (!h.have_freq || !h.have_spc)
        throw ParseError("capture file '" + path.string() +
                         "' missing system_freq_hz or samples_per_cycle header");

    const std::size_t ncols = rows.front().size();
    if (h.labels.empty())
        for (std::size_t c = 0; c < ncols; ++c) h.labels.push_back("ch" + std::to_string(c));
    if (h.labels.size() != ncols)
        throw ParseError("header declares " + std::to_string(h.labels.size()) +
                         " labels but data has " + std::to_string(ncols) + " columns");

    WaveformSet set;
    for (std::size_t c = 0; c < ncols; ++c) {
        Waveform w;
        w.spec = h.spec;
        w.label = h.labels[c];
        w.unit = c < h.units.size() ? h.units[c] : SignalUnit::Volts;
        w.samples.reserve(rows.size());
        for (const auto& r : rows) w.samples.push_back(r[c]);
        set.channels.push_back(std::move(w));
    }
    set.validate();
    return set;
}

WaveformSet load_capture(const std::filesystem::path& path,
                         const std::map<std::string, int>& column_map) {
    WaveformSet all = load_capture(path);
    WaveformSet out;
    for (const auto& [label, col] : column_map) {
        if (col < 0 || static_cast<std::size_t>(col) >= all.channel_count())
            throw ParseError("column_map: column " + std::to_string(col) + " for label '" +
                             label + "' out of range (file has " +
                             std::to_string(all.channel_count()) + " columns)");
        Waveform w = all.channels[static_cast<std::size_t>(col)];
        w.label = label;
        out.channels.push_back(std::move(w));
    }
    out.validate();
    return out;
}

void save_capture(const WaveformSet& set, const std::filesystem::path& path) {
    set.validate();
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write capture file '" + path.string() + "'");
    const auto& spec = set.spec();

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", spec.system_freq_hz);
    out << "# system_freq_hz: " << buf << "\n";
    out << "# samples_per_cycle: " << spec.samples_per_cycle << "\n";
    out << "# labels: ";
    for (std::size_t c = 0; c < set.channel_count(); ++c)
        out << (c ? "," : "") << set.channels[c].label;
    out << "\n# units: ";
    for (std::size_t c = 0; c < set.channel_count(); ++c)
        out << (c ? "," : "") << to_string(set.channels[c].unit);
    out << "\n";

    const std::size_t n = set.n_samples();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < set.channel_count(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", set.channels[c].samples[k]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw ParseError("write failed for '" + path.string() + "'");
}

}  // namespace winr
