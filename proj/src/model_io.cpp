#include "winr/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace winr {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_array(std::ostream& out, const char* name, const std::vector<double>& v) {
    out << name << ":";
    for (double x : v) out << ' ' << fmt(x);
    out << '\n';
}

void write_meta(std::ostream& out, const std::optional<ModelMeta>& meta) {
    out << "has_meta: " << (meta ? 1 : 0) << '\n';
    if (!meta) return;
    out << "meta_system_freq_hz: " << fmt(meta->sampling.system_freq_hz) << '\n';
    out << "meta_samples_per_cycle: " << meta->sampling.samples_per_cycle << '\n';
    out << "meta_n_samples: " << meta->n_samples << '\n';
    out << "meta_labels:";
    for (std::size_t i = 0; i < meta->labels.size(); ++i)
        out << (i ? "," : " ") << meta->labels[i];
    out << '\n';
    out << "meta_unit: " << to_string(meta->unit) << '\n';
    out << "meta_scale: " << fmt(meta->scale) << '\n';
}

struct Parsed {
    std::map<std::string, std::string> kv;
    std::vector<std::string> order;

    const std::string& need(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError("model file missing field '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return kv.count(key) != 0; }
};

double parse_double(const std::string& s, const std::string& field) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ParseError("model field " + field + ": bad number '" + s + "'");
    return v;
}

long parse_int(const std::string& s, const std::string& field) {
    long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw ParseError("model field " + field + ": bad integer '" + s + "'");
    return v;
}

std::vector<double> parse_array(const Parsed& p, const std::string& field,
                                std::size_t expected) {
    std::istringstream in(p.need(field));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, field));
    if (out.size() != expected)
        throw ParseError("model field " + field + ": expected " + std::to_string(expected) +
                         " values, got " + std::to_string(out.size()));
    return out;
}

std::optional<ModelMeta> parse_meta(const Parsed& p) {
    if (parse_int(p.need("has_meta"), "has_meta") == 0) return std::nullopt;
    ModelMeta m;
    m.sampling.system_freq_hz = parse_double(p.need("meta_system_freq_hz"), "meta_system_freq_hz");
    m.sampling.samples_per_cycle =
        static_cast<int>(parse_int(p.need("meta_samples_per_cycle"), "meta_samples_per_cycle"));
    m.n_samples = static_cast<std::size_t>(parse_int(p.need("meta_n_samples"), "meta_n_samples"));
    std::istringstream labels(p.need("meta_labels"));
    std::string tok;
    while (std::getline(labels, tok, ',')) m.labels.push_back(tok);
    m.unit = unit_from_string(p.need("meta_unit"));
    m.scale = parse_double(p.need("meta_scale"), "meta_scale");
    return m;
}

}  // namespace

void save_model(const InrModel& model, const std::filesystem::path& path) {
    std::visit([](const auto& m) { m.validate(); }, model);
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write model file '" + path.string() + "'");
    out << "winr-model format_version: " << kFormatVersion << '\n';

    std::visit(
        [&](const auto& m) {
            using T = std::remove_cvref_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleLayerModel>) {
                out << "kind: single\nactivation: sine\n";
                out << "omega0: " << fmt(m.omega0) << '\n';
                out << "h: " << m.hidden() << '\n';
                write_meta(out, m.meta);
                write_array(out, "a1", m.a1);
                write_array(out, "b1", m.b1);
                write_array(out, "a2", m.a2);
                out << "b2: " << fmt(m.b2) << '\n';
            } else if constexpr (std::is_same_v<T, DoubleLayerModel>) {
                out << "kind: double\nactivation: " << to_string(m.activation) << '\n';
                out << "omega0: " << fmt(m.omega0) << '\n';
                out << "h1: " << m.h1() << "\nh2: " << m.h2() << '\n';
                write_meta(out, m.meta);
                write_array(out, "a1", m.a1);
                write_array(out, "b1", m.b1);
                write_array(out, "a2", m.a2);
                write_array(out, "b2", m.b2);
                write_array(out, "a3", m.a3);
                out << "b3: " << fmt(m.b3) << '\n';
            } else {
                out << "kind: multi\nactivation: " << to_string(m.activation) << '\n';
                out << "omega0: " << fmt(m.omega0) << '\n';
                out << "h1: " << m.h1() << "\nh2: " << m.h2() << '\n';
                out << "channels: " << m.channels() << '\n';
                write_meta(out, m.meta);
                write_array(out, "a1", m.a1);
                write_array(out, "b1", m.b1);
                write_array(out, "a2", m.a2);
                write_array(out, "b2", m.b2);
                write_array(out, "a3", m.a3);
                write_array(out, "b3", m.b3);
            }
        },
        model);
    if (!out) throw ParseError("write failed for model file '" + path.string() + "'");
}

InrModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line) || line.rfind("winr-model format_version:", 0) != 0)
        throw ParseError("'" + path.string() + "' is not a winr model file");
    const long version = parse_int(line.substr(line.find(':') + 1).substr(1), "format_version");
    if (version != kFormatVersion)
        throw ParseError("unsupported model format_version " + std::to_string(version));

    Parsed p;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("model file line without key: '" + line + "'");
        std::string key = line.substr(0, colon);
        std::string val = line.substr(colon + 1);
        if (!val.empty() && val.front() == ' ') val.erase(0, 1);
        p.kv[key] = std::move(val);
        p.order.push_back(key);
    }

    const std::string kind = p.need("kind");
    const double omega0 = parse_double(p.need("omega0"), "omega0");
    const Activation act = activation_from_string(p.need("activation"));
    InrModel model;
    if (kind == "single") {
        SingleLayerModel m;
        m.omega0 = omega0;
        const auto h = static_cast<std::size_t>(parse_int(p.need("h"), "h"));
        if (h < 1) throw ParseError("model field h must be >= 1");
        m.a1 = parse_array(p, "a1", h);
        m.b1 = parse_array(p, "b1", h);
        m.a2 = parse_array(p, "a2", h);
        m.b2 = parse_double(p.need("b2"), "b2");
        m.meta = parse_meta(p);
        model = std::move(m);
    } else if (kind == "double") {
        DoubleLayerModel m;
        m.omega0 = omega0;
        m.activation = act;
        const auto h1 = static_cast<std::size_t>(parse_int(p.need("h1"), "h1"));
        const auto h2 = static_cast<std::size_t>(parse_int(p.need("h2"), "h2"));
        if (h1 < 1 || h2 < 1) throw ParseError("model fields h1/h2 must be >= 1");
        m.a1 = parse_array(p, "a1", h1);
        m.b1 = parse_array(p, "b1", h1);
        m.a2 = parse_array(p, "a2", h1 * h2);
        m.b2 = parse_array(p, "b2", h2);
        m.a3 = parse_array(p, "a3", h2);
        m.b3 = parse_double(p.need("b3"), "b3");
        m.meta = parse_meta(p);
        model = std::move(m);
    } else if (kind == "multi") {
        MultiOutputModel m;
        m.omega0 = omega0;
        m.activation = act;
        const auto h1 = static_cast<std::size_t>(parse_int(p.need("h1"), "h1"));
        const auto h2 = static_cast<std::size_t>(parse_int(p.need("h2"), "h2"));
        const auto C = static_cast<std::size_t>(parse_int(p.need("channels"), "channels"));
        if (h1 < 1 || h2 < 1) throw ParseError("model fields h1/h2 must be >= 1");
        if (C < 2) throw ParseError("model field channels must be >= 2");
        m.a1 = parse_array(p, "a1", h1);
        m.b1 = parse_array(p, "b1", h1);
        m.a2 = parse_array(p, "a2", h1 * h2);
        m.b2 = parse_array(p, "b2", h2);
        m.a3 = parse_array(p, "a3", C * h2);
        m.b3 = parse_array(p, "b3", C);
        m.meta = parse_meta(p);
        model = std::move(m);
    } else {
        throw ParseError("model file kind '" + kind + "' not recognized");
    }
    std::visit([](const auto& m) { m.validate(); }, model);
    return model;
}

}  // namespace winr
