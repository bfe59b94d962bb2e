#include "winr/model.hpp"

#include <cmath>

#include "winr/kernels.hpp"

namespace winr {

std::string to_string(Activation a) { return a == Activation::Sine ? "sine" : "relu"; }

Activation activation_from_string(const std::string& s) {
    if (s == "sine" || s == "sin") return Activation::Sine;
    if (s == "relu") return Activation::Relu;
    throw ParseError("unknown activation '" + s + "'");
}

std::string to_string(ArchKind k) {
    switch (k) {
        case ArchKind::Single: return "single";
        case ArchKind::Double: return "double";
        case ArchKind::Multi: return "multi";
    }
    return "?";
}

ArchKind arch_kind_from_string(const std::string& s) {
    if (s == "single") return ArchKind::Single;
    if (s == "double") return ArchKind::Double;
    if (s == "multi" || s == "combined") return ArchKind::Multi;
    throw ParseError("unknown architecture kind '" + s + "'");
}

void ArchSpec::validate() const {
    if (h1 < 1) throw InvalidInput("ArchSpec: h1 must be >= 1");
    if (kind != ArchKind::Single && h2 < 1)
        throw InvalidInput("ArchSpec: h2 must be >= 1");
    if (kind == ArchKind::Multi && channels < 2)
        throw InvalidInput("ArchSpec: multi-output model needs channels >= 2");
    if (kind != ArchKind::Multi && channels != 1)
        throw InvalidInput("ArchSpec: single/double models are single-channel");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw InvalidInput("ArchSpec: omega0 must be positive and finite");
    if (kind == ArchKind::Single && activation != Activation::Sine)
        throw InvalidInput("ArchSpec: relu variant exists only for double/multi models");
}

std::int64_t param_count(const ArchSpec& arch) {
    arch.validate();
    const std::int64_t h1 = arch.h1, h2 = arch.h2, C = arch.channels;
    switch (arch.kind) {
        case ArchKind::Single:
            return 3 * h1 + 1;
        case ArchKind::Double:
            return 2 * h1 + h1 * h2 + 2 * h2 + 1;
        case ArchKind::Multi:
            return 2 * h1 + h1 * h2 + h2 + C * (h2 + 1);
    }
    throw InvalidInput("ArchSpec: bad kind");
}

std::int64_t param_count_separate(const ArchSpec& arch, int channels) {
    if (channels < 1) throw InvalidInput("param_count_separate: channels must be >= 1");
    ArchSpec one = arch;
    one.kind = ArchKind::Double;
    one.channels = 1;
    return channels * param_count(one);
}

ArchSpec SingleLayerModel::arch() const {
    return {ArchKind::Single, hidden(), 0, 1, Activation::Sine, omega0};
}

ArchSpec DoubleLayerModel::arch() const {
    return {ArchKind::Double, h1(), h2(), 1, activation, omega0};
}

ArchSpec MultiOutputModel::arch() const {
    return {ArchKind::Multi, h1(), h2(), channels(), activation, omega0};
}

namespace {

void check_finite(const std::vector<double>& v, const char* name) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidInput(std::string("model field ") + name +
                                                  " has a non-finite value");
}

}  // namespace

void SingleLayerModel::validate() const {
    if (a1.empty()) throw InvalidInput("single-layer model: h must be >= 1");
    if (b1.size() != a1.size() || a2.size() != a1.size())
        throw InvalidInput("single-layer model: a1/b1/a2 sizes disagree");
    check_finite(a1, "a1");
    check_finite(b1, "b1");
    check_finite(a2, "a2");
    if (!std::isfinite(b2)) throw InvalidInput("model field b2 has a non-finite value");
    if (!(omega0 > 0.0)) throw InvalidInput("model omega0 must be positive");
}

void DoubleLayerModel::validate() const {
    const std::size_t n1 = a1.size(), n2 = b2.size();
    if (n1 == 0 || n2 == 0) throw InvalidInput("double-layer model: h1, h2 must be >= 1");
    if (b1.size() != n1) throw InvalidInput("double-layer model: b1 size != h1");
    if (a2.size() != n1 * n2) throw InvalidInput("double-layer model: a2 size != h1*h2");
    if (a3.size() != n2) throw InvalidInput("double-layer model: a3 size != h2");
    check_finite(a1, "a1");
    check_finite(b1, "b1");
    check_finite(a2, "a2");
    check_finite(b2, "b2");
    check_finite(a3, "a3");
    if (!std::isfinite(b3)) throw InvalidInput("model field b3 has a non-finite value");
    if (!(omega0 > 0.0)) throw InvalidInput("model omega0 must be positive");
}

void MultiOutputModel::validate() const {
    const std::size_t n1 = a1.size(), n2 = b2.size(), C = b3.size();
    if (n1 == 0 || n2 == 0) throw InvalidInput("multi-output model: h1, h2 must be >= 1");
    if (C < 2) throw InvalidInput("multi-output model: needs at least 2 channels");
    if (b1.size() != n1) throw InvalidInput("multi-output model: b1 size != h1");
    if (a2.size() != n1 * n2) throw InvalidInput("multi-output model: a2 size != h1*h2");
    if (a3.size() != n2 * C) throw InvalidInput("multi-output model: a3 size != h2*channels");
    check_finite(a1, "a1");
    check_finite(b1, "b1");
    check_finite(a2, "a2");
    check_finite(b2, "b2");
    check_finite(a3, "a3");
    check_finite(b3, "b3");
    if (!(omega0 > 0.0)) throw InvalidInput("model omega0 must be positive");
    if (meta && meta->labels.size() != C)
        throw InvalidInput("multi-output model: label count != channels");
}

ArchSpec arch_of(const InrModel& model) {
    return std::visit([](const auto& m) { return m.arch(); }, model);
}

const std::optional<ModelMeta>& meta_of(const InrModel& model) {
    return std::visit([](const auto& m) -> const std::optional<ModelMeta>& { return m.meta; },
                      model);
}

void set_meta(InrModel& model, ModelMeta meta) {
    std::visit([&](auto& m) { m.meta = std::move(meta); }, model);
}

double forward(const SingleLayerModel& m, double t) {
    double acc = m.b2;
    const int h = m.hidden();
    for (int i = 0; i < h; ++i)
        acc += m.a2[i] * std::sin(m.omega0 * m.a1[i] * t + m.b1[i]);
    return acc;
}

namespace {

inline double act(double x, Activation a) {
    return a == Activation::Sine ? std::sin(x) : (x > 0.0 ? x : 0.0);
}

// Shared trunk of double/multi models: y_j values for one t.
template <typename M>
void trunk_forward(const M& m, double t, std::vector<double>& y) {
    const int h1 = m.h1(), h2 = m.h2();
    y.resize(h2);
    std::vector<double> z(h1);
    for (int i = 0; i < h1; ++i)
        z[i] = act(m.omega0 * m.a1[i] * t + m.b1[i], m.activation);
    for (int j = 0; j < h2; ++j) {
        double u = m.b2[j];
        const double* col = &m.a2[static_cast<std::size_t>(j) * h1];
        for (int i = 0; i < h1; ++i) u += col[i] * z[i];
        y[j] = act(u, m.activation);
    }
}

}  // namespace

double forward(const DoubleLayerModel& m, double t) {
    std::vector<double> y;
    trunk_forward(m, t, y);
    double acc = m.b3;
    for (int j = 0; j < m.h2(); ++j) acc += m.a3[j] * y[j];
    return acc;
}

std::vector<double> forward(const MultiOutputModel& m, double t) {
    std::vector<double> y;
    trunk_forward(m, t, y);
    const int h2 = m.h2(), C = m.channels();
    std::vector<double> out(C);
    for (int c = 0; c < C; ++c) {
        double acc = m.b3[c];
        const double* w = &m.a3[static_cast<std::size_t>(c) * h2];
        for (int j = 0; j < h2; ++j) acc += w[j] * y[j];
        out[c] = acc;
    }
    return out;
}

std::int64_t enumerate_params(const InrModel& model) {
    std::int64_t n = 0;
    for_each_param(model, [&](const double&) { ++n; });
    return n;
}

namespace {

const ModelMeta& require_meta(const std::optional<ModelMeta>& meta) {
    if (!meta)
        throw InvalidInput("reconstruct: model carries no sampling metadata; "
                           "fit a capture or set meta explicitly");
    return *meta;
}

Waveform package_channel(std::vector<double>&& samples, const ModelMeta& meta,
                         std::size_t channel) {
    Waveform w;
    w.samples = std::move(samples);
    w.spec = meta.sampling;
    w.label = channel < meta.labels.size() ? meta.labels[channel] : "x";
    w.unit = meta.unit;
    return w;
}

}  // namespace

Waveform reconstruct(const SingleLayerModel& m, const TimeGrid& grid) {
    const ModelMeta& meta = require_meta(m.meta);
    std::vector<double> out(grid.size());
    kernels::forward_grid(m, grid.t, out);
    for (auto& v : out) v *= meta.scale;
    return package_channel(std::move(out), meta, 0);
}

Waveform reconstruct(const DoubleLayerModel& m, const TimeGrid& grid) {
    const ModelMeta& meta = require_meta(m.meta);
    std::vector<double> out(grid.size());
    kernels::forward_grid(m, grid.t, out);
    for (auto& v : out) v *= meta.scale;
    return package_channel(std::move(out), meta, 0);
}

WaveformSet reconstruct(const MultiOutputModel& m, const TimeGrid& grid) {
    const ModelMeta& meta = require_meta(m.meta);
    const std::size_t n = grid.size();
    const int C = m.channels();
    std::vector<double> out(n * C);
    kernels::forward_grid(m, grid.t, out);
    WaveformSet set;
    for (int c = 0; c < C; ++c) {
        std::vector<double> ch(out.begin() + static_cast<std::ptrdiff_t>(c * n),
                               out.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
        for (auto& v : ch) v *= meta.scale;
        set.channels.push_back(package_channel(std::move(ch), meta, static_cast<std::size_t>(c)));
    }
    return set;
}

WaveformSet reconstruct_set(const InrModel& model, const TimeGrid& grid) {
    return std::visit(
        [&](const auto& m) -> WaveformSet {
            using T = std::remove_cvref_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MultiOutputModel>) {
                return reconstruct(m, grid);
            } else {
                WaveformSet set;
                set.channels.push_back(reconstruct(m, grid));
                return set;
            }
        },
        model);
}

}  // namespace winr
