#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "winr/waveform.hpp"

namespace winr {

enum class Activation { Sine, Relu };
enum class ArchKind { Single, Double, Multi };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
std::string to_string(ArchKind k);
ArchKind arch_kind_from_string(const std::string& s);

// Default first-layer frequency scale. Over a [-1,1] window holding tens of
// cycles, the fundamental alone sits near 2*pi*cycles/2 in angular units, so
// unit-range first-layer weights need a scale of this order to span the
// band occupied by power waveforms.
inline constexpr double kDefaultOmega0 = 1000.0;

// Architecture descriptor: enough to size, count, and initialize a model.
struct ArchSpec {
    ArchKind kind = ArchKind::Double;
    int h1 = 30;        // hidden width (the only width for Single)
    int h2 = 50;        // second hidden width (unused for Single)
    int channels = 1;   // output channels; >= 2 required for Multi
    Activation activation = Activation::Sine;
    double omega0 = kDefaultOmega0;

    void validate() const;
};

/// Exact trainable-parameter count for the architecture (omega0 excluded:
/// it is a fixed hyperparameter, not trained).
std::int64_t param_count(const ArchSpec& arch);

/// Parameter count of `channels` independent double-layer models, the
/// alternative to one shared-trunk model.
std::int64_t param_count_separate(const ArchSpec& arch, int channels);

// Metadata a trained model carries so the signal can be reconstructed in
// original units: sampling geometry, grid length, channel labels, unit,
// and the RMS scale the targets were normalized by during fitting.
struct ModelMeta {
    SamplingSpec sampling;
    std::size_t n_samples = 0;
    std::vector<std::string> labels;
    SignalUnit unit = SignalUnit::Volts;
    double scale = 1.0;
};

// x(t) = sum_i a2[i] * sin(omega0 * a1[i] * t + b1[i]) + b2
struct SingleLayerModel {
    std::vector<double> a1, b1, a2;  // each of size h
    double b2 = 0.0;
    double omega0 = kDefaultOmega0;
    std::optional<ModelMeta> meta;

    int hidden() const { return static_cast<int>(a1.size()); }
    ArchSpec arch() const;
    void validate() const;
};

// z_i = act(omega0 * a1[i] * t + b1[i])
// y_j = act(sum_i a2[j*h1+i] * z_i + b2[j])
// x(t) = sum_j a3[j] * y_j + b3
// a2 is stored per second-layer neuron (j-major).
struct DoubleLayerModel {
    std::vector<double> a1, b1;  // h1
    std::vector<double> a2;      // h1*h2, j-major
    std::vector<double> b2, a3;  // h2
    double b3 = 0.0;
    double omega0 = kDefaultOmega0;
    Activation activation = Activation::Sine;
    std::optional<ModelMeta> meta;

    int h1() const { return static_cast<int>(a1.size()); }
    int h2() const { return static_cast<int>(b2.size()); }
    ArchSpec arch() const;
    void validate() const;
};

// Shared trunk (identical to DoubleLayerModel minus its output layer) plus
// per-channel output weights: x_c(t) = sum_j a3[c*h2+j] * y_j + b3[c].
struct MultiOutputModel {
    std::vector<double> a1, b1;  // h1
    std::vector<double> a2;      // h1*h2, j-major
    std::vector<double> b2;      // h2
    std::vector<double> a3;      // C*h2, channel-major
    std::vector<double> b3;      // C
    double omega0 = kDefaultOmega0;
    Activation activation = Activation::Sine;
    std::optional<ModelMeta> meta;

    int h1() const { return static_cast<int>(a1.size()); }
    int h2() const { return static_cast<int>(b2.size()); }
    int channels() const { return static_cast<int>(b3.size()); }
    ArchSpec arch() const;
    void validate() const;
};

using InrModel = std::variant<SingleLayerModel, DoubleLayerModel, MultiOutputModel>;

ArchSpec arch_of(const InrModel& model);
const std::optional<ModelMeta>& meta_of(const InrModel& model);
void set_meta(InrModel& model, ModelMeta meta);

// Deterministic forward evaluation at one time point.
double forward(const SingleLayerModel& m, double t);
double forward(const DoubleLayerModel& m, double t);
std::vector<double> forward(const MultiOutputModel& m, double t);

// Canonical parameter order: a1, b1, a2, b2, a3, b3. Identical to the
// serialized order and to the flat gradient layout.
template <typename F>
void for_each_param(SingleLayerModel& m, F&& f) {
    for (auto& v : m.a1) f(v);
    for (auto& v : m.b1) f(v);
    for (auto& v : m.a2) f(v);
    f(m.b2);
}
template <typename F>
void for_each_param(DoubleLayerModel& m, F&& f) {
    for (auto& v : m.a1) f(v);
    for (auto& v : m.b1) f(v);
    for (auto& v : m.a2) f(v);
    for (auto& v : m.b2) f(v);
    for (auto& v : m.a3) f(v);
    f(m.b3);
}
template <typename F>
void for_each_param(MultiOutputModel& m, F&& f) {
    for (auto& v : m.a1) f(v);
    for (auto& v : m.b1) f(v);
    for (auto& v : m.a2) f(v);
    for (auto& v : m.b2) f(v);
    for (auto& v : m.a3) f(v);
    for (auto& v : m.b3) f(v);
}
template <typename F>
void for_each_param(const SingleLayerModel& m, F&& f) {
    for (const auto& v : m.a1) f(v);
    for (const auto& v : m.b1) f(v);
    for (const auto& v : m.a2) f(v);
    f(m.b2);
}
template <typename F>
void for_each_param(const DoubleLayerModel& m, F&& f) {
    for (const auto& v : m.a1) f(v);
    for (const auto& v : m.b1) f(v);
    for (const auto& v : m.a2) f(v);
    for (const auto& v : m.b2) f(v);
    for (const auto& v : m.a3) f(v);
    f(m.b3);
}
template <typename F>
void for_each_param(const MultiOutputModel& m, F&& f) {
    for (const auto& v : m.a1) f(v);
    for (const auto& v : m.b1) f(v);
    for (const auto& v : m.a2) f(v);
    for (const auto& v : m.b2) f(v);
    for (const auto& v : m.a3) f(v);
    for (const auto& v : m.b3) f(v);
}
template <typename F>
void for_each_param(InrModel& m, F&& f) {
    std::visit([&](auto& concrete) { for_each_param(concrete, f); }, m);
}
template <typename F>
void for_each_param(const InrModel& m, F&& f) {
    std::visit([&](const auto& concrete) { for_each_param(concrete, f); }, m);
}

/// Number of scalars visited by for_each_param; must equal param_count.
std::int64_t enumerate_params(const InrModel& model);

// Reconstruction: forward evaluation over a grid, rescaled by meta.scale
// and packaged with meta's sampling information. Requires meta.
Waveform reconstruct(const SingleLayerModel& m, const TimeGrid& grid);
Waveform reconstruct(const DoubleLayerModel& m, const TimeGrid& grid);
WaveformSet reconstruct(const MultiOutputModel& m, const TimeGrid& grid);

/// Variant-level reconstruction; single-channel models yield a one-channel set.
WaveformSet reconstruct_set(const InrModel& model, const TimeGrid& grid);

}  // namespace winr
