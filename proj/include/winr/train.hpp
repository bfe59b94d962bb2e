#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "winr/model.hpp"

namespace winr {

enum class OptimizerKind { Adam, Sgd };

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    double learning_rate = 3e-3;
    int epochs = 2000;
    int batch_size = 0;  // 0 = full grid
    OptimizerKind optimizer = OptimizerKind::Adam;
    AdamParams adam;
    std::uint64_t seed = 0;
    double omega0 = kDefaultOmega0;
    int loss_report_stride = 10;
    double divergence_factor = 1e6;

    void validate() const;
};

struct TrainReport {
    double final_nmse_percent = 0.0;
    // (steps completed, full-grid loss) pairs; entry 0 is the initial loss.
    std::vector<std::pair<int, double>> loss_trace;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    int epochs_run = 0;
    double best_loss = 0.0;
    int best_epoch = 0;
};

// Gradient of the loss with respect to every trainable parameter, stored
// flat in canonical order (a1, b1, a2, b2, a3, b3) — the same order
// for_each_param visits and param_count counts.
struct Gradients {
    ArchSpec arch;
    std::vector<double> values;

    std::span<double> flat() { return values; }
    std::span<const double> flat() const { return values; }
};

// Training diverged; the partial report holds the trace up to the last
// finite loss.
class TrainingError : public NumericError {
public:
    TrainingError(const std::string& msg, TrainReport partial_report)
        : NumericError(msg), partial(std::move(partial_report)) {}
    TrainReport partial;
};

/// Architecture-dependent random initialization. First-layer weights and
/// biases are uniform on (-1/fan_in, 1/fan_in) with fan_in = 1 for the time
/// input; deeper layers are uniform on (-sqrt(6/fan_in)/omega0, +...).
InrModel init_model(const ArchSpec& arch, std::uint64_t seed);

/// Mean squared error between model output and target over the grid.
/// Multi-channel targets are averaged with equal channel weight.
double mse_loss(const InrModel& model, const WaveformSet& target, const TimeGrid& grid);

/// Exact analytic gradient of mse_loss.
Gradients backward(const InrModel& model, const WaveformSet& target, const TimeGrid& grid);

struct FitResult {
    InrModel model;
    TrainReport report;
};

/// Full fitting loop: init, normalize target to unit RMS, optimize, return
/// the best-loss iterate with reconstruction metadata attached.
/// Deterministic given (target, arch, config).
FitResult fit(const WaveformSet& target, const ArchSpec& arch, const TrainConfig& config);
FitResult fit(const Waveform& target, const ArchSpec& arch, const TrainConfig& config);

struct MultiRunStats {
    double mean_nmse = 0.0;
    double min_nmse = 0.0;
    double max_nmse = 0.0;
    double stddev_nmse = 0.0;
    std::vector<TrainReport> reports;       // successful runs, in seed order
    std::vector<std::string> run_errors;    // messages of failed runs
    FitResult best;                         // lowest final NMSE
};

/// Repeats fit with seeds config.seed + 0 .. runs-1. A failed run is
/// recorded, not fatal, unless every run fails.
MultiRunStats fit_multi_run(const WaveformSet& target, const ArchSpec& arch,
                            const TrainConfig& config, int runs);
MultiRunStats fit_multi_run(const Waveform& target, const ArchSpec& arch,
                            const TrainConfig& config, int runs);

}  // namespace winr
