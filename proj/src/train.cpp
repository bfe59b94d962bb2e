#include "winr/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "winr/kernels.hpp"

namespace winr {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidInput("TrainConfig: learning_rate must be > 0");
    if (epochs < 1) throw InvalidInput("TrainConfig: epochs must be >= 1");
    if (batch_size < 0) throw InvalidInput("TrainConfig: batch_size must be >= 0");
    if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0 && adam.beta2 > 0.0 && adam.beta2 < 1.0))
        throw InvalidInput("TrainConfig: adam betas must lie in (0,1)");
    if (!(adam.eps > 0.0)) throw InvalidInput("TrainConfig: adam eps must be > 0");
    if (loss_report_stride < 1) throw InvalidInput("TrainConfig: loss_report_stride must be >= 1");
    if (!(omega0 > 0.0)) throw InvalidInput("TrainConfig: omega0 must be > 0");
    if (!(divergence_factor > 1.0)) throw InvalidInput("TrainConfig: divergence_factor must be > 1");
}

InrModel init_model(const ArchSpec& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    auto draw = [&](std::vector<double>& v, std::size_t n, double r) {
        v.resize(n);
        for (auto& x : v) x = rng.uniform(-r, r);
    };
    // First layer sees the raw time input (fan_in = 1); deeper layers use
    // the frequency-scale-compensated range so initial activations stay
    // well inside the sine's principal branch.
    const double r1 = 1.0;
    if (arch.kind == ArchKind::Single) {
        SingleLayerModel m;
        m.omega0 = arch.omega0;
        draw(m.a1, arch.h1, r1);
        draw(m.b1, arch.h1, r1);
        const double r2 = std::sqrt(6.0 / arch.h1) / arch.omega0;
        draw(m.a2, arch.h1, r2);
        m.b2 = rng.uniform(-r2, r2);
        return m;
    }
    if (arch.kind == ArchKind::Double) {
        DoubleLayerModel m;
        m.omega0 = arch.omega0;
        m.activation = arch.activation;
        draw(m.a1, arch.h1, r1);
        draw(m.b1, arch.h1, r1);
        const double r2 = std::sqrt(6.0 / arch.h1) / arch.omega0;
        draw(m.a2, static_cast<std::size_t>(arch.h1) * arch.h2, r2);
        draw(m.b2, arch.h2, r2);
        const double r3 = std::sqrt(6.0 / arch.h2) / arch.omega0;
        draw(m.a3, arch.h2, r3);
        m.b3 = rng.uniform(-r3, r3);
        return m;
    }
    MultiOutputModel m;
    m.omega0 = arch.omega0;
    m.activation = arch.activation;
    draw(m.a1, arch.h1, r1);
    draw(m.b1, arch.h1, r1);
    const double r2 = std::sqrt(6.0 / arch.h1) / arch.omega0;
    draw(m.a2, static_cast<std::size_t>(arch.h1) * arch.h2, r2);
    draw(m.b2, arch.h2, r2);
    const double r3 = std::sqrt(6.0 / arch.h2) / arch.omega0;
    draw(m.a3, static_cast<std::size_t>(arch.channels) * arch.h2, r3);
    draw(m.b3, arch.channels, r3);
    return m;
}

namespace {

// Channel-major flattening of a waveform set: y[c*n + k].
std::vector<double> flatten(const WaveformSet& set) {
    const std::size_t n = set.n_samples();
    std::vector<double> y;
    y.reserve(n * set.channel_count());
    for (const auto& ch : set.channels) y.insert(y.end(), ch.samples.begin(), ch.samples.end());
    return y;
}

void check_compat(const InrModel& model, const WaveformSet& target, const TimeGrid& grid) {
    target.validate();
    if (grid.size() != target.n_samples())
        throw InvalidInput("grid length " + std::to_string(grid.size()) +
                           " does not match target sample count " +
                           std::to_string(target.n_samples()));
    const ArchSpec arch = arch_of(model);
    const std::size_t want = arch.kind == ArchKind::Multi
                                 ? static_cast<std::size_t>(arch.channels)
                                 : 1;
    if (target.channel_count() != want)
        throw InvalidInput("model expects " + std::to_string(want) + " channel(s), target has " +
                           std::to_string(target.channel_count()));
}

double pooled_rms(const std::vector<double>& y) {
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s / static_cast<double>(y.size()));
}

}  // namespace

double mse_loss(const InrModel& model, const WaveformSet& target, const TimeGrid& grid) {
    check_compat(model, target, grid);
    const std::vector<double> y = flatten(target);
    return std::visit([&](const auto& m) { return kernels::mse_loss(m, grid.t, y); }, model);
}

Gradients backward(const InrModel& model, const WaveformSet& target, const TimeGrid& grid) {
    check_compat(model, target, grid);
    const std::vector<double> y = flatten(target);
    Gradients g;
    g.arch = arch_of(model);
    g.values.resize(static_cast<std::size_t>(param_count(g.arch)));
    std::visit([&](const auto& m) { kernels::mse_loss_grad(m, grid.t, y, g.values); }, model);
    for (std::size_t q = 0; q < g.values.size(); ++q) {
        if (!std::isfinite(g.values[q]))
            throw NumericError("backward: non-finite gradient at flat parameter index " +
                               std::to_string(q));
    }
    return g;
}

namespace {

struct Optimizer {
    const TrainConfig& cfg;
    std::vector<double> m, v;
    double beta1_t = 1.0, beta2_t = 1.0;

    explicit Optimizer(const TrainConfig& c, std::size_t nparams) : cfg(c) {
        if (cfg.optimizer == OptimizerKind::Adam) {
            m.assign(nparams, 0.0);
            v.assign(nparams, 0.0);
        }
    }

    void step(std::vector<double*>& params, const std::vector<double>& grad) {
        const std::size_t P = params.size();
        if (cfg.optimizer == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < P; ++i) *params[i] -= cfg.learning_rate * grad[i];
            return;
        }
        beta1_t *= cfg.adam.beta1;
        beta2_t *= cfg.adam.beta2;
        const double c1 = 1.0 / (1.0 - beta1_t);
        const double c2 = 1.0 / (1.0 - beta2_t);
        const double b1 = cfg.adam.beta1, b2 = cfg.adam.beta2;
        for (std::size_t i = 0; i < P; ++i) {
            const double g = grad[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            *params[i] -= cfg.learning_rate * (m[i] * c1) / (std::sqrt(v[i] * c2) + cfg.adam.eps);
        }
    }
};

std::vector<double*> collect_params(InrModel& model) {
    std::vector<double*> ptrs;
    for_each_param(model, [&](double& x) { ptrs.push_back(&x); });
    return ptrs;
}

double full_loss(const InrModel& model, std::span<const double> t, const std::vector<double>& y) {
    return std::visit([&](const auto& m) { return kernels::mse_loss(m, t, y); }, model);
}

double grad_step_loss(const InrModel& model, std::span<const double> t,
                      const std::vector<double>& y, std::vector<double>& grad) {
    return std::visit([&](const auto& m) { return kernels::mse_loss_grad(m, t, y, grad); },
                      model);
}

}  // namespace

FitResult fit(const WaveformSet& target, const ArchSpec& arch, const TrainConfig& config) {
    config.validate();
    ArchSpec effective = arch;
    effective.omega0 = config.omega0;
    effective.validate();
    const auto t_start = std::chrono::steady_clock::now();

    InrModel model = init_model(effective, config.seed);
    const TimeGrid grid = normalize_time(target.n_samples());
    check_compat(model, target, grid);

    // Unit-RMS target normalization; the scale is stored in model metadata
    // and undone by reconstruct(). NMSE is invariant to it.
    std::vector<double> y = flatten(target);
    double scale = pooled_rms(y);
    if (!(scale > 0.0)) scale = 1.0;
    for (auto& v : y) v /= scale;

    auto ptrs = collect_params(model);
    const std::size_t P = ptrs.size();
    std::vector<double> grad(P);
    Optimizer opt(config, P);

    InrModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    double loss0 = 0.0;
    TrainReport report;
    report.seed = config.seed;

    const bool full_grid = config.batch_size == 0 ||
                           static_cast<std::size_t>(config.batch_size) >= grid.size();

    auto record = [&](int steps_done, double loss) {
        report.loss_trace.emplace_back(steps_done, loss);
    };
    auto diverged = [&](double loss) {
        return !std::isfinite(loss) || loss > config.divergence_factor * std::max(loss0, 1e-300);
    };
    auto throw_divergence = [&](int epoch, double loss) {
        report.epochs_run = epoch;
        report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                                " (loss=" + std::to_string(loss) + ", initial=" +
                                std::to_string(loss0) + ")",
                            report);
    };

    if (full_grid) {
        for (int e = 0; e < config.epochs; ++e) {
            const double L = grad_step_loss(model, grid.t, y, grad);
            if (e == 0) loss0 = L;
            if (diverged(L)) throw_divergence(e, L);
            if (L < best_loss) {
                best_loss = L;
                best = model;
                best_epoch = e;
            }
            if (e % config.loss_report_stride == 0) record(e, L);
            opt.step(ptrs, grad);
        }
    } else {
        // Minibatch mode: one epoch shuffles the grid and steps over chunks.
        Rng shuffle_rng(config.seed ^ 0x5DEECE66DULL);
        std::vector<std::size_t> order(grid.size());
        std::iota(order.begin(), order.end(), 0);
        const std::size_t bs = static_cast<std::size_t>(config.batch_size);
        const ArchSpec spec = arch_of(model);
        const std::size_t C = spec.kind == ArchKind::Multi
                                  ? static_cast<std::size_t>(spec.channels)
                                  : 1;
        const std::size_t n = grid.size();
        std::vector<double> tb(bs), yb(bs * C);
        for (int e = 0; e < config.epochs; ++e) {
            // Fisher-Yates with the run's own stream.
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.below(i + 1)]);
            for (std::size_t pos = 0; pos < n; pos += bs) {
                const std::size_t nb = std::min(bs, n - pos);
                tb.resize(nb);
                yb.resize(nb * C);
                for (std::size_t q = 0; q < nb; ++q) {
                    const std::size_t k = order[pos + q];
                    tb[q] = grid.t[k];
                    for (std::size_t c = 0; c < C; ++c) yb[c * nb + q] = y[c * n + k];
                }
                grad_step_loss(model, tb, yb, grad);
                opt.step(ptrs, grad);
            }
            if (e % config.loss_report_stride == 0 || e == 0) {
                const double L = full_loss(model, grid.t, y);
                if (e == 0) loss0 = L;
                if (diverged(L)) throw_divergence(e, L);
                if (L < best_loss) {
                    best_loss = L;
                    best = model;
                    best_epoch = e;
                }
                record(e, L);
            }
        }
    }

    // Post-loop state is one step past the last evaluated loss.
    const double Lf = full_loss(model, grid.t, y);
    if (std::isfinite(Lf) && Lf < best_loss) {
        best_loss = Lf;
        best = model;
        best_epoch = config.epochs;
    }
    record(config.epochs, Lf);

    ModelMeta meta;
    meta.sampling = target.spec();
    meta.n_samples = target.n_samples();
    meta.labels = target.labels();
    meta.unit = target.channels.front().unit;
    meta.scale = scale;
    set_meta(best, meta);

    const WaveformSet recon = reconstruct_set(best, grid);
    const NmseSummary nm = nmse_summary(target, recon);

    report.final_nmse_percent = nm.mean;
    report.epochs_run = config.epochs;
    report.best_loss = best_loss;
    report.best_epoch = best_epoch;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(best), std::move(report)};
}

FitResult fit(const Waveform& target, const ArchSpec& arch, const TrainConfig& config) {
    WaveformSet set;
    set.channels.push_back(target);
    return fit(set, arch, config);
}

MultiRunStats fit_multi_run(const WaveformSet& target, const ArchSpec& arch,
                            const TrainConfig& config, int runs) {
    if (runs < 1) throw InvalidInput("fit_multi_run: runs must be >= 1");
    MultiRunStats stats;
    std::vector<double> nmse;
    double best_nmse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < runs; ++r) {
        TrainConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(r);
        try {
            FitResult res = fit(target, arch, c);
            nmse.push_back(res.report.final_nmse_percent);
            if (res.report.final_nmse_percent < best_nmse) {
                best_nmse = res.report.final_nmse_percent;
                stats.best = res;
            }
            stats.reports.push_back(std::move(res.report));
        } catch (const TrainingError& err) {
            stats.run_errors.push_back("seed " + std::to_string(c.seed) + ": " + err.what());
        }
    }
    if (nmse.empty())
        throw NumericError("fit_multi_run: all " + std::to_string(runs) + " runs failed; last: " +
                           (stats.run_errors.empty() ? "?" : stats.run_errors.back()));
    stats.mean_nmse = std::accumulate(nmse.begin(), nmse.end(), 0.0) /
                      static_cast<double>(nmse.size());
    stats.min_nmse = *std::min_element(nmse.begin(), nmse.end());
    stats.max_nmse = *std::max_element(nmse.begin(), nmse.end());
    if (nmse.size() > 1) {
        double ss = 0.0;
        for (double v : nmse) ss += (v - stats.mean_nmse) * (v - stats.mean_nmse);
        stats.stddev_nmse = std::sqrt(ss / static_cast<double>(nmse.size() - 1));
    }
    return stats;
}

MultiRunStats fit_multi_run(const Waveform& target, const ArchSpec& arch,
                            const TrainConfig& config, int runs) {
    WaveformSet set;
    set.channels.push_back(target);
    return fit_multi_run(set, arch, config, runs);
}

}  // namespace winr
