// winr: sinusoidal-network waveform modeling toolkit.
//
// Subcommands: synth, fit, eval, spectrum, sweep, compare.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical/training
// error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "winr/config_io.hpp"
#include "winr/model_io.hpp"
#include "winr/report.hpp"
#include "winr/spectrum.hpp"
#include "winr/stats.hpp"
#include "winr/synth.hpp"
#include "winr/train.hpp"

namespace fs = std::filesystem;
using namespace winr;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt_pct(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f%%", v);
    return buf;
}

// Shared training flags: a config file provides the base, flags override.
struct TrainFlags {
    std::string config_path;
    std::optional<double> lr, omega0;
    std::optional<int> epochs, batch, stride;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> optimizer;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON training config file");
        cmd->add_option("--lr", lr, "learning rate");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--batch", batch, "minibatch size (0 = full grid)");
        cmd->add_option("--seed", seed, "base RNG seed");
        cmd->add_option("--omega0", omega0, "first-layer frequency scale");
        cmd->add_option("--optimizer", optimizer, "adam|sgd");
        cmd->add_option("--loss-stride", stride, "epochs between loss trace entries");
    }

    TrainConfig resolve() const {
        TrainConfig c = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
        if (lr) c.learning_rate = *lr;
        if (epochs) c.epochs = *epochs;
        if (batch) c.batch_size = *batch;
        if (seed) c.seed = *seed;
        if (omega0) c.omega0 = *omega0;
        if (stride) c.loss_report_stride = *stride;
        if (optimizer) {
            if (*optimizer == "adam")
                c.optimizer = OptimizerKind::Adam;
            else if (*optimizer == "sgd")
                c.optimizer = OptimizerKind::Sgd;
            else
                throw InvalidInput("--optimizer must be adam or sgd");
        }
        c.validate();
        return c;
    }

    void describe(std::map<std::string, std::string>& out, const TrainConfig& c) const {
        out["learning_rate"] = std::to_string(c.learning_rate);
        out["epochs"] = std::to_string(c.epochs);
        out["batch_size"] = std::to_string(c.batch_size);
        out["optimizer"] = c.optimizer == OptimizerKind::Adam ? "adam" : "sgd";
        out["seed"] = std::to_string(c.seed);
        out["omega0"] = std::to_string(c.omega0);
    }
};

void dump_two_column(const fs::path& path, const std::vector<double>& x,
                     const std::vector<double>& y, const char* header) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << "# " << header << "\n";
    char buf[80];
    for (std::size_t k = 0; k < x.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g %.10g\n", x[k], y[k]);
        out << buf;
    }
}

std::vector<double> time_axis(const WaveformSet& set) {
    std::vector<double> t(set.n_samples());
    const double fs = set.spec().sample_rate_hz();
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k) / fs;
    return t;
}

// ----------------------------------------------------------------- synth

int cmd_synth(const std::string& cls, int suite, std::uint64_t seed, const std::string& out,
              int cycles, int spc, int channels, double event_freq, double event_amp,
              double event_start, double event_duration, double mod_depth, double f_sideband,
              double sag_factor, double noise, double fund_amp, const std::string& unit,
              bool duration_given) {
    Timer timer;
    RunReport rep;
    rep.command = "synth";

    if (suite > 0) {
        fs::path dir = out.empty() ? fs::path("suite") : fs::path(out);
        fs::create_directories(dir);
        auto events = gen_suite(suite, seed);
        for (std::size_t i = 0; i < events.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "event_%03zu", i);
            const fs::path cap = dir / (std::string(name) + ".csv");
            const fs::path side = dir / (std::string(name) + ".spec.json");
            save_capture(events[i].second, cap);
            save_synth_spec(events[i].first, side);
            rep.artifacts.push_back(cap.string());
            rep.artifacts.push_back(side.string());
        }
        rep.resolved_config["suite"] = std::to_string(suite);
        rep.resolved_config["seed"] = std::to_string(seed);
        rep.wall_time_s = timer.seconds();
        save_report(rep, dir / "synth_report.json");
        std::printf("wrote %d captures to %s\n", suite, dir.string().c_str());
        return 0;
    }

    SynthSpec spec;
    spec.event_class = event_class_from_string(cls);
    spec.capture_cycles = cycles;
    spec.sampling.samples_per_cycle = spc;
    spec.channels = channels;
    spec.event_freq_hz = event_freq;
    spec.event_amplitude = event_amp;
    spec.event_start_cycle = event_start;
    spec.event_duration_cycles = event_duration;
    spec.modulation_depth = mod_depth;
    spec.f_sideband_hz = f_sideband;
    spec.sag_factor = sag_factor;
    spec.noise_std = noise;
    spec.fundamental_amplitude = fund_amp;
    spec.unit = unit_from_string(unit);
    spec.seed = seed;
    // Sustained classes default to "until the end of the capture".
    if (!duration_given && spec.event_class == EventClass::SingleMode)
        spec.event_duration_cycles = 0.0;
    if (!duration_given && spec.event_class == EventClass::StepSag)
        spec.event_duration_cycles = 5.0;

    const fs::path cap = out.empty() ? fs::path("capture.csv") : fs::path(out);
    WaveformSet set = gen(spec);
    save_capture(set, cap);
    fs::path side = cap;
    side.replace_extension(".spec.json");
    save_synth_spec(spec, side);
    std::printf("wrote %zu x %zu capture to %s (event class %s)\n", set.channel_count(),
                set.n_samples(), cap.string().c_str(), to_string(spec.event_class).c_str());
    return 0;
}

// ------------------------------------------------------------------- fit

ArchSpec arch_from_flags(const std::string& arch, int h, int h1, int h2, int channels,
                         const std::string& activation, double omega0) {
    ArchSpec a;
    a.activation = activation_from_string(activation);
    a.omega0 = omega0;
    if (arch == "single") {
        a.kind = ArchKind::Single;
        a.h1 = h;
        a.h2 = 0;
        a.channels = 1;
    } else if (arch == "double" || arch == "separate") {
        a.kind = ArchKind::Double;
        a.h1 = h1;
        a.h2 = h2;
        a.channels = 1;
    } else if (arch == "combined" || arch == "multi") {
        a.kind = ArchKind::Multi;
        a.h1 = h1;
        a.h2 = h2;
        a.channels = channels;
    } else {
        throw InvalidInput("--arch must be single, double, separate, or combined");
    }
    return a;
}

int cmd_fit(const std::string& input, const std::string& arch, int h, int h1, int h2,
            int runs, const TrainFlags& tf, const std::string& activation,
            const std::string& model_out, const std::string& report_out, int channel) {
    Timer timer;
    WaveformSet target = load_capture(input);
    TrainConfig config = tf.resolve();

    RunReport rep;
    rep.command = "fit";
    rep.input_hashes[input] = fnv1a64_file(input);
    tf.describe(rep.resolved_config, config);
    rep.resolved_config["arch"] = arch;
    rep.resolved_config["runs"] = std::to_string(runs);

    if (arch == "separate") {
        // One independent double-layer model per channel; the report counts
        // the whole trio.
        ArchSpec a = arch_from_flags("double", h, h1, h2, 1, activation, config.omega0);
        const std::int64_t params =
            param_count_separate(a, static_cast<int>(target.channel_count()));
        double nmse_sum = 0;
        std::vector<double> per_channel;
        for (std::size_t c = 0; c < target.channel_count(); ++c) {
            MultiRunStats stats = fit_multi_run(target.channels[c], a, config, runs);
            per_channel.push_back(stats.best.report.final_nmse_percent);
            nmse_sum += stats.mean_nmse;
            if (!model_out.empty()) {
                fs::path p(model_out);
                fs::path dir = p.parent_path();
                const std::string stem = p.stem().string();
                fs::path outp =
                    dir / (stem + "_" + target.channels[c].label + p.extension().string());
                save_model(stats.best.model, outp);
                rep.artifacts.push_back(outp.string());
            }
        }
        rep.arch_summary = "separate " + std::to_string(target.channel_count()) + "x double(" +
                           std::to_string(h1) + "," + std::to_string(h2) + ")";
        rep.nmse_mean_percent = nmse_sum / static_cast<double>(target.channel_count());
        rep.nmse_per_channel = per_channel;
        rep.set_compression(static_cast<std::int64_t>(target.n_samples()) *
                                static_cast<std::int64_t>(target.channel_count()),
                            params);
        std::printf("separate trio: params=%lld  mean NMSE=%s  compression=%.2fx\n",
                    static_cast<long long>(params), fmt_pct(rep.nmse_mean_percent).c_str(),
                    rep.compression_ratio);
    } else {
        ArchSpec a = arch_from_flags(arch, h, h1, h2, static_cast<int>(target.channel_count()),
                                     activation, config.omega0);
        WaveformSet fit_target = target;
        if (a.kind != ArchKind::Multi && target.channel_count() > 1) {
            if (channel < 0 || static_cast<std::size_t>(channel) >= target.channel_count())
                throw InvalidInput("--channel out of range for this capture");
            fit_target = WaveformSet{{target.channels[static_cast<std::size_t>(channel)]}};
        }
        MultiRunStats stats = fit_multi_run(fit_target, a, config, runs);
        const std::int64_t params = param_count(a);
        rep.arch_summary = to_string(a.kind) + "(" + std::to_string(a.h1) +
                           (a.kind == ArchKind::Single ? "" : "," + std::to_string(a.h2)) + ")";
        rep.nmse_mean_percent = stats.mean_nmse;
        rep.nmse_min_percent = stats.min_nmse;
        rep.nmse_max_percent = stats.max_nmse;
        rep.nmse_stddev_percent = stats.stddev_nmse;
        rep.set_compression(static_cast<std::int64_t>(fit_target.n_samples()) *
                                static_cast<std::int64_t>(fit_target.channel_count()),
                            params);
        for (const auto& msg : stats.run_errors)
            std::fprintf(stderr, "warning: failed run: %s\n", msg.c_str());
        if (!model_out.empty()) {
            save_model(stats.best.model, model_out);
            rep.artifacts.push_back(model_out);
        }
        std::printf("%s: params=%lld  NMSE mean=%s best=%s  compression=%.2fx\n",
                    rep.arch_summary.c_str(), static_cast<long long>(params),
                    fmt_pct(stats.mean_nmse).c_str(), fmt_pct(stats.min_nmse).c_str(),
                    rep.compression_ratio);
    }

    rep.wall_time_s = timer.seconds();
    if (!report_out.empty()) save_report(rep, report_out);
    return 0;
}

// ------------------------------------------------------------------ eval

int cmd_eval(const std::string& model_path, const std::string& input,
             const std::string& report_out, const std::string& dump_prefix) {
    Timer timer;
    InrModel model = load_model(model_path);
    WaveformSet raw = load_capture(input);

    const ArchSpec a = arch_of(model);
    const std::size_t want = a.kind == ArchKind::Multi ? static_cast<std::size_t>(a.channels) : 1;
    if (raw.channel_count() != want)
        throw InvalidInput("model expects " + std::to_string(want) + " channel(s), capture has " +
                           std::to_string(raw.channel_count()));

    const TimeGrid grid = normalize_time(raw.n_samples());
    WaveformSet recon = reconstruct_set(model, grid);
    NmseSummary nm = nmse_summary(raw, recon);

    RunReport rep;
    rep.command = "eval";
    rep.input_hashes[input] = fnv1a64_file(input);
    rep.input_hashes[model_path] = fnv1a64_file(model_path);
    rep.arch_summary = to_string(a.kind);
    rep.nmse_per_channel = nm.per_channel;
    rep.nmse_mean_percent = nm.mean;
    rep.set_compression(static_cast<std::int64_t>(raw.n_samples()) *
                            static_cast<std::int64_t>(raw.channel_count()),
                        param_count(a));

    for (std::size_t c = 0; c < raw.channel_count(); ++c)
        std::printf("channel %-6s NMSE = %s\n", raw.channels[c].label.c_str(),
                    fmt_pct(nm.per_channel[c]).c_str());
    std::printf("overall mean NMSE = %s  (pooled %s), compression %.2fx\n",
                fmt_pct(nm.mean).c_str(), fmt_pct(nm.pooled).c_str(), rep.compression_ratio);

    if (!dump_prefix.empty()) {
        const auto t = time_axis(raw);
        for (std::size_t c = 0; c < raw.channel_count(); ++c) {
            const auto& label = raw.channels[c].label;
            dump_two_column(dump_prefix + "_" + label + "_raw.txt", t, raw.channels[c].samples,
                            "time_s value");
            dump_two_column(dump_prefix + "_" + label + "_recon.txt", t,
                            recon.channels[c].samples, "time_s value");
            rep.artifacts.push_back(dump_prefix + "_" + label + "_raw.txt");
            rep.artifacts.push_back(dump_prefix + "_" + label + "_recon.txt");
        }
    }
    rep.wall_time_s = timer.seconds();
    if (!report_out.empty()) save_report(rep, report_out);
    return 0;
}

// -------------------------------------------------------------- spectrum

int cmd_spectrum(const std::string& input, const std::string& model_path,
                 const std::string& mode, double carrier, bool differential, int pre_cycles,
                 int channel, const std::string& out_prefix, const std::string& report_out) {
    Timer timer;
    WaveformSet raw = load_capture(input);
    if (channel < 0 || static_cast<std::size_t>(channel) >= raw.channel_count())
        throw InvalidInput("--channel out of range");
    const Waveform& ch = raw.channels[static_cast<std::size_t>(channel)];

    RunReport rep;
    rep.command = "spectrum";
    rep.input_hashes[input] = fnv1a64_file(input);

    auto print_dominant = [&](const char* tag, const DominantMode& d) {
        std::printf("%s: f_dominant = %.3f Hz (magnitude %.5g%s)\n", tag, d.freq_hz, d.magnitude,
                    d.significant ? "" : ", below noise floor");
    };
    auto print_sidebands = [&](const char* tag, const std::vector<SidebandPair>& ps) {
        if (ps.empty()) {
            std::printf("%s: no sideband pair detected\n", tag);
            return;
        }
        for (const auto& p : ps)
            std::printf("%s: sidebands %.3f / %.3f Hz  f_sideband = %.3f Hz\n", tag,
                        p.lower.freq_hz, p.upper.freq_hz, p.f_sideband_hz);
    };

    if (model_path.empty()) {
        const Waveform sig = differential ? differential_waveform(ch, pre_cycles) : ch;
        Spectrum s = dft_magnitude(sig);
        if (mode == "dominant") {
            const DominantMode d = dominant_frequency(s);
            print_dominant("capture", d);
            rep.spectral["f_dominant_hz"] = d.freq_hz;
        } else if (mode == "sidebands") {
            const auto ps = detect_sidebands(s, carrier);
            print_sidebands("capture", ps);
            if (!ps.empty()) rep.spectral["f_sideband_hz"] = ps.front().f_sideband_hz;
        }
        if (!out_prefix.empty()) {
            save_spectrum(s, out_prefix + "_raw_spectrum.txt");
            rep.artifacts.push_back(out_prefix + "_raw_spectrum.txt");
        }
    } else {
        InrModel model = load_model(model_path);
        rep.input_hashes[model_path] = fnv1a64_file(model_path);
        SpectrumReportOptions opts;
        opts.differential = differential;
        opts.pre_event_cycles = pre_cycles;
        opts.channel = channel;
        if (mode == "sidebands") opts.sideband_carrier_hz = carrier;
        const SpectrumReport sr =
            spectrum_report(ch, model, normalize_time(raw.n_samples()), opts);
        if (mode == "dominant") {
            print_dominant("raw", sr.raw_dominant);
            print_dominant("reconstruction", sr.recon_dominant);
            rep.spectral["raw_f_dominant_hz"] = sr.raw_dominant.freq_hz;
            rep.spectral["recon_f_dominant_hz"] = sr.recon_dominant.freq_hz;
        } else if (mode == "sidebands") {
            print_sidebands("raw", sr.raw_sidebands);
            print_sidebands("reconstruction", sr.recon_sidebands);
            if (!sr.raw_sidebands.empty())
                rep.spectral["raw_f_sideband_hz"] = sr.raw_sidebands.front().f_sideband_hz;
            if (!sr.recon_sidebands.empty())
                rep.spectral["recon_f_sideband_hz"] = sr.recon_sidebands.front().f_sideband_hz;
        }
        rep.spectral["spectral_nmse_percent"] = sr.spectral_nmse_percent;
        std::printf("spectral NMSE = %s\n", fmt_pct(sr.spectral_nmse_percent).c_str());
        if (!out_prefix.empty()) {
            save_spectrum(sr.raw, out_prefix + "_raw_spectrum.txt");
            save_spectrum(sr.reconstruction, out_prefix + "_recon_spectrum.txt");
            rep.artifacts.push_back(out_prefix + "_raw_spectrum.txt");
            rep.artifacts.push_back(out_prefix + "_recon_spectrum.txt");
        }
    }
    rep.wall_time_s = timer.seconds();
    if (!report_out.empty()) save_report(rep, report_out);
    return 0;
}

// ----------------------------------------------------------------- sweep

struct SweepCell {
    int h1, h2;
    std::int64_t params;
    double mean_nmse, std_nmse;
};

int cmd_sweep(const std::vector<int>& h1_grid, const std::vector<int>& h2_grid, int suite,
              std::uint64_t suite_seed, int runs, const TrainFlags& tf,
              const std::string& table_out, const std::string& report_out, bool check_trend) {
    Timer timer;
    if (h1_grid.empty() || h2_grid.empty()) throw InvalidInput("sweep: empty grid");
    TrainConfig base = tf.resolve();

    auto events = gen_suite(suite, suite_seed);
    // One channel per event (phase A): the sweep measures per-waveform
    // modeling accuracy.
    std::vector<Waveform> targets;
    for (auto& [spec, set] : events) targets.push_back(set.channels.front());

    struct Job {
        std::size_t cell, event;
        int run;
    };
    std::vector<Job> jobs;
    const std::size_t ncells = h1_grid.size() * h2_grid.size();
    for (std::size_t cell = 0; cell < ncells; ++cell)
        for (std::size_t e = 0; e < targets.size(); ++e)
            for (int r = 0; r < runs; ++r) jobs.push_back({cell, e, r});

    std::vector<double> nmse(jobs.size(), -1.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(jobs.size()); ++q) {
        const Job& job = jobs[static_cast<std::size_t>(q)];
        ArchSpec a;
        a.kind = ArchKind::Double;
        a.h1 = h1_grid[job.cell / h2_grid.size()];
        a.h2 = h2_grid[job.cell % h2_grid.size()];
        a.omega0 = base.omega0;
        TrainConfig c = base;
        c.seed = base.seed + static_cast<std::uint64_t>(job.run);
        try {
            FitResult res = fit(targets[job.event], a, c);
            nmse[static_cast<std::size_t>(q)] = res.report.final_nmse_percent;
        } catch (const TrainingError&) {
            // recorded as a missing value
        }
    }

    std::vector<SweepCell> cells;
    for (std::size_t cell = 0; cell < ncells; ++cell) {
        const int h1 = h1_grid[cell / h2_grid.size()];
        const int h2 = h2_grid[cell % h2_grid.size()];
        std::vector<double> vals;
        for (std::size_t q = 0; q < jobs.size(); ++q)
            if (jobs[q].cell == cell && nmse[q] >= 0.0) vals.push_back(nmse[q]);
        if (vals.empty())
            throw NumericError("sweep: every run failed for cell (" + std::to_string(h1) + "," +
                               std::to_string(h2) + ")");
        double mean = 0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double sd = 0;
        if (vals.size() > 1) {
            for (double v : vals) sd += (v - mean) * (v - mean);
            sd = std::sqrt(sd / static_cast<double>(vals.size() - 1));
        }
        ArchSpec a{ArchKind::Double, h1, h2, 1, Activation::Sine, base.omega0};
        cells.push_back({h1, h2, param_count(a), mean, sd});
    }

    std::printf("%4s %4s %8s %12s %12s\n", "h1", "h2", "params", "mean_nmse", "std");
    for (const auto& c : cells)
        std::printf("%4d %4d %8lld %12.4f %12.4f\n", c.h1, c.h2,
                    static_cast<long long>(c.params), c.mean_nmse, c.std_nmse);

    if (!table_out.empty()) {
        std::ofstream out(table_out);
        if (!out) throw ParseError("cannot write table '" + table_out + "'");
        out << "h1 h2 params mean_nmse std_nmse\n";
        for (const auto& c : cells)
            out << c.h1 << ' ' << c.h2 << ' ' << c.params << ' ' << c.mean_nmse << ' '
                << c.std_nmse << '\n';
    }

    RunReport rep;
    rep.command = "sweep";
    tf.describe(rep.resolved_config, base);
    rep.resolved_config["suite"] = std::to_string(suite);
    rep.resolved_config["runs"] = std::to_string(runs);
    int trend_failures = 0;
    if (check_trend) {
        for (int h1 : h1_grid) {
            std::vector<double> xs, ys;
            for (const auto& c : cells)
                if (c.h1 == h1) {
                    xs.push_back(c.h2);
                    ys.push_back(c.mean_nmse);
                }
            const double rho = spearman(xs, ys);
            std::printf("h1=%d: spearman(h2, mean_nmse) = %+.3f %s\n", h1, rho,
                        rho < 0 ? "(decreasing)" : "(NOT decreasing)");
            rep.spectral["spearman_h1_" + std::to_string(h1)] = rho;
            if (rho >= 0) ++trend_failures;
        }
    }
    rep.wall_time_s = timer.seconds();
    if (!report_out.empty()) save_report(rep, report_out);
    return trend_failures == 0 ? 0 : 3;
}

// --------------------------------------------------------------- compare

int cmd_compare(const std::string& input, int suite, std::uint64_t suite_seed,
                const std::vector<std::int64_t>& budgets, int runs, const TrainFlags& tf,
                const std::string& report_out) {
    Timer timer;
    TrainConfig base = tf.resolve();
    if (budgets.empty()) throw InvalidInput("compare: need at least one --budget");

    std::vector<WaveformSet> captures;
    if (!input.empty()) {
        captures.push_back(load_capture(input));
    } else {
        for (auto& [spec, set] : gen_suite(suite, suite_seed)) captures.push_back(std::move(set));
    }
    for (const auto& cap : captures)
        if (cap.channel_count() != 3) throw InvalidInput("compare expects 3-channel captures");

    RunReport rep;
    rep.command = "compare";
    tf.describe(rep.resolved_config, base);

    const ArchSpec probe{ArchKind::Double, 1, 1, 1, Activation::Sine, base.omega0};
    const std::int64_t min_sep = 3 * param_count(probe);
    std::printf("%10s | %20s %10s | %20s %10s | ratio\n", "budget", "separate", "nmse",
                "combined", "nmse");

    bool all_ok = true;
    for (std::int64_t budget : budgets) {
        if (budget < min_sep)
            throw InvalidInput("budget " + std::to_string(budget) +
                               " below minimum separate-trio size " + std::to_string(min_sep));
        const BudgetMatch sep = closest_separate(budget, 3);
        const BudgetMatch comb = closest_combined(budget, 3);

        struct Job {
            std::size_t event;
            int run;
        };
        std::vector<Job> jobs;
        for (std::size_t e = 0; e < captures.size(); ++e)
            for (int r = 0; r < runs; ++r) jobs.push_back({e, r});

        std::vector<double> sep_nmse(jobs.size(), -1.0), comb_nmse(jobs.size(), -1.0);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(jobs.size()); ++q) {
            const Job& job = jobs[static_cast<std::size_t>(q)];
            TrainConfig c = base;
            c.seed = base.seed + static_cast<std::uint64_t>(job.run);
            try {
                double acc = 0;
                for (int ch = 0; ch < 3; ++ch) {
                    ArchSpec a{ArchKind::Double, sep.h1, sep.h2, 1, Activation::Sine, c.omega0};
                    acc += fit(captures[job.event].channels[static_cast<std::size_t>(ch)], a, c)
                               .report.final_nmse_percent;
                }
                sep_nmse[static_cast<std::size_t>(q)] = acc / 3.0;
                ArchSpec a{ArchKind::Multi, comb.h1, comb.h2, 3, Activation::Sine, c.omega0};
                comb_nmse[static_cast<std::size_t>(q)] =
                    fit(captures[job.event], a, c).report.final_nmse_percent;
            } catch (const TrainingError&) {
                // failure markers stay at -1
            }
        }

        double sep_mean = 0, comb_mean = 0;
        int ns = 0, nc = 0;
        for (std::size_t q = 0; q < jobs.size(); ++q) {
            if (sep_nmse[q] >= 0) {
                sep_mean += sep_nmse[q];
                ++ns;
            }
            if (comb_nmse[q] >= 0) {
                comb_mean += comb_nmse[q];
                ++nc;
            }
        }
        const std::string tag = "budget_" + std::to_string(budget);
        if (ns == 0 || nc == 0) {
            std::printf("%10lld | all runs failed\n", static_cast<long long>(budget));
            rep.spectral[tag + "_failed"] = 1.0;
            all_ok = false;
            continue;
        }
        sep_mean /= ns;
        comb_mean /= nc;
        char sep_desc[48], comb_desc[48];
        std::snprintf(sep_desc, sizeof sep_desc, "3x(%d,%d)=%lld", sep.h1, sep.h2,
                      static_cast<long long>(sep.count));
        std::snprintf(comb_desc, sizeof comb_desc, "(%d,%d)=%lld", comb.h1, comb.h2,
                      static_cast<long long>(comb.count));
        std::printf("%10lld | %20s %9.4f%% | %20s %9.4f%% | %.3f\n",
                    static_cast<long long>(budget), sep_desc, sep_mean, comb_desc, comb_mean,
                    comb_mean / sep_mean);
        rep.spectral[tag + "_separate_nmse"] = sep_mean;
        rep.spectral[tag + "_combined_nmse"] = comb_mean;
        rep.spectral[tag + "_separate_params"] = static_cast<double>(sep.count);
        rep.spectral[tag + "_combined_params"] = static_cast<double>(comb.count);
    }

    rep.wall_time_s = timer.seconds();
    if (!report_out.empty()) save_report(rep, report_out);
    return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* workers = std::getenv("WINR_WORKERS")) {
        const int w = std::atoi(workers);
        if (w > 0) omp_set_num_threads(w);
    }
#endif

    CLI::App app{"winr: sinusoidal-network waveform modeling toolkit"};
    app.require_subcommand(1);

    // synth
    std::string sy_class = "subcycle_oscillation", sy_out, sy_unit = "volts";
    int sy_suite = 0, sy_cycles = 62, sy_spc = 128, sy_channels = 3;
    std::uint64_t sy_seed = 0;
    double sy_ef = 450.0, sy_ea = 2.0, sy_start = 30.0, sy_dur = 2.0, sy_mod = 0.3, sy_fsb = 5.0,
           sy_sag = 0.6, sy_noise = 0.005, sy_fund = 1.0;
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic event captures");
    synth_cmd->add_option("--class", sy_class,
                          "steady|subcycle_oscillation|single_mode|dual_mode_modulated|step_sag");
    synth_cmd->add_option("--suite", sy_suite, "generate N randomized events instead");
    synth_cmd->add_option("--seed", sy_seed, "generator seed");
    synth_cmd->add_option("--out", sy_out, "output capture file (or directory for --suite)");
    synth_cmd->add_option("--cycles", sy_cycles, "capture length in cycles");
    synth_cmd->add_option("--spc", sy_spc, "samples per cycle");
    synth_cmd->add_option("--channels", sy_channels, "channel count");
    synth_cmd->add_option("--event-freq", sy_ef, "event frequency, Hz");
    synth_cmd->add_option("--event-amp", sy_ea, "event amplitude, x fundamental");
    synth_cmd->add_option("--event-start", sy_start, "event start cycle");
    auto* dur_opt =
        synth_cmd->add_option("--event-duration", sy_dur, "event duration, cycles (0 = to end)");
    synth_cmd->add_option("--mod-depth", sy_mod, "dual-mode modulation depth");
    synth_cmd->add_option("--f-sideband", sy_fsb, "dual-mode modulation frequency, Hz");
    synth_cmd->add_option("--sag-factor", sy_sag, "step_sag amplitude factor");
    synth_cmd->add_option("--noise", sy_noise, "Gaussian noise std");
    synth_cmd->add_option("--fund-amp", sy_fund, "fundamental amplitude");
    synth_cmd->add_option("--unit", sy_unit, "volts|amperes");

    // fit
    std::string ft_input, ft_arch = "double", ft_act = "sine", ft_model, ft_report;
    int ft_h = 554, ft_h1 = 30, ft_h2 = 50, ft_runs = 1, ft_channel = 0;
    TrainFlags ft_tf;
    auto* fit_cmd = app.add_subcommand("fit", "fit a model to a capture");
    fit_cmd->set_help_flag("--help", "print help");  // frees -h for the width flag
    fit_cmd->add_option("--input", ft_input, "capture file")->required();
    fit_cmd->add_option("--arch", ft_arch, "single|double|separate|combined");
    fit_cmd->add_option("-h,--h", ft_h, "hidden width (single)");
    fit_cmd->add_option("--h1", ft_h1, "first hidden width");
    fit_cmd->add_option("--h2", ft_h2, "second hidden width");
    fit_cmd->add_option("--runs", ft_runs, "training runs (seed+0..runs-1)");
    fit_cmd->add_option("--activation", ft_act, "sine|relu");
    fit_cmd->add_option("--model-out", ft_model, "write best model here");
    fit_cmd->add_option("--report", ft_report, "write JSON run report here");
    fit_cmd->add_option("--channel", ft_channel,
                        "channel index for single/double on multichannel captures");
    ft_tf.attach(fit_cmd);

    // eval
    std::string ev_model, ev_input, ev_report, ev_dump;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model against a capture");
    eval_cmd->add_option("--model", ev_model, "model file")->required();
    eval_cmd->add_option("--input", ev_input, "capture file")->required();
    eval_cmd->add_option("--report", ev_report, "write JSON run report here");
    eval_cmd->add_option("--dump-recon", ev_dump, "two-column dump file prefix");

    // spectrum
    std::string sp_input, sp_model, sp_mode = "dominant", sp_prefix, sp_report;
    double sp_carrier = 60.0;
    bool sp_diff = false;
    int sp_pre = 5, sp_channel = 0;
    auto* spec_cmd = app.add_subcommand("spectrum", "DFT analysis of captures and models");
    spec_cmd->add_option("--input", sp_input, "capture file")->required();
    spec_cmd->add_option("--model", sp_model, "model file (adds reconstruction comparison)");
    spec_cmd->add_option("--mode", sp_mode, "dominant|sidebands|none");
    spec_cmd->add_option("--carrier", sp_carrier, "carrier frequency for sideband pairing, Hz");
    spec_cmd->add_flag("--differential", sp_diff, "analyze differential waveforms");
    spec_cmd->add_option("--pre-cycles", sp_pre, "pre-event cycles for the differential baseline");
    spec_cmd->add_option("--channel", sp_channel, "channel to analyze");
    spec_cmd->add_option("--out-prefix", sp_prefix, "spectrum text file prefix");
    spec_cmd->add_option("--report", sp_report, "write JSON run report here");

    // sweep
    std::vector<int> sw_h1{10, 30, 50}, sw_h2{10, 30, 50, 70};
    int sw_suite = 3, sw_runs = 3;
    std::uint64_t sw_suite_seed = 1;
    std::string sw_table, sw_report;
    bool sw_trend = false;
    TrainFlags sw_tf;
    auto* sweep_cmd = app.add_subcommand("sweep", "h1 x h2 sensitivity sweep");
    sweep_cmd->add_option("--h1-grid", sw_h1, "first-layer widths");
    sweep_cmd->add_option("--h2-grid", sw_h2, "second-layer widths");
    sweep_cmd->add_option("--suite", sw_suite, "synthetic events per cell");
    sweep_cmd->add_option("--suite-seed", sw_suite_seed, "suite generator seed");
    sweep_cmd->add_option("--runs", sw_runs, "fits per (cell, event)");
    sweep_cmd->add_option("--table", sw_table, "long-format output table path");
    sweep_cmd->add_option("--report", sw_report, "write JSON run report here");
    sweep_cmd->add_flag("--check-trend", sw_trend, "verify NMSE decreases with h2 per h1 row");
    sw_tf.attach(sweep_cmd);

    // compare
    std::string cp_input, cp_report;
    int cp_suite = 5, cp_runs = 5;
    std::uint64_t cp_suite_seed = 1;
    std::vector<std::int64_t> cp_budgets{1663, 2703, 5503};
    TrainFlags cp_tf;
    auto* comp_cmd = app.add_subcommand("compare", "separate trio vs combined model at budgets");
    comp_cmd->add_option("--input", cp_input, "3-channel capture (default: synthetic suite)");
    comp_cmd->add_option("--suite", cp_suite, "synthetic events when no --input");
    comp_cmd->add_option("--suite-seed", cp_suite_seed, "suite generator seed");
    comp_cmd->add_option("--budgets", cp_budgets, "parameter budget ladder");
    comp_cmd->add_option("--runs", cp_runs, "fits per (event, budget)");
    comp_cmd->add_option("--report", cp_report, "write JSON run report here");
    cp_tf.attach(comp_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed())
            return cmd_synth(sy_class, sy_suite, sy_seed, sy_out, sy_cycles, sy_spc, sy_channels,
                             sy_ef, sy_ea, sy_start, sy_dur, sy_mod, sy_fsb, sy_sag, sy_noise,
                             sy_fund, sy_unit, dur_opt->count() > 0);
        if (fit_cmd->parsed())
            return cmd_fit(ft_input, ft_arch, ft_h, ft_h1, ft_h2, ft_runs, ft_tf, ft_act,
                           ft_model, ft_report, ft_channel);
        if (eval_cmd->parsed()) return cmd_eval(ev_model, ev_input, ev_report, ev_dump);
        if (spec_cmd->parsed())
            return cmd_spectrum(sp_input, sp_model, sp_mode, sp_carrier, sp_diff, sp_pre,
                                sp_channel, sp_prefix, sp_report);
        if (sweep_cmd->parsed())
            return cmd_sweep(sw_h1, sw_h2, sw_suite, sw_suite_seed, sw_runs, sw_tf, sw_table,
                             sw_report, sw_trend);
        if (comp_cmd->parsed())
            return cmd_compare(cp_input, cp_suite, cp_suite_seed, cp_budgets, cp_runs, cp_tf,
                               cp_report);
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
