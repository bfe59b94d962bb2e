// Benchmark: blocked OpenMP kernels vs the serial reference, across model
// sizes and thread counts. Prints per-epoch cost of a full loss+gradient
// pass over the default 62-cycle grid.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "winr/kernels.hpp"
#include "winr/train.hpp"

using namespace winr;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    fn();  // warmup
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

struct Case {
    const char* name;
    ArchSpec arch;
};

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    const std::size_t n = 7936;
    const TimeGrid grid = normalize_time(n);

    std::vector<Case> cases = {
        {"single(554)", {ArchKind::Single, 554, 0, 1, Activation::Sine, kDefaultOmega0}},
        {"double(30,50)", {ArchKind::Double, 30, 50, 1, Activation::Sine, kDefaultOmega0}},
        {"double(50,70)", {ArchKind::Double, 50, 70, 1, Activation::Sine, kDefaultOmega0}},
        {"multi(50,100,C=3)", {ArchKind::Multi, 50, 100, 3, Activation::Sine, kDefaultOmega0}},
    };

    std::printf("%-20s %14s %14s %8s\n", "model", "reference ms", "blocked ms", "speedup");
    for (const auto& c : cases) {
        InrModel model = init_model(c.arch, 7);
        const int C = c.arch.kind == ArchKind::Multi ? c.arch.channels : 1;
        std::vector<double> y(n * static_cast<std::size_t>(C));
        Rng rng(11);
        for (auto& v : y) v = rng.uniform(-1.0, 1.0);
        std::vector<double> grad(static_cast<std::size_t>(param_count(c.arch)));

        const double ref_ms = time_ms(std::max(1, reps / 10), [&] {
            std::visit(
                [&](const auto& m) { kernels::reference::mse_loss_grad(m, grid.t, y, grad); },
                model);
        });
        const double fast_ms = time_ms(reps, [&] {
            std::visit([&](const auto& m) { kernels::mse_loss_grad(m, grid.t, y, grad); }, model);
        });
        std::printf("%-20s %14.3f %14.3f %7.1fx\n", c.name, ref_ms, fast_ms, ref_ms / fast_ms);
    }

#ifdef _OPENMP
    std::printf("\nthreads scaling, double(50,70) loss+grad:\n");
    {
        ArchSpec a{ArchKind::Double, 50, 70, 1, Activation::Sine, kDefaultOmega0};
        InrModel model = init_model(a, 7);
        std::vector<double> y(n);
        Rng rng(11);
        for (auto& v : y) v = rng.uniform(-1.0, 1.0);
        std::vector<double> grad(static_cast<std::size_t>(param_count(a)));
        const int max_threads = omp_get_max_threads();
        for (int t = 1; t <= max_threads; t *= 2) {
            omp_set_num_threads(t);
            const double ms = time_ms(reps, [&] {
                std::visit([&](const auto& m) { kernels::mse_loss_grad(m, grid.t, y, grad); },
                           model);
            });
            std::printf("  %2d thread(s): %9.3f ms/epoch\n", t, ms);
        }
        omp_set_num_threads(max_threads);
    }
#endif
    return 0;
}
