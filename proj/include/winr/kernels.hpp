#pragma once

#include <span>

#include "winr/model.hpp"

// Batched evaluation and gradient kernels.
//
// The production kernels process the grid in fixed-size blocks with the
// sample index innermost, so the hot loops vectorize, and OpenMP distributes
// blocks across threads. Per-block partial sums are combined serially in
// block order, which makes every result bit-identical regardless of thread
// count or schedule.
//
// kernels::reference holds plain per-sample serial implementations of the
// same contracts. They exist as the correctness baseline for tests and the
// benchmark and are not used by the trainer.
//
// Layouts:
//   targets/outputs for multi-channel models are channel-major: y[c*n + k].
//   gradients are flat in canonical parameter order (a1, b1, a2, b2, a3, b3).
namespace winr::kernels {

inline constexpr int kBlock = 128;

// Forward evaluation over a grid (no scale applied; raw network output).
void forward_grid(const SingleLayerModel& m, std::span<const double> t, std::span<double> out);
void forward_grid(const DoubleLayerModel& m, std::span<const double> t, std::span<double> out);
void forward_grid(const MultiOutputModel& m, std::span<const double> t, std::span<double> out);

// Mean squared error over samples (and channels for multi).
double mse_loss(const SingleLayerModel& m, std::span<const double> t, std::span<const double> y);
double mse_loss(const DoubleLayerModel& m, std::span<const double> t, std::span<const double> y);
double mse_loss(const MultiOutputModel& m, std::span<const double> t, std::span<const double> y);

// Loss plus its exact analytic gradient. `grad` must have param_count
// entries; it is overwritten.
double mse_loss_grad(const SingleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);
double mse_loss_grad(const DoubleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);
double mse_loss_grad(const MultiOutputModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);

namespace reference {

void forward_grid(const SingleLayerModel& m, std::span<const double> t, std::span<double> out);
void forward_grid(const DoubleLayerModel& m, std::span<const double> t, std::span<double> out);
void forward_grid(const MultiOutputModel& m, std::span<const double> t, std::span<double> out);

double mse_loss(const SingleLayerModel& m, std::span<const double> t, std::span<const double> y);
double mse_loss(const DoubleLayerModel& m, std::span<const double> t, std::span<const double> y);
double mse_loss(const MultiOutputModel& m, std::span<const double> t, std::span<const double> y);

double mse_loss_grad(const SingleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);
double mse_loss_grad(const DoubleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);
double mse_loss_grad(const MultiOutputModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad);

}  // namespace reference

}  // namespace winr::kernels
