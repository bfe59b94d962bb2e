#include "winr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Compiled with fast-math and native SIMD (see CMakeLists): the sin/cos
// passes below lower to libmvec vector calls and the k-loops vectorize.
// All reductions are per-block with a serial block-order combine, so results
// are bit-identical for any thread count and schedule.

namespace winr::kernels {

namespace {

constexpr int B = kBlock;

// Per-thread scratch reused across calls.
struct Arena {
    std::vector<double> arg1, z, c1;    // first layer, h1*B
    std::vector<double> arg2, su, cu;   // second layer, h2*B
    std::vector<double> p, r;           // C*B
    std::vector<double> dy, dz;         // h2*B, h1*B

    void size_single(int h1) {
        arg1.resize(static_cast<std::size_t>(h1) * B);
        z.resize(static_cast<std::size_t>(h1) * B);
        c1.resize(static_cast<std::size_t>(h1) * B);
        p.resize(B);
        r.resize(B);
    }
    void size_deep(int h1, int h2, int C) {
        size_single(h1);
        arg2.resize(static_cast<std::size_t>(h2) * B);
        su.resize(static_cast<std::size_t>(h2) * B);
        cu.resize(static_cast<std::size_t>(h2) * B);
        p.resize(static_cast<std::size_t>(C) * B);
        r.resize(static_cast<std::size_t>(C) * B);
        dy.resize(static_cast<std::size_t>(h2) * B);
        dz.resize(static_cast<std::size_t>(h1) * B);
    }
};

Arena& arena() {
    static thread_local Arena a;
    return a;
}

inline void sin_pass(const double* __restrict in, double* __restrict out, int n) {
    for (int q = 0; q < n; ++q) out[q] = std::sin(in[q]);
}
inline void cos_pass(const double* __restrict in, double* __restrict out, int n) {
    for (int q = 0; q < n; ++q) out[q] = std::cos(in[q]);
}
inline void relu_pass(const double* __restrict in, double* __restrict out, int n) {
    for (int q = 0; q < n; ++q) out[q] = in[q] > 0.0 ? in[q] : 0.0;
}
inline void relu_deriv_pass(const double* __restrict in, double* __restrict out, int n) {
    for (int q = 0; q < n; ++q) out[q] = in[q] > 0.0 ? 1.0 : 0.0;
}

// First-layer activations for one block: z (and optionally its derivative
// factor c1) for each hidden unit over nb samples.
void first_layer(const double* __restrict a1, const double* __restrict b1, int h1,
                 double omega0, bool sine, const double* __restrict tb, int nb,
                 Arena& s, bool want_deriv) {
    for (int i = 0; i < h1; ++i) {
        const double w = omega0 * a1[i], c = b1[i];
        double* __restrict ai = &s.arg1[static_cast<std::size_t>(i) * B];
        for (int k = 0; k < nb; ++k) ai[k] = w * tb[k] + c;
    }
    const int tot = h1 * B;
    if (sine) {
        sin_pass(s.arg1.data(), s.z.data(), tot);
        if (want_deriv) cos_pass(s.arg1.data(), s.c1.data(), tot);
    } else {
        relu_pass(s.arg1.data(), s.z.data(), tot);
        if (want_deriv) relu_deriv_pass(s.arg1.data(), s.c1.data(), tot);
    }
}

// Second-layer activations: su = act(u), cu = act'(u) where
// u_j = sum_i a2[j*h1+i] z_i + b2[j].
void second_layer(const double* __restrict a2, const double* __restrict b2, int h1, int h2,
                  bool sine, int nb, Arena& s, bool want_deriv) {
    for (int j = 0; j < h2; ++j) {
        double* __restrict uj = &s.arg2[static_cast<std::size_t>(j) * B];
        const double bj = b2[j];
        for (int k = 0; k < nb; ++k) uj[k] = bj;
        const double* __restrict col = &a2[static_cast<std::size_t>(j) * h1];
        for (int i = 0; i < h1; ++i) {
            const double w = col[i];
            const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
            for (int k = 0; k < nb; ++k) uj[k] += w * zi[k];
        }
    }
    const int tot = h2 * B;
    if (sine) {
        sin_pass(s.arg2.data(), s.su.data(), tot);
        if (want_deriv) cos_pass(s.arg2.data(), s.cu.data(), tot);
    } else {
        relu_pass(s.arg2.data(), s.su.data(), tot);
        if (want_deriv) relu_deriv_pass(s.arg2.data(), s.cu.data(), tot);
    }
}

// ---------------------------------------------------------------- single

// Flat gradient layout for the single model: a1[h], b1[h], a2[h], b2.
double block_grad_single(const SingleLayerModel& m, const double* tb, const double* yb,
                         int nb, double invN, double* __restrict g) {
    Arena& s = arena();
    const int h = m.hidden();
    s.size_single(h);
    first_layer(m.a1.data(), m.b1.data(), h, m.omega0, true, tb, nb, s, true);

    double* __restrict p = s.p.data();
    for (int k = 0; k < nb; ++k) p[k] = m.b2;
    for (int i = 0; i < h; ++i) {
        const double w = m.a2[i];
        const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
        for (int k = 0; k < nb; ++k) p[k] += w * zi[k];
    }

    double loss = 0.0, gb2 = 0.0;
    double* __restrict r = s.r.data();
    for (int k = 0; k < nb; ++k) {
        const double e = p[k] - yb[k];
        loss += e * e;
        r[k] = 2.0 * e * invN;
        gb2 += r[k];
    }
    g[3 * h] += gb2;

    double* __restrict ga1 = g;
    double* __restrict gb1 = g + h;
    double* __restrict ga2 = g + 2 * h;
    for (int i = 0; i < h; ++i) {
        const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
        const double* __restrict ci = &s.c1[static_cast<std::size_t>(i) * B];
        const double w = m.a2[i];
        double s2 = 0.0, s1 = 0.0, sb = 0.0;
        for (int k = 0; k < nb; ++k) {
            s2 += r[k] * zi[k];
            const double d = r[k] * w * ci[k];
            s1 += d * tb[k];
            sb += d;
        }
        ga2[i] += s2;
        ga1[i] += s1 * m.omega0;
        gb1[i] += sb;
    }
    return loss;
}

double block_loss_single(const SingleLayerModel& m, const double* tb, const double* yb,
                         int nb) {
    Arena& s = arena();
    const int h = m.hidden();
    s.size_single(h);
    first_layer(m.a1.data(), m.b1.data(), h, m.omega0, true, tb, nb, s, false);
    double* __restrict p = s.p.data();
    for (int k = 0; k < nb; ++k) p[k] = m.b2;
    for (int i = 0; i < h; ++i) {
        const double w = m.a2[i];
        const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
        for (int k = 0; k < nb; ++k) p[k] += w * zi[k];
    }
    double loss = 0.0;
    for (int k = 0; k < nb; ++k) {
        const double e = p[k] - yb[k];
        loss += e * e;
    }
    return loss;
}

void block_forward_single(const SingleLayerModel& m, const double* tb, int nb,
                          double* __restrict out) {
    Arena& s = arena();
    const int h = m.hidden();
    s.size_single(h);
    first_layer(m.a1.data(), m.b1.data(), h, m.omega0, true, tb, nb, s, false);
    for (int k = 0; k < nb; ++k) out[k] = m.b2;
    for (int i = 0; i < h; ++i) {
        const double w = m.a2[i];
        const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
        for (int k = 0; k < nb; ++k) out[k] += w * zi[k];
    }
}

// ------------------------------------------------------------ double/multi
//
// The combined trunk code serves both: the double model is the C == 1 case.
// Flat gradient layout: a1[h1], b1[h1], a2[h1*h2], b2[h2], a3[C*h2], b3[C].

struct DeepView {
    const double *a1, *b1, *a2, *b2, *a3, *b3;
    int h1, h2, C;
    double omega0;
    bool sine;
    std::size_t n;  // grid length (for channel-major target indexing)
};

template <typename M>
DeepView deep_view(const M& m, std::size_t n);

template <>
DeepView deep_view(const DoubleLayerModel& m, std::size_t n) {
    return {m.a1.data(), m.b1.data(), m.a2.data(), m.b2.data(), m.a3.data(), &m.b3,
            m.h1(), m.h2(), 1, m.omega0, m.activation == Activation::Sine, n};
}

template <>
DeepView deep_view(const MultiOutputModel& m, std::size_t n) {
    return {m.a1.data(), m.b1.data(), m.a2.data(), m.b2.data(), m.a3.data(), m.b3.data(),
            m.h1(), m.h2(), m.channels(), m.omega0, m.activation == Activation::Sine, n};
}

double block_grad_deep(const DeepView& v, const double* tb, const double* y, std::size_t k0,
                       int nb, double invN, double* __restrict g) {
    Arena& s = arena();
    const int h1 = v.h1, h2 = v.h2, C = v.C;
    s.size_deep(h1, h2, C);
    first_layer(v.a1, v.b1, h1, v.omega0, v.sine, tb, nb, s, true);
    second_layer(v.a2, v.b2, h1, h2, v.sine, nb, s, true);

    double* __restrict ga1 = g;
    double* __restrict gb1 = g + h1;
    double* __restrict ga2 = g + 2 * h1;
    double* __restrict gb2 = ga2 + static_cast<std::size_t>(h1) * h2;
    double* __restrict ga3 = gb2 + h2;
    double* __restrict gb3 = ga3 + static_cast<std::size_t>(C) * h2;

    double loss = 0.0;
    std::fill(s.dy.begin(), s.dy.begin() + static_cast<std::size_t>(h2) * B, 0.0);
    for (int c = 0; c < C; ++c) {
        double* __restrict p = &s.p[static_cast<std::size_t>(c) * B];
        const double* __restrict a3c = &v.a3[static_cast<std::size_t>(c) * h2];
        for (int k = 0; k < nb; ++k) p[k] = v.b3[c];
        for (int j = 0; j < h2; ++j) {
            const double w = a3c[j];
            const double* __restrict uj = &s.su[static_cast<std::size_t>(j) * B];
            for (int k = 0; k < nb; ++k) p[k] += w * uj[k];
        }
        double* __restrict r = &s.r[static_cast<std::size_t>(c) * B];
        const double* __restrict yc = y + static_cast<std::size_t>(c) * v.n + k0;
        double sb3 = 0.0;
        for (int k = 0; k < nb; ++k) {
            const double e = p[k] - yc[k];
            loss += e * e;
            r[k] = 2.0 * e * invN;
            sb3 += r[k];
        }
        gb3[c] += sb3;
        double* __restrict ga3c = &ga3[static_cast<std::size_t>(c) * h2];
        for (int j = 0; j < h2; ++j) {
            const double* __restrict uj = &s.su[static_cast<std::size_t>(j) * B];
            const double* __restrict cj = &s.cu[static_cast<std::size_t>(j) * B];
            double* __restrict dj = &s.dy[static_cast<std::size_t>(j) * B];
            const double w = a3c[j];
            double s3 = 0.0;
            for (int k = 0; k < nb; ++k) {
                s3 += r[k] * uj[k];
                dj[k] += r[k] * w * cj[k];  // accumulated across channels
            }
            ga3c[j] += s3;
        }
    }

    std::fill(s.dz.begin(), s.dz.begin() + static_cast<std::size_t>(h1) * B, 0.0);
    for (int j = 0; j < h2; ++j) {
        const double* __restrict dj = &s.dy[static_cast<std::size_t>(j) * B];
        double sb2 = 0.0;
        for (int k = 0; k < nb; ++k) sb2 += dj[k];
        gb2[j] += sb2;
        const double* __restrict col = &v.a2[static_cast<std::size_t>(j) * h1];
        double* __restrict gcol = &ga2[static_cast<std::size_t>(j) * h1];
        for (int i = 0; i < h1; ++i) {
            const double* __restrict zi = &s.z[static_cast<std::size_t>(i) * B];
            double* __restrict dzi = &s.dz[static_cast<std::size_t>(i) * B];
            const double w = col[i];
            double sg = 0.0;
            for (int k = 0; k < nb; ++k) {
                sg += dj[k] * zi[k];
                dzi[k] += w * dj[k];
            }
            gcol[i] += sg;
        }
    }

    for (int i = 0; i < h1; ++i) {
        const double* __restrict dzi = &s.dz[static_cast<std::size_t>(i) * B];
        const double* __restrict ci = &s.c1[static_cast<std::size_t>(i) * B];
        double s1 = 0.0, sb = 0.0;
        for (int k = 0; k < nb; ++k) {
            const double d = dzi[k] * ci[k];
            s1 += d * tb[k];
            sb += d;
        }
        ga1[i] += s1 * v.omega0;
        gb1[i] += sb;
    }
    return loss;
}

double block_loss_deep(const DeepView& v, const double* tb, const double* y, std::size_t k0,
                       int nb) {
    Arena& s = arena();
    const int h1 = v.h1, h2 = v.h2, C = v.C;
    s.size_deep(h1, h2, C);
    first_layer(v.a1, v.b1, h1, v.omega0, v.sine, tb, nb, s, false);
    second_layer(v.a2, v.b2, h1, h2, v.sine, nb, s, false);
    double loss = 0.0;
    for (int c = 0; c < C; ++c) {
        double* __restrict p = s.p.data();
        const double* __restrict a3c = &v.a3[static_cast<std::size_t>(c) * h2];
        for (int k = 0; k < nb; ++k) p[k] = v.b3[c];
        for (int j = 0; j < h2; ++j) {
            const double w = a3c[j];
            const double* __restrict uj = &s.su[static_cast<std::size_t>(j) * B];
            for (int k = 0; k < nb; ++k) p[k] += w * uj[k];
        }
        const double* __restrict yc = y + static_cast<std::size_t>(c) * v.n + k0;
        for (int k = 0; k < nb; ++k) {
            const double e = p[k] - yc[k];
            loss += e * e;
        }
    }
    return loss;
}

void block_forward_deep(const DeepView& v, const double* tb, std::size_t k0, int nb,
                        double* __restrict out) {
    Arena& s = arena();
    const int h1 = v.h1, h2 = v.h2, C = v.C;
    s.size_deep(h1, h2, C);
    first_layer(v.a1, v.b1, h1, v.omega0, v.sine, tb, nb, s, false);
    second_layer(v.a2, v.b2, h1, h2, v.sine, nb, s, false);
    for (int c = 0; c < C; ++c) {
        double* __restrict p = out + static_cast<std::size_t>(c) * v.n + k0;
        const double* __restrict a3c = &v.a3[static_cast<std::size_t>(c) * h2];
        for (int k = 0; k < nb; ++k) p[k] = v.b3[c];
        for (int j = 0; j < h2; ++j) {
            const double w = a3c[j];
            const double* __restrict uj = &s.su[static_cast<std::size_t>(j) * B];
            for (int k = 0; k < nb; ++k) p[k] += w * uj[k];
        }
    }
}

// Per-block partial gradient storage, combined serially in block order.
struct Partials {
    std::vector<double> grad;   // nblocks * nparams
    std::vector<double> loss;   // nblocks

    void size(std::size_t nblocks, std::size_t nparams) {
        grad.assign(nblocks * nparams, 0.0);
        loss.assign(nblocks, 0.0);
    }
};

Partials& partials() {
    static thread_local Partials p;
    return p;
}

}  // namespace

// -------------------------------------------------------------- public API

void forward_grid(const SingleLayerModel& m, std::span<const double> t, std::span<double> out) {
    const std::size_t n = t.size();
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((n + B - 1) / B);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t k0 = static_cast<std::size_t>(bi) * B;
        const int nb = static_cast<int>(std::min<std::size_t>(B, n - k0));
        block_forward_single(m, t.data() + k0, nb, out.data() + k0);
    }
}

void forward_grid(const DoubleLayerModel& m, std::span<const double> t, std::span<double> out) {
    const std::size_t n = t.size();
    const DeepView v = deep_view(m, n);
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((n + B - 1) / B);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t k0 = static_cast<std::size_t>(bi) * B;
        const int nb = static_cast<int>(std::min<std::size_t>(B, n - k0));
        block_forward_deep(v, t.data() + k0, k0, nb, out.data());
    }
}

void forward_grid(const MultiOutputModel& m, std::span<const double> t, std::span<double> out) {
    const std::size_t n = t.size();
    const DeepView v = deep_view(m, n);
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((n + B - 1) / B);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t k0 = static_cast<std::size_t>(bi) * B;
        const int nb = static_cast<int>(std::min<std::size_t>(B, n - k0));
        block_forward_deep(v, t.data() + k0, k0, nb, out.data());
    }
}

namespace {

template <typename BlockLoss>
double run_loss_blocks(std::size_t n, BlockLoss&& block, double invN) {
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((n + B - 1) / B);
    Partials& ps = partials();
    ps.loss.assign(static_cast<std::size_t>(nblocks), 0.0);
    auto* loss_data = ps.loss.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t k0 = static_cast<std::size_t>(bi) * B;
        const int nb = static_cast<int>(std::min<std::size_t>(B, n - k0));
        loss_data[bi] = block(k0, nb);
    }
    double loss = 0.0;
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) loss += ps.loss[static_cast<std::size_t>(bi)];
    return loss * invN;
}

template <typename BlockGrad>
double run_grad_blocks(std::size_t n, std::size_t nparams, std::span<double> grad,
                       BlockGrad&& block, double invN) {
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>((n + B - 1) / B);
    Partials& ps = partials();
    ps.size(static_cast<std::size_t>(nblocks), nparams);
    auto* grad_data = ps.grad.data();
    auto* loss_data = ps.loss.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t k0 = static_cast<std::size_t>(bi) * B;
        const int nb = static_cast<int>(std::min<std::size_t>(B, n - k0));
        loss_data[bi] = block(k0, nb, grad_data + static_cast<std::size_t>(bi) * nparams);
    }
    double loss = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::ptrdiff_t bi = 0; bi < nblocks; ++bi) {
        loss += ps.loss[static_cast<std::size_t>(bi)];
        const double* __restrict gb = ps.grad.data() + static_cast<std::size_t>(bi) * nparams;
        double* __restrict g = grad.data();
        for (std::size_t q = 0; q < nparams; ++q) g[q] += gb[q];
    }
    return loss * invN;
}

}  // namespace

double mse_loss(const SingleLayerModel& m, std::span<const double> t, std::span<const double> y) {
    const double invN = 1.0 / static_cast<double>(t.size());
    return run_loss_blocks(
        t.size(), [&](std::size_t k0, int nb) {
            return block_loss_single(m, t.data() + k0, y.data() + k0, nb);
        },
        invN);
}

double mse_loss(const DoubleLayerModel& m, std::span<const double> t, std::span<const double> y) {
    const DeepView v = deep_view(m, t.size());
    const double invN = 1.0 / static_cast<double>(t.size());
    return run_loss_blocks(
        t.size(), [&](std::size_t k0, int nb) {
            return block_loss_deep(v, t.data() + k0, y.data(), k0, nb);
        },
        invN);
}

double mse_loss(const MultiOutputModel& m, std::span<const double> t, std::span<const double> y) {
    const DeepView v = deep_view(m, t.size());
    const double invN = 1.0 / (static_cast<double>(t.size()) * v.C);
    return run_loss_blocks(
        t.size(), [&](std::size_t k0, int nb) {
            return block_loss_deep(v, t.data() + k0, y.data(), k0, nb);
        },
        invN);
}

double mse_loss_grad(const SingleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    const double invN = 1.0 / static_cast<double>(t.size());
    return run_grad_blocks(
        t.size(), grad.size(), grad,
        [&](std::size_t k0, int nb, double* g) {
            return block_grad_single(m, t.data() + k0, y.data() + k0, nb, invN, g);
        },
        invN);
}

double mse_loss_grad(const DoubleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    const DeepView v = deep_view(m, t.size());
    const double invN = 1.0 / static_cast<double>(t.size());
    return run_grad_blocks(
        t.size(), grad.size(), grad,
        [&](std::size_t k0, int nb, double* g) {
            return block_grad_deep(v, t.data() + k0, y.data(), k0, nb, invN, g);
        },
        invN);
}

double mse_loss_grad(const MultiOutputModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    const DeepView v = deep_view(m, t.size());
    const double invN = 1.0 / (static_cast<double>(t.size()) * v.C);
    return run_grad_blocks(
        t.size(), grad.size(), grad,
        [&](std::size_t k0, int nb, double* g) {
            return block_grad_deep(v, t.data() + k0, y.data(), k0, nb, invN, g);
        },
        invN);
}

}  // namespace winr::kernels
