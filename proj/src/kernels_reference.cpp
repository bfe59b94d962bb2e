#include "winr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

// Plain per-sample serial implementations. These are the readable baseline
// the blocked kernels are tested against; they trade speed for obviousness.

namespace winr::kernels::reference {

namespace {

inline double act(double x, bool sine) { return sine ? std::sin(x) : (x > 0.0 ? x : 0.0); }
inline double dact(double x, bool sine) { return sine ? std::cos(x) : (x > 0.0 ? 1.0 : 0.0); }

}  // namespace

void forward_grid(const SingleLayerModel& m, std::span<const double> t, std::span<double> out) {
    const int h = m.hidden();
    for (std::size_t k = 0; k < t.size(); ++k) {
        double p = m.b2;
        for (int i = 0; i < h; ++i)
            p += m.a2[i] * std::sin(m.omega0 * m.a1[i] * t[k] + m.b1[i]);
        out[k] = p;
    }
}

namespace {

template <typename M>
void deep_forward_point(const M& m, double t, const double* a3, const double* b3, int C,
                        std::size_t n, std::size_t k, double* out) {
    const int h1 = m.h1(), h2 = m.h2();
    const bool sine = m.activation == Activation::Sine;
    std::vector<double> z(h1), y(h2);
    for (int i = 0; i < h1; ++i) z[i] = act(m.omega0 * m.a1[i] * t + m.b1[i], sine);
    for (int j = 0; j < h2; ++j) {
        double u = m.b2[j];
        for (int i = 0; i < h1; ++i) u += m.a2[static_cast<std::size_t>(j) * h1 + i] * z[i];
        y[j] = act(u, sine);
    }
    for (int c = 0; c < C; ++c) {
        double p = b3[c];
        for (int j = 0; j < h2; ++j) p += a3[static_cast<std::size_t>(c) * h2 + j] * y[j];
        out[static_cast<std::size_t>(c) * n + k] = p;
    }
}

}  // namespace

void forward_grid(const DoubleLayerModel& m, std::span<const double> t, std::span<double> out) {
    for (std::size_t k = 0; k < t.size(); ++k)
        deep_forward_point(m, t[k], m.a3.data(), &m.b3, 1, t.size(), k, out.data());
}

void forward_grid(const MultiOutputModel& m, std::span<const double> t, std::span<double> out) {
    for (std::size_t k = 0; k < t.size(); ++k)
        deep_forward_point(m, t[k], m.a3.data(), m.b3.data(), m.channels(), t.size(), k,
                           out.data());
}

double mse_loss(const SingleLayerModel& m, std::span<const double> t, std::span<const double> y) {
    std::vector<double> p(t.size());
    forward_grid(m, t, p);
    double loss = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = p[k] - y[k];
        loss += e * e;
    }
    return loss / static_cast<double>(t.size());
}

double mse_loss(const DoubleLayerModel& m, std::span<const double> t, std::span<const double> y) {
    std::vector<double> p(t.size());
    forward_grid(m, t, p);
    double loss = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = p[k] - y[k];
        loss += e * e;
    }
    return loss / static_cast<double>(t.size());
}

double mse_loss(const MultiOutputModel& m, std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    const int C = m.channels();
    std::vector<double> p(n * C);
    forward_grid(m, t, p);
    double loss = 0.0;
    for (std::size_t q = 0; q < p.size(); ++q) {
        const double e = p[q] - y[q];
        loss += e * e;
    }
    return loss / static_cast<double>(n * C);
}

double mse_loss_grad(const SingleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    const int h = m.hidden();
    const std::size_t n = t.size();
    std::fill(grad.begin(), grad.end(), 0.0);
    double* ga1 = grad.data();
    double* gb1 = grad.data() + h;
    double* ga2 = grad.data() + 2 * h;
    double* gb2 = grad.data() + 3 * h;
    const double invN = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double p = m.b2;
        for (int i = 0; i < h; ++i)
            p += m.a2[i] * std::sin(m.omega0 * m.a1[i] * t[k] + m.b1[i]);
        const double e = p - y[k];
        loss += e * e;
        const double r = 2.0 * e * invN;
        gb2[0] += r;
        for (int i = 0; i < h; ++i) {
            const double arg = m.omega0 * m.a1[i] * t[k] + m.b1[i];
            ga2[i] += r * std::sin(arg);
            const double d = r * m.a2[i] * std::cos(arg);
            ga1[i] += d * m.omega0 * t[k];
            gb1[i] += d;
        }
    }
    return loss * invN;
}

namespace {

template <typename M>
double deep_loss_grad(const M& m, const double* a3, const double* b3, int C,
                      std::span<const double> t, std::span<const double> y,
                      std::span<double> grad) {
    const int h1 = m.h1(), h2 = m.h2();
    const bool sine = m.activation == Activation::Sine;
    const std::size_t n = t.size();
    std::fill(grad.begin(), grad.end(), 0.0);
    double* ga1 = grad.data();
    double* gb1 = grad.data() + h1;
    double* ga2 = grad.data() + 2 * h1;
    double* gb2 = ga2 + static_cast<std::size_t>(h1) * h2;
    double* ga3 = gb2 + h2;
    double* gb3 = ga3 + static_cast<std::size_t>(C) * h2;
    const double invN = 1.0 / (static_cast<double>(n) * C);

    std::vector<double> zarg(h1), z(h1), uarg(h2), yact(h2), dy(h2), dz(h1);
    double loss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (int i = 0; i < h1; ++i) {
            zarg[i] = m.omega0 * m.a1[i] * t[k] + m.b1[i];
            z[i] = act(zarg[i], sine);
        }
        for (int j = 0; j < h2; ++j) {
            double u = m.b2[j];
            for (int i = 0; i < h1; ++i) u += m.a2[static_cast<std::size_t>(j) * h1 + i] * z[i];
            uarg[j] = u;
            yact[j] = act(u, sine);
        }
        std::fill(dy.begin(), dy.end(), 0.0);
        for (int c = 0; c < C; ++c) {
            double p = b3[c];
            for (int j = 0; j < h2; ++j) p += a3[static_cast<std::size_t>(c) * h2 + j] * yact[j];
            const double e = p - y[static_cast<std::size_t>(c) * n + k];
            loss += e * e;
            const double r = 2.0 * e * invN;
            gb3[c] += r;
            for (int j = 0; j < h2; ++j) {
                ga3[static_cast<std::size_t>(c) * h2 + j] += r * yact[j];
                dy[j] += r * a3[static_cast<std::size_t>(c) * h2 + j] * dact(uarg[j], sine);
            }
        }
        std::fill(dz.begin(), dz.end(), 0.0);
        for (int j = 0; j < h2; ++j) {
            gb2[j] += dy[j];
            for (int i = 0; i < h1; ++i) {
                ga2[static_cast<std::size_t>(j) * h1 + i] += dy[j] * z[i];
                dz[i] += m.a2[static_cast<std::size_t>(j) * h1 + i] * dy[j];
            }
        }
        for (int i = 0; i < h1; ++i) {
            const double d = dz[i] * dact(zarg[i], sine);
            ga1[i] += d * m.omega0 * t[k];
            gb1[i] += d;
        }
    }
    return loss * invN;
}

}  // namespace

double mse_loss_grad(const DoubleLayerModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    return deep_loss_grad(m, m.a3.data(), &m.b3, 1, t, y, grad);
}

double mse_loss_grad(const MultiOutputModel& m, std::span<const double> t,
                     std::span<const double> y, std::span<double> grad) {
    return deep_loss_grad(m, m.a3.data(), m.b3.data(), m.channels(), t, y, grad);
}

}  // namespace winr::kernels::reference
