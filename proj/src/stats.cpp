#include "winr/stats.hpp"

#include <functional>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace winr {

namespace {

// Candidate shapes are restricted to trainable aspect ratios: very thin,
// deep layouts (e.g. h1 = 9, h2 = 165) match counts well but reliably fail
// to learn the fundamental, which would make budget comparisons meaningless.
BudgetMatch lattice_search(std::int64_t budget, int max_width,
                           const std::function<std::int64_t(int, int)>& count) {
    if (budget < 1) throw InvalidInput("budget must be positive");
    constexpr int kMinWidth = 4;
    constexpr int kMaxAspect = 5;
    BudgetMatch best{kMinWidth, kMinWidth, count(kMinWidth, kMinWidth)};
    std::int64_t best_err = std::abs(best.count - budget);
    for (int h1 = kMinWidth; h1 <= max_width; ++h1) {
        const int lo = std::max(kMinWidth, (h1 + kMaxAspect - 1) / kMaxAspect);
        const int hi = std::min(max_width, h1 * kMaxAspect);
        for (int h2 = lo; h2 <= hi; ++h2) {
            const std::int64_t c = count(h1, h2);
            const std::int64_t err = std::abs(c - budget);
            if (err < best_err || (err == best_err && h2 > best.h2)) {
                best_err = err;
                best = {h1, h2, c};
            }
        }
    }
    return best;
}

std::vector<double> ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

BudgetMatch closest_separate(std::int64_t budget, int channels, int max_width) {
    if (channels < 1) throw InvalidInput("closest_separate: channels must be >= 1");
    return lattice_search(budget, max_width, [&](int h1, int h2) {
        ArchSpec a{ArchKind::Double, h1, h2, 1, Activation::Sine, kDefaultOmega0};
        return static_cast<std::int64_t>(channels) * param_count(a);
    });
}

BudgetMatch closest_combined(std::int64_t budget, int channels, int max_width) {
    if (channels < 2) throw InvalidInput("closest_combined: channels must be >= 2");
    return lattice_search(budget, max_width, [&](int h1, int h2) {
        ArchSpec a{ArchKind::Multi, h1, h2, channels, Activation::Sine, kDefaultOmega0};
        return param_count(a);
    });
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidInput("spearman: need two equal-length series of size >= 2");
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0)
        throw NumericError("spearman: a series is constant; correlation undefined");
    return num / std::sqrt(dx * dy);
}

}  // namespace winr
