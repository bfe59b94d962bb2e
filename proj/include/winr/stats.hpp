#pragma once

#include <cstdint>
#include <vector>

#include "winr/model.hpp"

namespace winr {

// Closest-parameter-count architecture search on the integer (h1, h2)
// lattice. Ties break toward larger h2.
struct BudgetMatch {
    int h1 = 0;
    int h2 = 0;
    std::int64_t count = 0;  // actual parameter count at (h1, h2)
};

/// Closest trio of independent double-layer models to `budget` total.
BudgetMatch closest_separate(std::int64_t budget, int channels, int max_width = 300);

/// Closest shared-trunk multi-output model to `budget`.
BudgetMatch closest_combined(std::int64_t budget, int channels, int max_width = 300);

/// Spearman rank correlation. Ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace winr
