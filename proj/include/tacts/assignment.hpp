#pragma once

// Exact bipartite matching solvers on dense row-major cost matrices.

#include <cstddef>
#include <span>
#include <vector>

namespace tacts {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Returns the column chosen for each row. Hungarian method, O(rows^2 cols).
std::vector<std::size_t> min_cost_assignment(std::span<const double> cost, std::size_t rows,
                                             std::size_t cols);

/// Minimum total cost of a matching of exactly k pairs, for every
/// k = 0..min(rows, cols).
///
/// Successive shortest augmenting paths with Johnson potentials: the flow
/// after the k-th augmentation is a min-cost flow of value k, so one solve
/// yields the whole profile. Costs must be nonnegative. Each entry is the
/// plain sum of the matched costs.
std::vector<double> k_matching_costs(std::span<const double> cost, std::size_t rows,
                                     std::size_t cols);

}  // namespace tacts
