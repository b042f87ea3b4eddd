#include "tacts/assignment.hpp"

#include <algorithm>
#include <limits>

#include "tacts/error.hpp"

namespace tacts {

std::vector<std::size_t> min_cost_assignment(std::span<const double> cost, std::size_t rows,
                                             std::size_t cols) {
  if (rows > cols) fail(Errc::invalid_input, "assignment needs rows <= cols");
  if (cost.size() != rows * cols) fail(Errc::invalid_input, "cost matrix size mismatch");
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = 0;

  // 1-based potentials; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0), minv(cols + 1);
  std::vector<std::size_t> owner(cols + 1, none), way(cols + 1, 0);
  std::vector<char> used(cols + 1);
  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != none);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(rows);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (owner[j] != none) assignment[owner[j] - 1] = j - 1;
  }
  return assignment;
}

std::vector<double> k_matching_costs(std::span<const double> cost, std::size_t rows,
                                     std::size_t cols) {
  if (cost.size() != rows * cols) fail(Errc::invalid_input, "cost matrix size mismatch");
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t free_slot = std::numeric_limits<std::size_t>::max();
  const std::size_t kmax = std::min(rows, cols);

  std::vector<double> profile(kmax + 1, 0.0);
  std::vector<std::size_t> match_l(rows, free_slot), match_r(cols, free_slot);
  std::vector<double> pot_l(rows, 0.0), pot_r(cols, 0.0);
  std::vector<double> dist_l(rows), dist_r(cols);
  std::vector<std::size_t> prev_r(cols);
  std::vector<char> done_l(rows), done_r(cols);

  for (std::size_t k = 1; k <= kmax; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      dist_l[i] = match_l[i] == free_slot ? -pot_l[i] : inf;
      done_l[i] = 0;
    }
    std::fill(dist_r.begin(), dist_r.end(), inf);
    std::fill(done_r.begin(), done_r.end(), 0);

    // Dense Dijkstra over reduced costs, sources = free left vertices.
    for (std::size_t step = 0; step < rows + cols; ++step) {
      double best = inf;
      std::size_t node = free_slot;
      bool left = false;
      for (std::size_t i = 0; i < rows; ++i) {
        if (!done_l[i] && dist_l[i] < best) {
          best = dist_l[i];
          node = i;
          left = true;
        }
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (!done_r[j] && dist_r[j] < best) {
          best = dist_r[j];
          node = j;
          left = false;
        }
      }
      if (node == free_slot) break;
      if (left) {
        done_l[node] = 1;
        const double* row = cost.data() + node * cols;
        for (std::size_t j = 0; j < cols; ++j) {
          if (done_r[j] || match_l[node] == j) continue;
          const double nd = best + row[j] + pot_l[node] - pot_r[j];
          if (nd < dist_r[j]) {
            dist_r[j] = nd;
            prev_r[j] = node;
          }
        }
      } else {
        done_r[node] = 1;
        const std::size_t i = match_r[node];
        if (i != free_slot && !done_l[i]) {
          const double nd = best - cost[i * cols + node] + pot_r[node] - pot_l[i];
          if (nd < dist_l[i]) dist_l[i] = nd;
        }
      }
    }

    std::size_t target = free_slot;
    double target_cost = inf;
    for (std::size_t j = 0; j < cols; ++j) {
      if (match_r[j] != free_slot || dist_r[j] == inf) continue;
      const double actual = dist_r[j] + pot_r[j];
      if (actual < target_cost) {
        target_cost = actual;
        target = j;
      }
    }
    if (target == free_slot) fail(Errc::numerical, "no augmenting path found");

    for (std::size_t i = 0; i < rows; ++i) {
      if (dist_l[i] != inf) pot_l[i] += dist_l[i];
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (dist_r[j] != inf) pot_r[j] += dist_r[j];
    }

    std::size_t j = target;
    while (true) {
      const std::size_t i = prev_r[j];
      const std::size_t previous = match_l[i];
      match_l[i] = j;
      match_r[j] = i;
      if (previous == free_slot) break;
      j = previous;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (match_l[i] != free_slot) total += cost[i * cols + match_l[i]];
    }
    profile[k] = total;
  }
  return profile;
}

}  // namespace tacts
