#include <algorithm>
#include <limits>

#include "diarkit/scoring.hpp"

namespace diarkit {
namespace {

// Min-cost assignment of every row to a distinct column (rows <= cols),
// shortest augmenting paths with potentials. Returns the column per row.
std::vector<int> min_cost_assignment(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] != 0) row_to_col[match[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

}  // namespace

std::vector<std::pair<int, int>> optimal_speaker_mapping(const Matrix& overlap) {
  const std::size_t rows = overlap.rows();
  const std::size_t cols = overlap.cols();
  std::vector<std::pair<int, int>> pairs;
  if (rows == 0 || cols == 0) return pairs;

  double peak = 0.0;
  for (double v : overlap.data()) peak = std::max(peak, v);

  const bool transpose = rows > cols;
  Matrix cost(transpose ? cols : rows, transpose ? rows : cols);
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      cost(i, j) = peak - (transpose ? overlap(j, i) : overlap(i, j));
    }
  }
  const auto assigned = min_cost_assignment(cost);
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    if (assigned[i] < 0) continue;
    if (transpose) {
      pairs.emplace_back(assigned[i], static_cast<int>(i));
    } else {
      pairs.emplace_back(static_cast<int>(i), assigned[i]);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace diarkit
