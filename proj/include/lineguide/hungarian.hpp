#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "lineguide/error.hpp"

namespace lineguide {

/// Dense row-major cost matrix; entries must be finite and non-negative.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

using Assignment = std::vector<std::pair<int, int>>;

/// Sum of assigned costs, accumulated in assignment order.
inline double assignment_cost(const CostMatrix& cost, const Assignment& a) {
  double total = 0.0;
  for (auto [i, j] : a) total += cost.at(i, j);
  return total;
}

namespace detail {

struct SquareSolution {
  std::vector<int> col_of_row;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path form of the Hungarian method, O(n^3).
inline SquareSolution solve_square(const std::vector<double>& a, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution s;
  s.col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) s.col_of_row[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

// Among all optimal assignments (perfect matchings of the tight subgraph),
// pick the lexicographically smallest column sequence by row. Each row is
// settled by a reverse search for alternating paths back to its current column.
inline void lexicographic_tiebreak(const std::vector<double>& a, int n, SquareSolution& s, double tol) {
  auto tight = [&](int i, int j) {
    return a[static_cast<std::size_t>(i) * n + j] - s.u[i] - s.v[j] <= tol;
  };
  std::vector<int> row_of_col(n);
  for (int i = 0; i < n; ++i) row_of_col[s.col_of_row[i]] = i;
  std::vector<char> fixed_col(n, 0), good(n);
  std::vector<int> next(n);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    const int m = s.col_of_row[i];
    std::fill(good.begin(), good.end(), 0);
    good[m] = 1;
    queue.assign(1, m);
    while (!queue.empty()) {
      const int g = queue.front();
      queue.pop_front();
      for (int c = 0; c < n; ++c) {
        if (good[c] || fixed_col[c]) continue;
        if (tight(row_of_col[c], g)) {
          good[c] = 1;
          next[c] = g;
          queue.push_back(c);
        }
      }
    }
    int j = m;
    for (int c = 0; c < m; ++c) {
      if (good[c] && tight(i, c)) {
        j = c;
        break;
      }
    }
    if (j != m) {
      int c = j;
      int taker = i;
      while (c != m) {
        const int r = row_of_col[c];
        row_of_col[c] = taker;
        s.col_of_row[taker] = c;
        taker = r;
        c = next[c];
      }
      row_of_col[m] = taker;
      s.col_of_row[taker] = m;
    }
    fixed_col[j] = 1;
  }
}

}  // namespace detail

/// Minimum-cost one-to-one assignment of size min(rows, cols).
///
/// Rectangular inputs are padded to square with a sentinel strictly larger
/// than every real entry; pad matches are dropped. Among equal-cost optima
/// the lexicographically smallest (row, then column) assignment is returned,
/// so an all-zero matrix yields the identity. Result is sorted by row.
inline Assignment hungarian(const CostMatrix& cost) {
  if (cost.rows == 0 || cost.cols == 0) return {};
  double max_entry = 0.0;
  for (double c : cost.data) {
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(Errc::invalid_argument, "cost matrix entries must be finite and non-negative");
    }
    max_entry = std::max(max_entry, c);
  }
  const int n = std::max(cost.rows, cost.cols);
  const double pad = max_entry + 1.0;
  std::vector<double> square(static_cast<std::size_t>(n) * n, pad);
  for (int i = 0; i < cost.rows; ++i) {
    for (int j = 0; j < cost.cols; ++j) square[static_cast<std::size_t>(i) * n + j] = cost.at(i, j);
  }
  auto solution = detail::solve_square(square, n);
  detail::lexicographic_tiebreak(square, n, solution, 1e-10 * std::max(1.0, pad));

  Assignment out;
  out.reserve(std::min(cost.rows, cost.cols));
  for (int i = 0; i < cost.rows; ++i) {
    const int j = solution.col_of_row[i];
    if (j < cost.cols) out.emplace_back(i, j);
  }
  return out;
}

}  // namespace lineguide
