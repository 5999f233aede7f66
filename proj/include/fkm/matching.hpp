#pragma once

// Matching kernels over dense cost matrices.
//
// Rows index the first orbit (T^i x), columns the second (T^j y). Every kernel
// takes a threshold delta and a comparison mode: Strict keeps pairs with
// cost < delta (the match definition), Closed keeps cost <= delta (the
// right-limit used for spanning-ball membership).

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "fkm/error.hpp"

namespace fkm {

enum class Threshold { Strict, Closed };

template <typename Scalar>
constexpr bool passes(Scalar cost, Scalar delta, Threshold mode) {
  return mode == Threshold::Strict ? cost < delta : cost <= delta;
}

/// (n - matched) / n, the form shared by f̄ and f̃ so that k/n values compare
/// identically everywhere.
inline double unmatched_fraction(std::size_t matched, std::size_t n) {
  return static_cast<double>(n - matched) / static_cast<double>(n);
}

/// Boolean rows x cols relation packed one bit per entry.
class BitRelation {
 public:
  BitRelation() = default;
  BitRelation(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_; }

  void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  bool test(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u; }
  std::span<const std::uint64_t> row(std::size_t i) const { return {bits_.data() + i * words_, words_}; }
  std::span<std::uint64_t> row(std::size_t i) { return {bits_.data() + i * words_, words_}; }

  BitRelation transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

template <typename Derived>
BitRelation threshold_relation(const Eigen::MatrixBase<Derived>& cost, typename Derived::Scalar delta,
                               Threshold mode) {
  BitRelation rel(static_cast<std::size_t>(cost.rows()), static_cast<std::size_t>(cost.cols()));
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (passes(cost(i, j), delta, mode)) rel.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return rel;
}

using IndexPairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Size of the largest order-preserving match, by the LCS recurrence
/// M[i][j] = max(M[i-1][j], M[i][j-1], M[i-1][j-1] + [cost(i-1,j-1) passes])
/// with one rolling row.
template <typename Derived>
std::size_t ordered_match_size(const Eigen::MatrixBase<Derived>& cost, typename Derived::Scalar delta,
                               Threshold mode) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  std::vector<std::size_t> row(static_cast<std::size_t>(cols) + 1, 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    std::size_t diagonal = 0;  // M[i-1][j-1]
    for (Eigen::Index j = 1; j <= cols; ++j) {
      const std::size_t up = row[static_cast<std::size_t>(j)];
      std::size_t best = std::max(up, row[static_cast<std::size_t>(j) - 1]);
      if (passes(cost(i, j - 1), delta, mode)) best = std::max(best, diagonal + 1);
      diagonal = up;
      row[static_cast<std::size_t>(j)] = best;
    }
  }
  return row.back();
}

/// Witness for ordered_match_size: matched (row, col) pairs, both strictly
/// increasing. Uses the full (rows+1) x (cols+1) table.
template <typename Derived>
IndexPairs ordered_match_pairs(const Eigen::MatrixBase<Derived>& cost, typename Derived::Scalar delta,
                               Threshold mode) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic> table =
      Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows + 1, cols + 1);
  for (Eigen::Index i = 1; i <= rows; ++i) {
    for (Eigen::Index j = 1; j <= cols; ++j) {
      std::size_t best = std::max(table(i - 1, j), table(i, j - 1));
      if (passes(cost(i - 1, j - 1), delta, mode)) best = std::max(best, table(i - 1, j - 1) + 1);
      table(i, j) = best;
    }
  }
  IndexPairs pairs;
  Eigen::Index i = rows;
  Eigen::Index j = cols;
  while (i > 0 && j > 0) {
    if (table(i, j) == table(i - 1, j)) {
      --i;
    } else if (table(i, j) == table(i, j - 1)) {
      --j;
    } else {
      pairs.emplace_back(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
      --i;
      --j;
    }
  }
  std::reverse(pairs.begin(), pairs.end());
  return pairs;
}

/// Bit-parallel form of ordered_match_size for an arbitrary relation; O(rows *
/// ceil(cols / 64)) word operations.
std::size_t ordered_match_size(const BitRelation& rel);

/// Maximum-cardinality matching of the bipartite graph `rel` (Hopcroft-Karp).
IndexPairs maximum_matching(const BitRelation& rel);
std::size_t maximum_matching_size(const BitRelation& rel);

template <typename Derived>
IndexPairs unordered_match_pairs(const Eigen::MatrixBase<Derived>& cost, typename Derived::Scalar delta,
                                 Threshold mode) {
  return maximum_matching(threshold_relation(cost, delta, mode));
}

template <typename Scalar>
struct Assignment {
  Scalar cost = Scalar(0);
  std::vector<std::size_t> column_of_row;
};

/// Minimum-cost perfect assignment of a square matrix (Hungarian method with
/// row/column potentials, O(n^3)). `cost` sums the chosen entries in row order.
template <typename Derived>
Assignment<typename Derived::Scalar> min_cost_assignment(const Eigen::MatrixBase<Derived>& cost) {
  using Scalar = typename Derived::Scalar;
  if (cost.rows() != cost.cols()) throw DomainError("assignment needs a square cost matrix");
  const auto n = static_cast<std::size_t>(cost.rows());
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  // 1-based potentials; p[j] = row assigned to column j, column 0 is a sentinel.
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<Scalar> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      Scalar delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment<Scalar> result;
  result.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.column_of_row[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) {
    result.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(result.column_of_row[i]));
  }
  return result;
}

/// inf{delta > 0 : unmatched(delta) < delta} for a nonincreasing step function
/// `unmatched` (strict-threshold semantics) by bisection on [0, upper]. Returns
/// the upper end of the final bracket, so the result is within tol above the
/// infimum. `upper` must satisfy unmatched(upper) < upper.
template <typename Unmatched>
double threshold_by_bisection(Unmatched&& unmatched, double upper, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  double lo = 0.0;
  double hi = upper;
  while (hi - lo > tol) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (unmatched(mid, Threshold::Strict) < mid) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Exact inf{delta > 0 : unmatched(delta) < delta}. Between consecutive
/// distinct cost values t_a < t_(a+1) the strict unmatched fraction is constant
/// and equals the closed fraction v_a at t_a, so the infimum is max(t_a, v_a)
/// for the first a with v_a < t_(a+1). That predicate is monotone in a, which
/// allows binary search.
template <typename Derived, typename Unmatched>
double threshold_exact(const Eigen::MatrixBase<Derived>& cost, Unmatched&& unmatched) {
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(cost.size()) + 1);
  levels.push_back(0.0);
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (cost(i, j) > 0.0) levels.push_back(static_cast<double>(cost(i, j)));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t m = levels.size() - 1;  // levels[0] = 0 is t_0
  auto next_level = [&](std::size_t a) {
    return a + 1 <= m ? levels[a + 1] : std::numeric_limits<double>::infinity();
  };
  std::size_t lo = 0;
  std::size_t hi = m;  // predicate holds at m
  double value_at_hi = 0.0;
  bool have_hi = false;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double v = unmatched(levels[mid], Threshold::Closed);
    if (v < next_level(mid)) {
      hi = mid;
      value_at_hi = v;
      have_hi = true;
    } else {
      lo = mid + 1;
    }
  }
  if (!have_hi || lo != hi) value_at_hi = unmatched(levels[lo], Threshold::Closed);
  return std::max(levels[lo], value_at_hi);
}

}  // namespace fkm
