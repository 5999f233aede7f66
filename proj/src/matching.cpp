#include "fkm/matching.hpp"

#include <bit>
#include <queue>

namespace fkm {

BitRelation BitRelation::transposed() const {
  BitRelation out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto r = row(i);
    for (std::size_t w = 0; w < words_; ++w) {
      for (std::uint64_t bits = r[w]; bits != 0; bits &= bits - 1) {
        out.set(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)), i);
      }
    }
  }
  return out;
}

std::size_t ordered_match_size(const BitRelation& rel) {
  const std::size_t words = rel.words_per_row();
  const std::size_t cols = rel.cols();
  if (cols == 0 || rel.rows() == 0) return 0;
  // V holds the row-to-row increments of the DP, inverted: a zero bit at j marks
  // M[i][j+1] = M[i][j] + 1.
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (std::size_t i = 0; i < rel.rows(); ++i) {
    const auto m = rel.row(i);
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & m[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t with_carry = sum + carry;
      carry = (sum < v[w] || with_carry < sum) ? 1 : 0;
      v[w] = with_carry | (v[w] & ~m[w]);
    }
  }
  std::size_t ones = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = v[w];
    if (w + 1 == words && cols % 64 != 0) bits &= (std::uint64_t{1} << (cols % 64)) - 1;
    ones += static_cast<std::size_t>(std::popcount(bits));
  }
  return cols - ones;
}

namespace {

constexpr std::size_t kFree = static_cast<std::size_t>(-1);

// Hopcroft-Karp over the packed adjacency rows.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(const BitRelation& rel)
      : rel_(rel), match_row_(rel.rows(), kFree), match_col_(rel.cols(), kFree), dist_(rel.rows()) {}

  std::size_t run() {
    std::size_t size = 0;
    while (bfs()) {
      for (std::size_t i = 0; i < rel_.rows(); ++i) {
        if (match_row_[i] == kFree && dfs(i)) ++size;
      }
    }
    return size;
  }

  const std::vector<std::size_t>& match_row() const { return match_row_; }

 private:
  template <typename F>
  void for_each_neighbor(std::size_t i, F&& f) const {
    const auto r = rel_.row(i);
    for (std::size_t w = 0; w < r.size(); ++w) {
      for (std::uint64_t bits = r[w]; bits != 0; bits &= bits - 1) {
        if (!f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)))) return;
      }
    }
  }

  bool bfs() {
    std::queue<std::size_t> queue;
    bool found = false;
    for (std::size_t i = 0; i < rel_.rows(); ++i) {
      if (match_row_[i] == kFree) {
        dist_[i] = 0;
        queue.push(i);
      } else {
        dist_[i] = kFree;
      }
    }
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop();
      for_each_neighbor(i, [&](std::size_t j) {
        const std::size_t k = match_col_[j];
        if (k == kFree) {
          found = true;
        } else if (dist_[k] == kFree) {
          dist_[k] = dist_[i] + 1;
          queue.push(k);
        }
        return true;
      });
    }
    return found;
  }

  bool dfs(std::size_t i) {
    bool augmented = false;
    for_each_neighbor(i, [&](std::size_t j) {
      const std::size_t k = match_col_[j];
      if (k == kFree || (dist_[k] == dist_[i] + 1 && dfs(k))) {
        match_row_[i] = j;
        match_col_[j] = i;
        augmented = true;
        return false;
      }
      return true;
    });
    if (!augmented) dist_[i] = kFree;
    return augmented;
  }

  const BitRelation& rel_;
  std::vector<std::size_t> match_row_;
  std::vector<std::size_t> match_col_;
  std::vector<std::size_t> dist_;
};

}  // namespace

IndexPairs maximum_matching(const BitRelation& rel) {
  HopcroftKarp hk(rel);
  hk.run();
  IndexPairs pairs;
  for (std::size_t i = 0; i < rel.rows(); ++i) {
    if (hk.match_row()[i] != kFree) pairs.emplace_back(i, hk.match_row()[i]);
  }
  return pairs;
}

std::size_t maximum_matching_size(const BitRelation& rel) { return HopcroftKarp(rel).run(); }

}  // namespace fkm
