#include "fkm/ball.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "fkm/error.hpp"

namespace fkm {
namespace {

bool compare(double value, double radius, Threshold mode) { return passes(value, radius, mode); }

// The integer count of unmatched points passes iff (n - k) / n passes; the
// division is kept so the test agrees bit-for-bit with the reported fractions.
bool unmatched_passes(std::size_t matched, std::size_t n, double radius, Threshold mode) {
  return compare(unmatched_fraction(matched, n), radius, mode);
}

bool weak_mean_within(const PairMetrics& pm, double radius, Threshold mode) {
  const auto& c = pm.cost();
  const double n = static_cast<double>(pm.n());
  const double lower = std::max(c.rowwise().minCoeff().sum(), c.colwise().minCoeff().sum()) / n;
  const double slack = 1e-9 * std::max(1.0, radius);
  if (lower > radius + slack) return false;
  if (pm.mean() < radius - slack) return true;
  return compare(pm.weak_mean(), radius, mode);
}

// Bit-parallel LCS over columns 0..cols-1; row_mask(i, m) fills the relation
// row for row i.
template <typename RowMask>
std::size_t streamed_lcs(std::size_t rows, std::size_t cols, RowMask&& row_mask) {
  const std::size_t words = (cols + 63) / 64;
  thread_local std::vector<std::uint64_t> v;
  thread_local std::vector<std::uint64_t> m;
  v.assign(words, ~std::uint64_t{0});
  m.resize(words);
  for (std::size_t i = 0; i < rows; ++i) {
    std::fill(m.begin(), m.end(), 0);
    row_mask(i, m);
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

std::size_t code_lcs(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return streamed_lcs(a.size(), b.size(), [&](std::size_t i, std::vector<std::uint64_t>& m) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == a[i]) m[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  });
}

std::size_t segment_lcs(const OrbitSegment& a, const OrbitSegment& b, double radius, Threshold mode) {
  const bool real = !a.symbolic() && a.component() == b.component();
  if (real && a.leaf_metric() == PhaseMetric::Circle) {
    const auto x = a.values();
    const auto y = b.values();
    return streamed_lcs(x.size(), y.size(), [&](std::size_t i, std::vector<std::uint64_t>& m) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (passes(circle_distance(x[i], y[j]), radius, mode)) m[j / 64] |= std::uint64_t{1} << (j % 64);
      }
    });
  }
  if (real && a.leaf_metric() == PhaseMetric::Interval) {
    const auto x = a.values();
    const auto y = b.values();
    return streamed_lcs(x.size(), y.size(), [&](std::size_t i, std::vector<std::uint64_t>& m) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (passes(std::abs(x[i] - y[j]), radius, mode)) m[j / 64] |= std::uint64_t{1} << (j % 64);
      }
    });
  }
  return streamed_lcs(a.size(), b.size(), [&](std::size_t i, std::vector<std::uint64_t>& m) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (passes(a.distance(i, b, j), radius, mode)) m[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  });
}

// Size of the multiset intersection of two sorted sequences.
std::size_t common_count(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::size_t i = 0, j = 0, k = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++k;
      ++i;
      ++j;
    }
  }
  return k;
}

struct Excess {
  std::size_t a = 0;
  std::size_t b = 0;
};

// Deepest-first matching over a lexicographically sorted range of suffixes:
// leftovers of the children pair up at this depth, at cost 2^-depth.
Excess trie_match(std::span<const std::pair<std::span<const std::uint8_t>, bool>> items, std::size_t depth,
                  std::size_t limit, double& cost) {
  Excess total;
  if (items.size() <= 1 || depth == limit) {
    for (const auto& it : items) (it.second ? total.b : total.a) += 1;
    if (depth == limit) {
      const std::size_t m = std::min(total.a, total.b);
      total.a -= m;
      total.b -= m;
    }
    return total;
  }
  std::size_t start = 0;
  while (start < items.size()) {
    std::size_t end = start + 1;
    while (end < items.size() && items[end].first[depth] == items[start].first[depth]) ++end;
    const Excess child = trie_match(items.subspan(start, end - start), depth + 1, limit, cost);
    total.a += child.a;
    total.b += child.b;
    start = end;
  }
  const std::size_t m = std::min(total.a, total.b);
  cost += static_cast<double>(m) * std::ldexp(1.0, -static_cast<int>(depth));
  total.a -= m;
  total.b -= m;
  return total;
}

}  // namespace

Bracket cylinder_weak_mean_bracket(const OrbitSegment& a, const OrbitSegment& b) {
  require_comparable(a, b);
  if (a.system().kind() != SystemKind::FullShift) throw DomainError("bracket needs a full shift");
  const std::size_t n = a.size();
  const std::size_t limit = std::min(a.digits().size(), b.digits().size()) - (n - 1);
  std::vector<std::pair<std::span<const std::uint8_t>, bool>> items;
  items.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    items.emplace_back(a.digits().subspan(i, limit), false);
    items.emplace_back(b.digits().subspan(i, limit), true);
  }
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    return std::lexicographical_compare(x.first.begin(), x.first.end(), y.first.begin(), y.first.end());
  });
  double cost = 0.0;
  trie_match(items, 0, limit, cost);
  const double lower = cost / static_cast<double>(n);
  return {lower, lower + std::ldexp(1.0, -static_cast<int>(limit))};
}

std::size_t mismatch_budget(MetricKind kind, std::size_t n, double radius, Threshold mode) {
  if (kind != MetricKind::FK && kind != MetricKind::FKUnordered) return 0;
  std::size_t u = 0;
  while (u < n && unmatched_passes(n - (u + 1), n, radius, mode)) ++u;
  return u;
}

std::size_t cylinder_depth(double radius, Threshold mode) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  std::size_t depth = 0;
  while (!passes(std::ldexp(1.0, -static_cast<int>(depth)), radius, mode)) ++depth;
  return depth;
}

bool within(MetricKind kind, const OrbitSegment& a, const OrbitSegment& b, double radius, Threshold mode) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  const PairMetrics pm(a, b);
  switch (kind) {
    case MetricKind::Bowen:
      return compare(pm.bowen(), radius, mode);
    case MetricKind::Mean:
      return compare(pm.mean(), radius, mode);
    case MetricKind::FK:
      return compare(pm.ordered_unmatched(radius, mode), radius, mode);
    case MetricKind::FKUnordered:
      return compare(pm.unordered_unmatched(radius, mode), radius, mode);
    case MetricKind::WeakMean:
      return weak_mean_within(pm, radius, mode);
  }
  return false;
}

BallTest::BallTest(std::span<const OrbitSegment> segments, MetricKind kind, double radius, Threshold mode)
    : segments_(segments), kind_(kind), radius_(radius), mode_(mode) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (segments.empty()) return;
  n_ = segments.front().size();
  for (const auto& s : segments) require_comparable(segments.front(), s);

  const System& system = segments.front().system();
  trie_bracket_ = kind == MetricKind::WeakMean && system.kind() == SystemKind::FullShift;
  if ((kind != MetricKind::FK && kind != MetricKind::FKUnordered) || system.kind() != SystemKind::FullShift) return;
  const std::size_t depth = cylinder_depth(radius, mode);
  const auto bits = static_cast<std::size_t>(std::bit_width(static_cast<unsigned>(system.spec().alphabet - 1)));
  if (depth * bits > 64) return;
  for (const auto& s : segments) {
    if (s.digits().size() < n_ - 1 + depth) return;
  }
  codes_.reserve(segments.size());
  for (const auto& s : segments) {
    std::vector<std::uint64_t> code(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t c = 0;
      for (std::size_t t = 0; t < depth; ++t) c |= static_cast<std::uint64_t>(s.digits()[i + t]) << (bits * t);
      code[i] = c;
    }
    codes_.push_back(std::move(code));
  }
  sorted_ = codes_;
  for (auto& c : sorted_) std::sort(c.begin(), c.end());
}

bool BallTest::operator()(std::size_t i, std::size_t j) const {
  if (trie_bracket_) {
    const Bracket f = cylinder_weak_mean_bracket(segments_[i], segments_[j]);
    const double slack = 1e-12;
    if (f.lower - slack > radius_) return false;
    if (f.upper + slack < radius_) return true;
    return within(kind_, segments_[i], segments_[j], radius_, mode_);
  }
  if (codes_.empty()) {
    if (kind_ != MetricKind::FK) return within(kind_, segments_[i], segments_[j], radius_, mode_);
    return unmatched_passes(segment_lcs(segments_[i], segments_[j], radius_, mode_), n_, radius_, mode_);
  }
  // The order-free match bounds the ordered one from above, so a failing
  // multiset test settles the ordered kind too.
  const std::size_t unordered = common_count(sorted_[i], sorted_[j]);
  if (kind_ == MetricKind::FKUnordered || !unmatched_passes(unordered, n_, radius_, mode_)) {
    return unmatched_passes(unordered, n_, radius_, mode_);
  }
  return unmatched_passes(code_lcs(codes_[i], codes_[j]), n_, radius_, mode_);
}

}  // namespace fkm
