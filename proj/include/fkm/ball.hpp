#pragma once

// Ball membership: decides d(a, b) <= r or d(a, b) < r without evaluating d.
//
// For the FK kinds the inf-over-delta collapses to one matching per query:
//   d_FKn <= r  iff  f̄ with closed threshold r is <= r
//   d_FKn <  r  iff  f̄ with strict threshold r is <  r
// and likewise for the order-free variant.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fkm/matching.hpp"
#include "fkm/metrics.hpp"
#include "fkm/systems.hpp"

namespace fkm {

bool within(MetricKind kind, const OrbitSegment& a, const OrbitSegment& b, double radius, Threshold mode);

/// Membership oracle over a fixed list of equal-length segments.
///
/// On full shifts the FK kinds take a shortcut: at a fixed radius two orbit
/// points are close iff their first L coordinates agree, so each segment is
/// reduced to n integer window codes and matching runs on code equality.
class BallTest {
 public:
  BallTest(std::span<const OrbitSegment> segments, MetricKind kind, double radius, Threshold mode);

  bool operator()(std::size_t i, std::size_t j) const;
  bool symbolic_shortcut() const { return !codes_.empty(); }

 private:
  std::span<const OrbitSegment> segments_;
  MetricKind kind_;
  double radius_;
  Threshold mode_;
  std::size_t n_ = 0;
  std::vector<std::vector<std::uint64_t>> codes_;   // window codes per segment
  std::vector<std::vector<std::uint64_t>> sorted_;  // sorted copies, for multiset intersection
  bool trie_bracket_ = false;
};

/// Bracket [lower, upper] around F_n for two full-shift segments.
///
/// Truncated to the common suffix length L, the cylinder metric is an
/// ultrametric, where matching deepest-first in the prefix trie is an optimal
/// assignment. Truncation changes each cost by at most 2^-L, hence the width.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};
Bracket cylinder_weak_mean_bracket(const OrbitSegment& a, const OrbitSegment& b);

/// FK kinds: the largest u with u / n passing the radius test, i.e. how many
/// points a ball member may leave unmatched. 0 for the other kinds.
std::size_t mismatch_budget(MetricKind kind, std::size_t n, double radius, Threshold mode);

/// Smallest L >= 0 with 2^-L passing the radius test; the cylinder threshold depth.
std::size_t cylinder_depth(double radius, Threshold mode);

}  // namespace fkm
