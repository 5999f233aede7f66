#include <cmath>

#include "doctest.h"
#include "fkm/ball.hpp"
#include "fkm/error.hpp"
#include "fkm/metrics.hpp"
#include "fkm/rng.hpp"
#include "fkm/verify.hpp"
#include "oracles.hpp"

using namespace fkm;

namespace {

constexpr double kTol = 1e-9;

struct Pair {
  OrbitSegment a;
  OrbitSegment b;
};

Pair real_pair(const System& s, double x, double y, std::size_t n) {
  return {s.orbit(s.real_point(x), n), s.orbit(s.real_point(y), n)};
}

Pair word_pair(const System& s, std::vector<std::uint8_t> x, std::vector<std::uint8_t> y, std::size_t n) {
  return {s.orbit(s.symbolic_point(std::move(x)), n), s.orbit(s.symbolic_point(std::move(y)), n)};
}

std::vector<std::uint8_t> periodic(std::vector<std::uint8_t> block, std::size_t length) {
  std::vector<std::uint8_t> out;
  while (out.size() < length) out.push_back(block[out.size() % block.size()]);
  return out;
}

}  // namespace

TEST_CASE("Bowen and mean distances") {
  const System doubling(SystemSpec::doubling());
  const auto p = real_pair(doubling, 0.0, 0.5, 2);
  CHECK(bowen_distance(p.a, p.b) == 0.5);
  CHECK(mean_distance(p.a, p.b) == 0.25);
  CHECK(bowen_distance(p.a, p.a) == 0.0);
  CHECK(mean_distance(p.a, p.a) == 0.0);

  const System rotation(SystemSpec::rotation(0.3819660112501051));
  for (std::size_t n : {1, 5, 40}) {
    const auto q = real_pair(rotation, 0.1, 0.35, n);
    CHECK(bowen_distance(q.a, q.b) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mean_distance(q.a, q.b) <= bowen_distance(q.a, q.b));
  }

  CHECK_THROWS_AS(bowen_distance(p.a, doubling.orbit(doubling.real_point(0.0), 3)), DomainError);
}

TEST_CASE("half rotation: ordered and unordered matches at n = 2") {
  const System half(SystemSpec::rotation(0.5));
  const auto p = real_pair(half, 0.0, 0.5, 2);
  const Match ordered = max_ordered_match(p.a, p.b, 0.1);
  CHECK(ordered.size() == 1);
  CHECK(ordered.unmatched() == 0.5);
  CHECK(ordered.flavor == MatchFlavor::Ordered);
  const Match free = max_unordered_match(p.a, p.b, 0.1);
  CHECK(free.size() == 2);
  CHECK(free.unmatched() == 0.0);
  CHECK(fk_distance(p.a, p.b) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(fk_unordered_distance(p.a, p.b) <= kTol);

  // delta beyond the diameter matches everything.
  CHECK(max_ordered_match(p.a, p.b, 0.75).size() == 2);
  CHECK_THROWS_AS(max_ordered_match(p.a, p.b, 0.0), DomainError);
  CHECK_THROWS_AS(max_unordered_match(p.a, p.b, -1.0), DomainError);
}

TEST_CASE("match witnesses respect the threshold strictly") {
  const System half(SystemSpec::rotation(0.5));
  const auto p = real_pair(half, 0.0, 0.25, 2);
  // Every cross distance is exactly 0.25.
  CHECK(max_ordered_match(p.a, p.b, 0.25).size() == 0);
  CHECK(max_ordered_match(p.a, p.b, 0.2500001).size() == 2);
  const Match m = max_unordered_match(p.a, p.b, 0.3);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(m.distances[k] < 0.3);
}

TEST_CASE("weak mean") {
  const System half(SystemSpec::rotation(0.5));
  const auto p = real_pair(half, 0.0, 0.25, 2);
  CHECK(weak_mean_distance(p.a, p.b) == 0.25);
  CHECK(weak_mean_distance(p.a, p.a) == 0.0);

  const System identity(SystemSpec::rotation(0.0));
  for (std::size_t n : {1, 3, 9}) {
    const auto q = real_pair(identity, 0.05, 0.45, n);
    CHECK(weak_mean_distance(q.a, q.b) == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("shift-by-one pair at n = 4") {
  const System shift(SystemSpec::full_shift(2, 64));
  const auto p = word_pair(shift, periodic({0, 1}, 64), periodic({1, 0}, 64), 4);
  CHECK(fk_distance(p.a, p.b) == doctest::Approx(0.25).epsilon(kTol));
  CHECK(fk_distance(p.a, p.b, {.tol = {}, .exact = true}) == 0.25);
  CHECK(oracle::fk(cost_matrix(p.a, p.b)) == 0.25);
  CHECK(fk_distance(p.a, p.a) <= kTol);
  CHECK(fk_unordered_distance(p.a, p.a) <= kTol);
}

TEST_CASE("fk tolerance must be positive") {
  const System half(SystemSpec::rotation(0.5));
  const auto p = real_pair(half, 0.0, 0.5, 2);
  CHECK_THROWS_AS(fk_distance(p.a, p.b, {.tol = 0.0, .exact = false}), DomainError);
  CHECK_THROWS_AS(fk_unordered_distance(p.a, p.b, {.tol = -1.0, .exact = false}), DomainError);
}

TEST_CASE("metric values agree with the exhaustive oracles on every system") {
  for (const auto& named : builtin_systems()) {
    CAPTURE(named.name);
    const System s(named.spec);
    const auto mu = sample_points(s, natural_measure(s), 80, 21);
    const double tol = default_tolerance(s);
    for (std::size_t t = 0; t + 1 < mu.size(); t += 2) {
      const std::size_t n = 1 + t % 6;
      const auto a = s.orbit(mu.points[t], n);
      const auto b = s.orbit(mu.points[t + 1], n);
      const Eigen::MatrixXd c = cost_matrix(a, b);
      const PairMetrics pm(a, b);
      const double fk_exact = pm.fk({.tol = {}, .exact = true});
      const double free_exact = pm.fk_unordered({.tol = {}, .exact = true});
      CHECK(fk_exact == oracle::fk(c));
      CHECK(free_exact == oracle::fk_unordered(c));
      CHECK(pm.fk() >= fk_exact);
      CHECK(pm.fk() <= fk_exact + tol);
      CHECK(pm.fk_unordered() >= free_exact);
      CHECK(pm.fk_unordered() <= free_exact + tol);
      CHECK(std::abs(pm.weak_mean() - oracle::assignment(c) / static_cast<double>(n)) <= 1e-12);
      CHECK(pm.weak_mean() == weak_mean_distance(a, b));
      CHECK(pm.fk() == fk_distance(a, b));
    }
  }
}

TEST_CASE("threshold fractions are monotone step functions") {
  const System doubling(SystemSpec::doubling());
  const auto mu = sample_points(doubling, MeasureSpec::lebesgue(), 2, 4);
  const PairMetrics pm(doubling.orbit(mu.points[0], 12), doubling.orbit(mu.points[1], 12));
  double prev_ordered = 1.0;
  double prev_free = 1.0;
  for (double delta = 0.01; delta <= 0.6; delta += 0.01) {
    const double o = pm.ordered_unmatched(delta);
    const double f = pm.unordered_unmatched(delta);
    CHECK(o <= prev_ordered);
    CHECK(f <= prev_free);
    CHECK(f <= o);
    CHECK(std::abs(o * 12 - std::round(o * 12)) < 1e-12);
    prev_ordered = o;
    prev_free = f;
  }
}

TEST_CASE("word edit distance") {
  const Word w{0, 1, 0, 1};
  const Word v{1, 0, 1, 0};
  CHECK(word_edit_distance(w, w) == 0.0);
  CHECK(word_lcs(w, v) == 3);
  CHECK(word_edit_distance(w, v) == 0.25);
  CHECK(word_edit_distance(Word(6, 0), Word(6, 1)) == 1.0);
  CHECK_THROWS_AS(word_edit_distance(w, Word{0, 1}), DomainError);

  auto gen = make_stream(9, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + uniform_index(gen, 10);
    Word a(n), b(n);
    for (auto& x : a) x = static_cast<std::uint16_t>(uniform_index(gen, 3));
    for (auto& x : b) x = static_cast<std::uint16_t>(uniform_index(gen, 3));
    CHECK(word_lcs(a, b) == oracle::lcs(a, b));
  }
}

TEST_CASE("metric kind names") {
  for (auto k : {MetricKind::Bowen, MetricKind::Mean, MetricKind::FK, MetricKind::FKUnordered, MetricKind::WeakMean}) {
    CHECK(parse_metric_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_metric_kind("hamming"), ConfigError);
}

TEST_CASE("ball predicates agree with exact distances") {
  for (const auto& named : builtin_systems()) {
    CAPTURE(named.name);
    const System s(named.spec);
    const auto mu = sample_points(s, natural_measure(s), 24, 8);
    const std::size_t n = 10;
    const auto segs = [&] {
      std::vector<OrbitSegment> out;
      for (const auto& p : mu.points) out.push_back(s.orbit(p, n));
      return out;
    }();
    for (auto kind : {MetricKind::FK, MetricKind::FKUnordered, MetricKind::Bowen, MetricKind::WeakMean}) {
      for (double r : {0.05, 0.1, 0.3}) {
        const BallTest closed(segs, kind, r, Threshold::Closed);
        const BallTest open(segs, kind, r, Threshold::Strict);
        for (std::size_t i = 0; i < segs.size(); ++i) {
          for (std::size_t j = 0; j < segs.size(); ++j) {
            const PairMetrics pm(segs[i], segs[j]);
            double d = 0.0;
            switch (kind) {
              case MetricKind::FK:
                d = pm.fk({.tol = {}, .exact = true});
                break;
              case MetricKind::FKUnordered:
                d = pm.fk_unordered({.tol = {}, .exact = true});
                break;
              case MetricKind::Bowen:
                d = pm.bowen();
                break;
              default:
                d = pm.weak_mean();
                break;
            }
            // Weak-mean values come out of a floating-point assignment; skip near-ties.
            if (kind == MetricKind::WeakMean && std::abs(d - r) < 1e-9) continue;
            CHECK(closed(i, j) == (d <= r));
            CHECK(open(i, j) == (d < r));
          }
        }
      }
    }
  }
}

TEST_CASE("ball predicates on exact ties") {
  const System half(SystemSpec::rotation(0.5));
  const auto p = real_pair(half, 0.0, 0.5, 2);
  // d_FK2 = 1/2 exactly.
  CHECK(within(MetricKind::FK, p.a, p.b, 0.5, Threshold::Closed));
  CHECK_FALSE(within(MetricKind::FK, p.a, p.b, 0.5, Threshold::Strict));
  CHECK(within(MetricKind::FKUnordered, p.a, p.b, 1e-12, Threshold::Strict));
}

TEST_CASE("cylinder weak-mean bracket contains the assignment value") {
  const System shift(SystemSpec::full_shift(2));
  const auto mu = sample_points(shift, MeasureSpec::bernoulli({0.5, 0.5}), 40, 6);
  for (std::size_t n : {3, 16, 64}) {
    for (std::size_t t = 0; t + 1 < mu.size(); t += 2) {
      const auto a = shift.orbit(mu.points[t], n);
      const auto b = shift.orbit(mu.points[t + 1], n);
      const Bracket br = cylinder_weak_mean_bracket(a, b);
      const double f = weak_mean_distance(a, b);
      CHECK(br.lower <= f + 1e-12);
      CHECK(f <= br.upper + 1e-12);
    }
  }
}

TEST_CASE("cylinder depth and mismatch budget") {
  CHECK(cylinder_depth(0.25, Threshold::Closed) == 2);
  CHECK(cylinder_depth(0.25, Threshold::Strict) == 3);
  CHECK(cylinder_depth(1.5, Threshold::Strict) == 0);
  CHECK(mismatch_budget(MetricKind::FK, 10, 0.2, Threshold::Closed) == 2);
  CHECK(mismatch_budget(MetricKind::FK, 10, 0.2, Threshold::Strict) == 1);
  CHECK(mismatch_budget(MetricKind::Bowen, 10, 0.2, Threshold::Strict) == 0);
}
