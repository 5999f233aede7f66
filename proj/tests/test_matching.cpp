#include <random>

#include "doctest.h"
#include "fkm/error.hpp"
#include "fkm/matching.hpp"
#include "fkm/rng.hpp"
#include "oracles.hpp"

using namespace fkm;

namespace {

// Costs on a coarse grid so ties against the threshold are common.
Eigen::MatrixXd grid_costs(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, int levels) {
  Eigen::MatrixXd c(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      c(i, j) = static_cast<double>(uniform_index(gen, static_cast<std::uint64_t>(levels))) / levels;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("ordered matching agrees with enumeration") {
  auto gen = make_stream(1, 0);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_index(gen, 8));
    const Eigen::MatrixXd c = grid_costs(gen, n, n, 5);
    const double delta = static_cast<double>(uniform_index(gen, 6)) / 5.0;
    for (auto mode : {Threshold::Strict, Threshold::Closed}) {
      const bool strict = mode == Threshold::Strict;
      const std::size_t expected = oracle::ordered_match(c, delta, strict);
      CHECK(ordered_match_size(c, delta, mode) == expected);
      CHECK(ordered_match_size(threshold_relation(c, delta, mode)) == expected);
      const auto pairs = ordered_match_pairs(c, delta, mode);
      REQUIRE(pairs.size() == expected);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        CHECK(passes(c(pairs[k].first, pairs[k].second), delta, mode));
        if (k > 0) {
          CHECK(pairs[k].first > pairs[k - 1].first);
          CHECK(pairs[k].second > pairs[k - 1].second);
        }
      }
    }
  }
}

TEST_CASE("bit-parallel LCS across word boundaries") {
  auto gen = make_stream(2, 0);
  for (int t = 0; t < 60; ++t) {
    const auto rows = static_cast<Eigen::Index>(1 + uniform_index(gen, 150));
    const auto cols = static_cast<Eigen::Index>(1 + uniform_index(gen, 150));
    const Eigen::MatrixXd c = grid_costs(gen, rows, cols, 3);
    CHECK(ordered_match_size(threshold_relation(c, 0.5, Threshold::Strict)) ==
          ordered_match_size(c, 0.5, Threshold::Strict));
  }
}

TEST_CASE("maximum matching agrees with enumeration") {
  auto gen = make_stream(3, 0);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_index(gen, 7));
    const Eigen::MatrixXd c = grid_costs(gen, n, n, 4);
    const double delta = static_cast<double>(uniform_index(gen, 5)) / 4.0;
    const auto rel = threshold_relation(c, delta, Threshold::Strict);
    const std::size_t expected = oracle::unordered_match(c, delta);
    CHECK(maximum_matching_size(rel) == expected);
    CHECK(maximum_matching_size(rel) >= ordered_match_size(rel));
    const auto pairs = maximum_matching(rel);
    REQUIRE(pairs.size() == expected);
    std::vector<char> row_used(static_cast<std::size_t>(n)), col_used(static_cast<std::size_t>(n));
    for (auto [i, j] : pairs) {
      CHECK(c(i, j) < delta);
      CHECK_FALSE(row_used[i]);
      CHECK_FALSE(col_used[j]);
      row_used[i] = col_used[j] = 1;
    }
  }
}

TEST_CASE("assignment agrees with all permutations") {
  auto gen = make_stream(4, 0);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_index(gen, 7));
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = uniform01(gen);
    const auto a = min_cost_assignment(c);
    CHECK(std::abs(a.cost - oracle::assignment(c)) <= 1e-12);
    double recomputed = 0.0;
    std::vector<char> seen(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < a.column_of_row.size(); ++i) {
      CHECK_FALSE(seen[a.column_of_row[i]]);
      seen[a.column_of_row[i]] = 1;
      recomputed += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.column_of_row[i]));
    }
    CHECK(std::abs(recomputed - a.cost) <= 1e-12);
  }
  CHECK_THROWS_AS(min_cost_assignment(Eigen::MatrixXd(2, 3)), DomainError);
}

TEST_CASE("threshold search: bisection brackets the exact scan") {
  auto gen = make_stream(5, 0);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<Eigen::Index>(1 + uniform_index(gen, 6));
    const Eigen::MatrixXd c = grid_costs(gen, n, n, 7);
    auto unmatched = [&](double delta, Threshold mode) {
      const std::size_t k = delta > 0.0 || mode == Threshold::Closed ? ordered_match_size(c, delta, mode) : 0;
      return unmatched_fraction(k, static_cast<std::size_t>(n));
    };
    const double exact = threshold_exact(c, unmatched);
    CHECK(exact == oracle::fk(c));
    const double tol = 1e-9;
    const double bisected = threshold_by_bisection(unmatched, 1.0 + tol, tol);
    CHECK(bisected >= exact);
    CHECK(bisected <= exact + tol);
  }
}

TEST_CASE("bisection rejects a nonpositive tolerance") {
  auto f = [](double, Threshold) { return 0.0; };
  CHECK_THROWS_AS(threshold_by_bisection(f, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(threshold_by_bisection(f, 1.0, -1e-9), DomainError);
}

TEST_CASE("transposed relation") {
  BitRelation r(3, 70);
  r.set(0, 69);
  r.set(2, 1);
  const auto t = r.transposed();
  CHECK(t.rows() == 70);
  CHECK(t.test(69, 0));
  CHECK(t.test(1, 2));
  CHECK_FALSE(t.test(0, 0));
}
