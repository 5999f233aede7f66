#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fkm/error.hpp"
#include "fkm/rng.hpp"
#include "fkm/systems.hpp"
#include "fkm/verify.hpp"

using namespace fkm;

namespace {

std::vector<double> coords(const OrbitSegment& s) { return {s.values().begin(), s.values().end()}; }

Point shift_point(const System& s, std::vector<std::uint8_t> head) { return s.symbolic_point(std::move(head)); }

}  // namespace

TEST_CASE("make_system reports diameters and rejects bad parameters") {
  CHECK(System(SystemSpec::rotation(0.0)).diameter() == 0.5);
  const System shift(SystemSpec::full_shift(2, 64));
  CHECK(shift.diameter() == 1.0);
  CHECK(shift.horizon() == 64);
  CHECK(System(SystemSpec::doubling()).metric() == PhaseMetric::Circle);
  CHECK(System(SystemSpec::tent()).metric() == PhaseMetric::Interval);
  CHECK(System(SystemSpec::two_component(SystemSpec::rotation(0), SystemSpec::doubling())).diameter() == 1.0);

  CHECK_THROWS_AS(System(SystemSpec::full_shift(1)), ConfigError);
  CHECK_THROWS_AS(System(SystemSpec::rotation(1.0)), ConfigError);
  CHECK_THROWS_AS(System(SystemSpec::rotation(-0.25)), ConfigError);
  CHECK_THROWS_AS(System(SystemSpec::full_shift(2, 1)), ConfigError);
}

TEST_CASE("orbits of simple points") {
  const System doubling(SystemSpec::doubling());
  CHECK(coords(doubling.orbit(doubling.real_point(0.0), 4)) == std::vector<double>{0, 0, 0, 0});
  CHECK(coords(doubling.orbit(doubling.real_point(0.5), 3)) == std::vector<double>{0.5, 0, 0});

  const System half(SystemSpec::rotation(0.5));
  CHECK(coords(half.orbit(half.real_point(0.0), 4)) == std::vector<double>{0, 0.5, 0, 0.5});

  CHECK_THROWS_AS(doubling.orbit(doubling.real_point(0.25), 0), DomainError);
  const System shift(SystemSpec::full_shift(2, 16));
  CHECK_THROWS_AS(shift.orbit(shift_point(shift, {1}), 17), HorizonError);
  CHECK_NOTHROW(shift.orbit(shift_point(shift, {1}), 16));
}

TEST_CASE("doubling orbits stay exact past 53 steps") {
  const System doubling(SystemSpec::doubling());
  auto mu = sample_points(doubling, MeasureSpec::lebesgue(), 1, 3);
  const auto seg = doubling.orbit(mu.points[0], 200);
  std::size_t zeros = 0;
  for (double v : seg.values()) zeros += v == 0.0;
  CHECK(zeros < 10);
  for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
    const double next = std::fmod(2.0 * seg.values()[i], 1.0);
    CHECK(seg.values()[i + 1] == doctest::Approx(next).epsilon(1e-9));
  }
}

TEST_CASE("dyadic systems snap inputs onto the lift grid") {
  const System doubling(SystemSpec::doubling());
  const Point third = doubling.real_point(1.0 / 3.0);
  CHECK(std::abs(third.value - 1.0 / 3.0) <= std::ldexp(1.0, -53));
  CHECK_NOTHROW(doubling.validate(third));
  const System tent(SystemSpec::tent());
  const auto seg = tent.orbit(tent.real_point(0.3), 3);
  CHECK(seg.values()[1] == doctest::Approx(0.6));
  CHECK(seg.values()[2] == doctest::Approx(0.8));
}

TEST_CASE("pairwise distances") {
  const System circle(SystemSpec::rotation(0.1));
  CHECK(circle.distance(circle.real_point(0.1), circle.real_point(0.9)) == doctest::Approx(0.2));
  const System shift(SystemSpec::full_shift(2, 8));
  CHECK(shift.distance(shift_point(shift, {0, 0, 0}), shift_point(shift, {0, 0, 1})) == 0.25);
  const Point x = shift_point(shift, {1, 0, 1, 1});
  CHECK(shift.distance(x, x) == 0.0);

  const System two(SystemSpec::two_component(SystemSpec::rotation(0), SystemSpec::rotation(0)));
  CHECK(two.distance(two.real_point(0.2, 0), two.real_point(0.2, 1)) == 1.0);
  CHECK(two.distance(two.real_point(0.2, 1), two.real_point(0.3, 1)) == doctest::Approx(0.1));
}

TEST_CASE("segments from different systems are not comparable") {
  const System a(SystemSpec::rotation(0.1));
  const System b(SystemSpec::rotation(0.2));
  CHECK_THROWS_AS(require_comparable(a.orbit(a.real_point(0), 3), b.orbit(b.real_point(0), 3)), DomainError);
  CHECK_THROWS_AS(require_comparable(a.orbit(a.real_point(0), 3), a.orbit(a.real_point(0), 4)), DomainError);
}

TEST_CASE("metric axioms on sampled triples") {
  for (const auto& named : builtin_systems()) {
    CAPTURE(named.name);
    const System s(named.spec);
    const auto mu = sample_points(s, natural_measure(s), 60, 11);
    for (std::size_t t = 0; t + 2 < mu.size(); t += 3) {
      const Point& x = mu.points[t];
      const Point& y = mu.points[t + 1];
      const Point& z = mu.points[t + 2];
      CHECK(s.distance(x, y) == s.distance(y, x));
      CHECK(s.distance(x, z) <= s.distance(x, y) + s.distance(y, z) + 1e-12);
      CHECK(s.distance(x, x) == 0.0);
      CHECK(s.distance(x, y) <= s.diameter());
      CHECK((s.distance(x, y) == 0.0) == (x == y));
    }
  }
}

TEST_CASE("orbit points match repeated map application") {
  for (const auto& named : builtin_systems()) {
    CAPTURE(named.name);
    const System s(named.spec);
    const auto mu = sample_points(s, natural_measure(s), 5, 2);
    for (const auto& x : mu.points) {
      const auto seg = s.orbit(x, 64);
      Point p = x;
      for (std::size_t i = 0; i < seg.size(); ++i) {
        const Point q = seg.point(i);
        if (s.symbolic()) {
          CHECK(s.distance(p, q) == 0.0);
        } else {
          CHECK(std::abs(p.value - q.value) <= 1e-9);
        }
        p = s.apply(p);
      }
    }
  }
}

TEST_CASE("sampling is deterministic and matches the measure") {
  const System shift(SystemSpec::full_shift(2));
  const auto a = sample_points(shift, MeasureSpec::bernoulli({0.5, 0.5}), 4, 7);
  const auto b = sample_points(shift, MeasureSpec::bernoulli({0.5, 0.5}), 4, 7);
  CHECK(a.points == b.points);
  CHECK(a.points.size() == 4);
  CHECK(a.points[0].digits.size() == shift.horizon());

  const System doubling(SystemSpec::doubling());
  const auto mu = sample_points(doubling, MeasureSpec::lebesgue(), 1000, 7);
  double mean = 0.0;
  for (const auto& p : mu.points) mean += p.value;
  mean /= 1000.0;
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.55);

  const System three(SystemSpec::full_shift(3));
  CHECK_NOTHROW(sample_points(three, MeasureSpec::bernoulli({0.7, 0.2, 0.1}), 3, 1));
  CHECK_THROWS_AS(sample_points(three, MeasureSpec::bernoulli({0.7, 0.2, 0.2}), 3, 1), ConfigError);
  CHECK_THROWS_AS(sample_points(three, MeasureSpec::bernoulli({0.5, 0.5}), 3, 1), ConfigError);
  CHECK_THROWS_AS(sample_points(doubling, MeasureSpec::lebesgue(), 0, 1), ConfigError);
}

TEST_CASE("logistic arcsine samples lie in the unit interval") {
  const System logistic(SystemSpec::logistic());
  const auto mu = sample_points(logistic, MeasureSpec::arcsine(), 500, 5);
  std::size_t low = 0;
  for (const auto& p : mu.points) {
    CHECK(p.value >= 0.0);
    CHECK(p.value <= 1.0);
    low += p.value < 0.1;
  }
  // Arcsine mass of [0, 0.1) is about 0.205.
  CHECK(low > 60);
  CHECK(low < 150);
}

TEST_CASE("itineraries") {
  const System shift(SystemSpec::full_shift(2, 16));
  const Partition zero = Partition::zero_coordinate(2);
  CHECK(itinerary(shift, zero, shift_point(shift, {0, 1, 1, 0}), 4) == Word{0, 1, 1, 0});

  const System doubling(SystemSpec::doubling());
  CHECK(itinerary(doubling, Partition::bins(2), doubling.real_point(0.25), 3) == Word{0, 1, 0});

  const System identity(SystemSpec::rotation(0.0));
  const Word w = itinerary(identity, Partition::bins(4), identity.real_point(0.6), 5);
  CHECK(w == Word(5, 2));

  // Boundaries belong to the cell on their right.
  CHECK(cell_of(doubling, Partition::bins(4), doubling.real_point(0.5)) == 2);
  CHECK_THROWS_AS(parse_partition("zero", doubling), ConfigError);
  CHECK_THROWS_AS(Partition::bins(1), ConfigError);
}

TEST_CASE("system spec JSON round trip") {
  const auto spec = parse_system_spec(R"({"kind": "full_shift", "k": 2, "horizon": 96})");
  CHECK(spec == SystemSpec::full_shift(2, 96));
  CHECK(parse_system_spec(to_json(spec)) == spec);
  CHECK(parse_system_spec("rotation:0.5") == SystemSpec::rotation(0.5));
  const auto two = parse_system_spec(
      R"({"kind": "two_component", "a": {"kind": "rotation", "alpha": 0.25}, "b": {"kind": "tent"}, "weight_a": 0.3})");
  CHECK(two.components.size() == 2);
  CHECK(two.weight_a == 0.3);
  CHECK(parse_system_spec(to_json(two)) == two);
  CHECK_THROWS_AS(parse_system_spec(R"({"kind": "henon"})"), ConfigError);
  CHECK_THROWS_AS(parse_system_spec("{not json"), ConfigError);
}

TEST_CASE("rng streams are independent of evaluation order") {
  std::mt19937_64 a = make_stream(5, 3);
  std::mt19937_64 b = make_stream(5, 3);
  std::mt19937_64 c = make_stream(5, 4);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
}
