#include "fkm/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fkm/error.hpp"
#include "fkm/metrics.hpp"
#include "fkm/rng.hpp"

namespace fkm {

std::vector<NamedSystem> builtin_systems() {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  return {
      {"full_shift:2", SystemSpec::full_shift(2)},
      {"full_shift:3", SystemSpec::full_shift(3)},
      {"rotation:golden", SystemSpec::rotation(golden)},
      {"rotation:0.5", SystemSpec::rotation(0.5)},
      {"doubling", SystemSpec::doubling()},
      {"tent", SystemSpec::tent()},
      {"logistic", SystemSpec::logistic()},
      {"two_component", SystemSpec::two_component(SystemSpec::rotation(golden), SystemSpec::doubling())},
  };
}

std::vector<std::string> suite_names() {
  return {"lemma-chain", "orbit-shift", "weak-mean-bounds", "symmetry", "triangle"};
}

namespace {

class Recorder {
 public:
  explicit Recorder(SuiteReport& report) : report_(report) {}

  void check(bool ok, const std::string& system, std::size_t n, const std::string& what) {
    ++report_.checks;
    if (ok) return;
    ++report_.violations;
    if (report_.samples.size() < 8) report_.samples.push_back(system + " n=" + std::to_string(n) + ": " + what);
  }

 private:
  SuiteReport& report_;
};

std::string describe(const char* lhs, double a, const char* rhs, double b) {
  std::ostringstream s;
  s.precision(17);
  s << lhs << "=" << a << " " << rhs << "=" << b;
  return s.str();
}

// Points for trial t: stream (seed, t * width + k) draws the k-th point.
std::vector<Point> draw(const System& system, std::uint64_t seed, std::size_t stream, std::size_t count) {
  return sample_points(system, natural_measure(system), count, splitmix64(seed) ^ stream).points;
}

template <typename Body>
void for_each_case(std::size_t trials, std::uint64_t seed, std::size_t points_per_trial, Body&& body) {
  for (const auto& named : builtin_systems()) {
    const System system(named.spec);
    for (std::size_t n : kSuiteLengths) {
      for (std::size_t t = 0; t < trials; ++t) {
        const auto pts = draw(system, seed, (n << 32) ^ t, points_per_trial);
        body(named.name, system, n, pts);
      }
    }
  }
}

void lemma_chain(Recorder& rec, std::size_t trials, std::uint64_t seed) {
  for_each_case(trials, seed, 2, [&](const std::string& name, const System& s, std::size_t n, const auto& p) {
    const PairMetrics pm(s.orbit(p[0], n), s.orbit(p[1], n));
    const double tol = default_tolerance(s);
    const double fk = pm.fk();
    const double mean = pm.mean();
    const double bowen = pm.bowen();
    rec.check(fk <= std::sqrt(mean) + 2 * tol, name, n, describe("fk", fk, "sqrt(mean)", std::sqrt(mean)));
    rec.check(mean <= bowen, name, n, describe("mean", mean, "bowen", bowen));
  });
}

void orbit_shift(Recorder& rec, std::size_t trials, std::uint64_t seed) {
  for_each_case(trials, seed, 1, [&](const std::string& name, const System& s, std::size_t n, const auto& p) {
    const double tol = default_tolerance(s);
    const double fk = fk_distance(s.orbit(p[0], n), s.orbit(s.apply(p[0]), n));
    const double bound = 1.0 / static_cast<double>(n);
    rec.check(fk <= bound + 2 * tol, name, n, describe("fk(x,Tx)", fk, "1/n", bound));
  });
}

void weak_mean_bounds(Recorder& rec, std::size_t trials, std::uint64_t seed) {
  for_each_case(trials, seed, 2, [&](const std::string& name, const System& s, std::size_t n, const auto& p) {
    const PairMetrics pm(s.orbit(p[0], n), s.orbit(p[1], n));
    const double tol = default_tolerance(s);
    const double f = pm.weak_mean();
    const double fk_free = pm.fk_unordered();
    const double fk = pm.fk();
    rec.check(fk_free <= std::sqrt(f) + 2 * tol, name, n, describe("fk~", fk_free, "sqrt(F)", std::sqrt(f)));
    rec.check(f <= (fk_free + 2 * tol) * (1.0 + s.diameter()), name, n,
              describe("F", f, "(fk~+2tol)(1+diam)", (fk_free + 2 * tol) * (1.0 + s.diameter())));
    rec.check(fk_free <= fk + 2 * tol, name, n, describe("fk~", fk_free, "fk", fk));
  });
}

void symmetry(Recorder& rec, std::size_t trials, std::uint64_t seed) {
  for_each_case(trials, seed, 3, [&](const std::string& name, const System& s, std::size_t n, const auto& p) {
    const auto a = s.orbit(p[0], n);
    const auto b = s.orbit(p[1], n);
    const PairMetrics ab(a, b);
    const PairMetrics ba(b, a);
    // Third point's first coordinate distance doubles as a random threshold.
    const double delta = std::max(1e-3, s.distance(p[0], p[2]));
    rec.check(ab.bowen() == ba.bowen(), name, n, "bowen asymmetric");
    rec.check(ab.mean() == ba.mean(), name, n, "mean asymmetric");
    rec.check(ab.fk() == ba.fk(), name, n, describe("fk(a,b)", ab.fk(), "fk(b,a)", ba.fk()));
    rec.check(ab.fk_unordered() == ba.fk_unordered(), name, n, "fk-unordered asymmetric");
    rec.check(ab.weak_mean() == ba.weak_mean(), name, n,
              describe("F(a,b)", ab.weak_mean(), "F(b,a)", ba.weak_mean()));
    rec.check(ab.ordered_unmatched(delta) == ba.ordered_unmatched(delta), name, n, "ordered match asymmetric");
    rec.check(ab.unordered_unmatched(delta) == ba.unordered_unmatched(delta), name, n, "unordered match asymmetric");
  });
}

void triangle(Recorder& rec, std::size_t trials, std::uint64_t seed) {
  for_each_case(trials, seed, 3, [&](const std::string& name, const System& s, std::size_t n, const auto& p) {
    const auto x = s.orbit(p[0], n);
    const auto y = s.orbit(p[1], n);
    const auto z = s.orbit(p[2], n);
    const double tol = default_tolerance(s);
    const double xz = fk_distance(x, z);
    const double xy = fk_distance(x, y);
    const double yz = fk_distance(y, z);
    rec.check(xz <= xy + yz + 4 * tol, name, n, describe("fk(x,z)", xz, "fk(x,y)+fk(y,z)", xy + yz));
  });
}

}  // namespace

SuiteReport run_suite(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  SuiteReport report;
  report.suite = suite;
  Recorder rec(report);
  if (suite == "lemma-chain") {
    lemma_chain(rec, trials, seed);
  } else if (suite == "orbit-shift") {
    orbit_shift(rec, trials, seed);
  } else if (suite == "weak-mean-bounds") {
    weak_mean_bounds(rec, trials, seed);
  } else if (suite == "symmetry") {
    symmetry(rec, trials, seed);
  } else if (suite == "triangle") {
    triangle(rec, trials, seed);
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  return report;
}

}  // namespace fkm
