#pragma once

// Entropy estimates from orbit-metric balls: spanning/separated counts over a
// sample, measure-spanning counts, local ball masses and complexity curves.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkm/ball.hpp"
#include "fkm/metrics.hpp"
#include "fkm/systems.hpp"

namespace fkm {

enum class SetKind { Spanning, Separated };
std::string to_string(SetKind kind);

/// Sample-relative spanning set (every point within <= epsilon of a center) or
/// separated set (centers pairwise > epsilon apart).
struct SpanningResult {
  SetKind kind = SetKind::Separated;
  MetricKind metric = MetricKind::FK;
  std::size_t n = 0;
  double epsilon = 0.0;
  std::vector<std::size_t> centers;
  bool exact = false;
  /// Measure spanning only: mass of the union of the chosen strict balls.
  double covered_mass = 1.0;

  std::size_t count() const { return centers.size(); }
};

/// Symmetric adjacency "j lies in the ball around i", one bit row per point.
class BallGraph {
 public:
  BallGraph(std::span<const OrbitSegment> segments, MetricKind kind, double radius, Threshold mode);

  std::size_t size() const { return rows_.rows(); }
  bool adjacent(std::size_t i, std::size_t j) const { return rows_.test(i, j); }
  std::span<const std::uint64_t> row(std::size_t i) const { return rows_.row(i); }
  std::vector<std::size_t> neighbors(std::size_t i) const;

 private:
  BitRelation rows_;
};

SpanningResult greedy_spanning(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon);
SpanningResult greedy_separated(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon);

/// Exhaustive minimum spanning / maximum separated subsets; sample size <= 12.
inline constexpr std::size_t kExactLimit = 12;
SpanningResult exact_spanning(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon);
SpanningResult exact_separated(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon);

/// Re-checks the cover or separation property; throws std::logic_error on failure.
void verify_result(const SpanningResult& result, std::span<const OrbitSegment> sample);

/// Greedy mass cover with strict balls until covered mass > 1 - epsilon.
SpanningResult measure_spanning(std::span<const OrbitSegment> support, MetricKind kind, double epsilon);
SpanningResult measure_spanning(const System& system, const EmpiricalMeasure& mu, std::size_t n, double epsilon,
                                MetricKind kind);

// ---------------------------------------------------------------------------
// Curves

struct EntropyRow {
  std::size_t n = 0;
  double scale = 0.0;  ///< epsilon or delta
  double value = 0.0;  ///< count or mass
  double log_value = 0.0;
  /// Count rows: count * e <= sample size, so the sample can still resolve
  /// growth. Mass rows: mass > 0.
  bool resolved = true;
  /// FK kinds: unmatched points a ball member may have at this (n, scale).
  std::size_t budget = 0;
};

struct SlopeFit {
  double scale = 0.0;
  double slope = 0.0;
  std::size_t rows_used = 0;
  /// Fewer than two resolved rows; the fit fell back to the plain top half.
  bool saturated = false;
};

struct EntropyCurve {
  MetricKind metric = MetricKind::FK;
  std::size_t sample_size = 0;
  std::vector<EntropyRow> rows;
  std::vector<SlopeFit> fits;

  const SlopeFit& fit_for(double scale) const;
};

/// OLS slope of y against n over the top half (by n) of the resolved rows,
/// using at least two rows. Rows are grouped by mismatch budget and each group
/// gets its own intercept, so budget steps do not register as growth.
SlopeFit fit_slope(std::span<const EntropyRow> rows, double scale, bool log_of_value);

EntropyCurve topological_entropy_curve(const System& system, const MeasureSpec& sampler, std::size_t sample_size,
                                       std::span<const std::size_t> ns, std::span<const double> epsilons,
                                       MetricKind kind, std::uint64_t seed, SetKind set = SetKind::Separated);

EntropyCurve katok_entropy_curve(const System& system, const EmpiricalMeasure& mu, std::span<const std::size_t> ns,
                                 std::span<const double> epsilons, MetricKind kind);

struct LocalEntropyRow {
  std::size_t n = 0;
  double delta = 0.0;
  double mass = 0.0;
  double estimate = 0.0;  ///< -log(mass) / n; unset meaning when zero_mass
  bool zero_mass = false;
};

struct LocalEntropyEstimate {
  Point base;
  std::size_t sample_size = 0;
  std::vector<LocalEntropyRow> rows;

  /// Row at the largest n and smallest delta, if its mass is nonzero.
  std::optional<double> headline() const;
};

/// Mass of strict FK balls B(x, delta) under mu for each (n, delta).
LocalEntropyEstimate brin_katok_local(const System& system, const EmpiricalMeasure& mu, const Point& x,
                                      std::span<const std::size_t> ns, std::span<const double> deltas,
                                      MetricKind kind = MetricKind::FK);

EntropyCurve as_curve(const LocalEntropyEstimate& estimate, MetricKind kind);

// ---------------------------------------------------------------------------
// Complexity

/// Reference growth U(n) = multiplier * n^a, multiplier * a * n or multiplier * b^n.
struct Scale {
  enum class Kind { Power, Linear, Exponential };
  Kind kind = Kind::Linear;
  double parameter = 1.0;
  double multiplier = 1.0;

  double operator()(std::size_t n) const;
};

/// "power:a", "linear:a", "exp:b", each optionally followed by ":multiplier".
Scale parse_scale(const std::string& text);
std::string to_string(const Scale& scale);

struct ComplexityRow {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::size_t count = 0;
  double ratio = 0.0;  ///< count / U(n)
};

struct ComplexityCurve {
  std::vector<ComplexityRow> rows;
  Scale scale;
  double threshold = 0.1;
  bool weaker = false;  ///< false means not determined

  std::string verdict() const { return weaker ? "weaker" : "not-determined"; }
};

inline constexpr double kDefaultComplexityThreshold = 0.1;

/// Fills ratios and the verdict: weaker iff for every epsilon the minimum ratio
/// over n is below the threshold.
ComplexityCurve complexity_compare(std::vector<ComplexityRow> rows, const Scale& scale,
                                   double threshold = kDefaultComplexityThreshold);

/// measure_spanning counts for each (n, epsilon).
std::vector<ComplexityRow> complexity_rows(const System& system, const EmpiricalMeasure& mu,
                                           std::span<const std::size_t> ns, std::span<const double> epsilons,
                                           MetricKind kind);

/// Orbit segments of length n for every point.
std::vector<OrbitSegment> orbits_of(const System& system, std::span<const Point> points, std::size_t n);

}  // namespace fkm
