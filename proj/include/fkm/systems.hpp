#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fkm {

enum class SystemKind { FullShift, Rotation, Doubling, Tent, Logistic, TwoComponent };

/// How distances between phase-space points are measured.
enum class PhaseMetric {
  Cylinder,  ///< 2^-(first differing coordinate), 0 when equal through the horizon
  Circle,    ///< min(|x-y|, 1-|x-y|)
  Interval,  ///< |x-y| on [0,1]
  Disjoint,  ///< two components at distance 1, component metric inside
};

/// Parameters of a built-in system. `horizon` is the stored coordinate count for
/// shifts and the binary-expansion length of the lift for doubling and tent;
/// 0 selects the default.
struct SystemSpec {
  SystemKind kind = SystemKind::Doubling;
  int alphabet = 2;
  double alpha = 0.0;
  std::size_t horizon = 0;
  double weight_a = 0.5;
  std::vector<SystemSpec> components;

  bool operator==(const SystemSpec&) const = default;

  static SystemSpec full_shift(int k, std::size_t horizon = 0);
  static SystemSpec rotation(double alpha);
  static SystemSpec doubling(std::size_t horizon = 0);
  static SystemSpec tent(std::size_t horizon = 0);
  static SystemSpec logistic();
  static SystemSpec two_component(SystemSpec a, SystemSpec b, double weight_a = 0.5);
};

/// Default symbolic horizon, 2 * 64 + 32: enough for orbits up to n = 64 with a
/// 2^-96 truncation error.
inline constexpr std::size_t kDefaultShiftHorizon = 160;
/// Default expansion length of doubling/tent lifts; orbits stay non-degenerate
/// for n <= horizon - 53.
inline constexpr std::size_t kDefaultLiftHorizon = 512;

/// An element of a phase space.
///
/// Shift points keep their coordinates in `digits` (length = horizon for base
/// points, shorter for points reached by shifting). Doubling and tent points
/// keep the binary expansion of their doubling-map lift in `digits` and the
/// derived coordinate in `value`, so orbits are exact dyadic arithmetic instead
/// of collapsing to 0 after 53 floating-point doublings. Rotation and logistic
/// points use `value` only. `component` selects the half of a two-component
/// system.
struct Point {
  double value = 0.0;
  std::vector<std::uint8_t> digits;
  std::uint8_t component = 0;

  bool operator==(const Point&) const = default;
};

class OrbitSegment;

/// Immutable evaluator for a SystemSpec. Copies share state.
class System {
 public:
  /// Validates the spec; throws ConfigError on invalid parameters.
  explicit System(const SystemSpec& spec);

  const SystemSpec& spec() const;
  SystemKind kind() const;
  PhaseMetric metric() const;
  double diameter() const;
  /// Coordinate horizon (shifts) or lift length (doubling, tent); 0 otherwise.
  std::size_t horizon() const;
  bool symbolic() const { return kind() == SystemKind::FullShift; }
  /// Sub-system for a two-component system (index 0 or 1).
  const System& component(std::size_t index) const;

  /// Real-coordinate point; for doubling/tent the lift expansion is the exact
  /// binary expansion of the double (truncated to the horizon).
  Point real_point(double value, std::uint8_t component = 0) const;
  /// Shift point from coordinates; shorter arrays are padded with zeros.
  Point symbolic_point(std::vector<std::uint8_t> symbols, std::uint8_t component = 0) const;

  /// Throws DomainError if `p` is not an element of this phase space.
  void validate(const Point& p) const;
  Point apply(const Point& p) const;
  double distance(const Point& p, const Point& q) const;
  OrbitSegment orbit(const Point& x, std::size_t n) const;

  /// True when the two handles describe the same system.
  bool same_as(const System& other) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

System make_system(const SystemSpec& spec);

/// Parses {"kind": "full_shift", "k": 2, "horizon": 96}, {"kind": "rotation",
/// "alpha": a}, {"kind": "doubling"}, {"kind": "tent"}, {"kind": "logistic"},
/// {"kind": "two_component", "a": {...}, "b": {...}, "weight_a": w}. Also accepts
/// the shorthand "full_shift:2", "rotation:0.5", "doubling", "tent", "logistic".
SystemSpec parse_system_spec(const std::string& text);
std::string to_json(const SystemSpec& spec);

/// The length-n forward orbit T^0 x ... T^(n-1) x.
///
/// Real systems store the coordinates; shift systems store the base coordinates
/// once, point i being the suffix starting at i.
class OrbitSegment {
 public:
  const System& system() const { return system_; }
  std::size_t size() const { return size_; }
  bool symbolic() const { return !digits_.empty(); }
  std::uint8_t component() const { return component_; }
  /// Metric of the (component) space the orbit lives in.
  PhaseMetric leaf_metric() const { return leaf_metric_; }
  /// Coordinates of T^i x (real systems).
  std::span<const double> values() const { return values_; }
  /// Base coordinates (shift systems); T^i x is digits().subspan(i).
  std::span<const std::uint8_t> digits() const { return digits_; }

  Point point(std::size_t i) const;
  /// d(T^i x, T^j y); both segments must come from the same system.
  double distance(std::size_t i, const OrbitSegment& other, std::size_t j) const;

 private:
  friend class System;
  OrbitSegment(System system, std::size_t size) : system_(std::move(system)), size_(size) {}

  System system_;
  std::size_t size_;
  std::vector<double> values_;
  std::vector<std::uint8_t> digits_;
  std::uint8_t component_ = 0;
  PhaseMetric leaf_metric_ = PhaseMetric::Circle;
};

/// Throws DomainError unless both segments have the same length and system.
void require_comparable(const OrbitSegment& a, const OrbitSegment& b);

/// d between two coordinate arrays under the cylinder metric.
double cylinder_distance(std::span<const std::uint8_t> p, std::span<const std::uint8_t> q);
double circle_distance(double x, double y);

// ---------------------------------------------------------------------------
// Invariant measures

enum class MeasureKind {
  Bernoulli,  ///< product measure on a full shift
  Lebesgue,   ///< doubling, tent, rotation; per component for two-component systems
  Arcsine,    ///< logistic map: x = sin^2(pi u / 2), u uniform
};

struct MeasureSpec {
  MeasureKind kind = MeasureKind::Lebesgue;
  std::vector<double> probabilities;  ///< Bernoulli weights

  static MeasureSpec bernoulli(std::vector<double> p);
  static MeasureSpec lebesgue() { return {MeasureKind::Lebesgue, {}}; }
  static MeasureSpec arcsine() { return {MeasureKind::Arcsine, {}}; }
};

/// "bernoulli:0.5,0.5", "lebesgue", "arcsine".
MeasureSpec parse_measure_spec(const std::string& text);
std::string to_string(const MeasureSpec& spec);
/// The invariant measure the built-in sampler uses when none is given.
MeasureSpec natural_measure(const System& system);

enum class Provenance { IidSampler, OrbitAverage };

/// Finite point set with uniform weights 1/M standing in for an invariant measure.
struct EmpiricalMeasure {
  std::vector<Point> points;
  Provenance provenance = Provenance::IidSampler;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  double weight() const { return 1.0 / static_cast<double>(points.size()); }
};

/// Draws `count` points; point i uses the RNG stream (seed, i).
EmpiricalMeasure sample_points(const System& system, const MeasureSpec& measure,
                               std::size_t count, std::uint64_t seed);
/// Points T^0 x ... T^(count-1) x with equal weights.
EmpiricalMeasure orbit_average(const System& system, const Point& x, std::size_t count);

// ---------------------------------------------------------------------------
// Partitions and itineraries

struct Partition {
  enum class Kind { ZeroCoordinate, IntervalBins };
  Kind kind = Kind::IntervalBins;
  std::size_t cells = 2;

  static Partition zero_coordinate(std::size_t alphabet);
  static Partition bins(std::size_t count);
};

/// "zero" (shift systems, one cell per symbol) or "bins:<count>".
Partition parse_partition(const std::string& text, const System& system);
std::string to_string(const Partition& partition);

using Word = std::vector<std::uint16_t>;

/// Cell index of p. Interval bins are left-closed: [j/c, (j+1)/c), with 1 in the
/// last cell.
std::size_t cell_of(const System& system, const Partition& partition, const Point& p);
/// w_i = cell containing T^i x.
Word itinerary(const System& system, const Partition& partition, const Point& x, std::size_t n);

}  // namespace fkm
