#include "fkm/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fkm/error.hpp"

namespace fkm {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Bowen:
      return "bowen";
    case MetricKind::Mean:
      return "mean";
    case MetricKind::FK:
      return "fk";
    case MetricKind::FKUnordered:
      return "fk-unordered";
    case MetricKind::WeakMean:
      return "weakmean";
  }
  return "?";
}

MetricKind parse_metric_kind(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != '-' && c != '_') t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (t == "bowen") return MetricKind::Bowen;
  if (t == "mean") return MetricKind::Mean;
  if (t == "fk") return MetricKind::FK;
  if (t == "fkunordered") return MetricKind::FKUnordered;
  if (t == "weakmean" || t == "f") return MetricKind::WeakMean;
  throw ConfigError("unknown metric kind '" + text + "' (expected bowen, mean, fk, fk-unordered, weakmean)");
}

double default_tolerance(const System& system) { return 1e-9 * std::max(1.0, system.diameter()); }

Eigen::MatrixXd cost_matrix(const OrbitSegment& a, const OrbitSegment& b) {
  require_comparable(a, b);
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost(i, j) = a.distance(static_cast<std::size_t>(i), b, static_cast<std::size_t>(j));
    }
  }
  return cost;
}

double bowen_distance(const OrbitSegment& a, const OrbitSegment& b) {
  require_comparable(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a.distance(i, b, i));
  return worst;
}

double mean_distance(const OrbitSegment& a, const OrbitSegment& b) {
  require_comparable(a, b);
  double sum = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.distance(i, b, i);
    sum += d;
    largest = std::max(largest, d);
  }
  // Rounding in the sum must not push the average above the maximum.
  return std::min(sum / static_cast<double>(a.size()), largest);
}

namespace {

void require_positive(double delta) {
  if (!(delta > 0.0)) throw DomainError("threshold delta must be positive");
}

Match to_match(MatchFlavor flavor, const IndexPairs& pairs, const Eigen::MatrixXd& cost, double delta) {
  Match m;
  m.flavor = flavor;
  m.delta = delta;
  m.n = static_cast<std::size_t>(cost.rows());
  for (const auto& [i, j] : pairs) {
    m.domain.push_back(i);
    m.range.push_back(j);
    m.distances.push_back(cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  return m;
}

// Lexicographic order on orbit contents; fixes the orientation of the
// assignment problem so F_n is bit-identical under argument swap.
bool canonical_less(const OrbitSegment& a, const OrbitSegment& b) {
  if (a.component() != b.component()) return a.component() < b.component();
  if (a.symbolic()) {
    return std::lexicographical_compare(a.digits().begin(), a.digits().end(), b.digits().begin(), b.digits().end());
  }
  return std::lexicographical_compare(a.values().begin(), a.values().end(), b.values().begin(), b.values().end());
}

}  // namespace

Match max_ordered_match(const OrbitSegment& a, const OrbitSegment& b, double delta) {
  require_positive(delta);
  const Eigen::MatrixXd cost = cost_matrix(a, b);
  return to_match(MatchFlavor::Ordered, ordered_match_pairs(cost, delta, Threshold::Strict), cost, delta);
}

Match max_unordered_match(const OrbitSegment& a, const OrbitSegment& b, double delta) {
  require_positive(delta);
  const Eigen::MatrixXd cost = cost_matrix(a, b);
  return to_match(MatchFlavor::Unordered, unordered_match_pairs(cost, delta, Threshold::Strict), cost, delta);
}

double fk_distance(const OrbitSegment& a, const OrbitSegment& b, FkOptions options) {
  return PairMetrics(a, b).fk(options);
}

double fk_unordered_distance(const OrbitSegment& a, const OrbitSegment& b, FkOptions options) {
  return PairMetrics(a, b).fk_unordered(options);
}

double weak_mean_distance(const OrbitSegment& a, const OrbitSegment& b) { return PairMetrics(a, b).weak_mean(); }

std::size_t word_lcs(const Word& w, const Word& v) {
  if (w.size() != v.size()) throw DomainError("words have different lengths");
  std::vector<std::size_t> row(v.size() + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::size_t diagonal = 0;
    for (std::size_t j = 1; j <= v.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = w[i] == v[j - 1] ? diagonal + 1 : std::max(up, row[j - 1]);
      diagonal = up;
    }
  }
  return row.back();
}

double word_edit_distance(const Word& w, const Word& v) {
  const std::size_t k = word_lcs(w, v);
  if (w.empty()) return 0.0;
  return unmatched_fraction(k, w.size());
}

// ---------------------------------------------------------------------------
// PairMetrics

PairMetrics::PairMetrics(const OrbitSegment& a, const OrbitSegment& b)
    : n_(a.size()),
      tol_(default_tolerance(a.system())),
      upper_(std::max(1.0, a.system().diameter())),
      cost_(cost_matrix(a, b)),
      swapped_(canonical_less(b, a)) {}

double PairMetrics::bowen() const { return cost_.diagonal().maxCoeff(); }

double PairMetrics::mean() const {
  const auto diagonal = cost_.diagonal();
  return std::min(diagonal.mean(), diagonal.maxCoeff());
}

double PairMetrics::ordered_unmatched(double delta, Threshold mode) const {
  require_positive(delta);
  return unmatched_fraction(ordered_match_size(threshold_relation(cost_, delta, mode)), n_);
}

double PairMetrics::unordered_unmatched(double delta, Threshold mode) const {
  require_positive(delta);
  return unmatched_fraction(maximum_matching_size(threshold_relation(cost_, delta, mode)), n_);
}

double PairMetrics::fk(FkOptions options) const {
  auto f = [this](double delta, Threshold mode) {
    // The exact scan asks for the closed count at level 0 (pairs at distance 0).
    if (delta == 0.0 && mode == Threshold::Closed) {
      return unmatched_fraction(ordered_match_size(threshold_relation(cost_, 0.0, mode)), n_);
    }
    return delta > 0.0 ? ordered_unmatched(delta, mode) : 1.0;
  };
  if (options.exact) return threshold_exact(cost_, f);
  const double tol = options.tol.value_or(tol_);
  return threshold_by_bisection(f, upper_ + tol, tol);
}

double PairMetrics::fk_unordered(FkOptions options) const {
  auto f = [this](double delta, Threshold mode) {
    // The exact scan asks for the closed count at level 0 (pairs at distance 0).
    if (delta == 0.0 && mode == Threshold::Closed) {
      return unmatched_fraction(maximum_matching_size(threshold_relation(cost_, 0.0, mode)), n_);
    }
    return delta > 0.0 ? unordered_unmatched(delta, mode) : 1.0;
  };
  if (options.exact) return threshold_exact(cost_, f);
  const double tol = options.tol.value_or(tol_);
  return threshold_by_bisection(f, upper_ + tol, tol);
}

double PairMetrics::weak_mean() const {
  const auto assignment = swapped_ ? min_cost_assignment(cost_.transpose()) : min_cost_assignment(cost_);
  return assignment.cost / static_cast<double>(n_);
}

double orbit_distance(MetricKind kind, const OrbitSegment& a, const OrbitSegment& b, FkOptions options) {
  switch (kind) {
    case MetricKind::Bowen:
      return bowen_distance(a, b);
    case MetricKind::Mean:
      return mean_distance(a, b);
    case MetricKind::FK:
      return fk_distance(a, b, options);
    case MetricKind::FKUnordered:
      return fk_unordered_distance(a, b, options);
    case MetricKind::WeakMean:
      return weak_mean_distance(a, b);
  }
  return 0.0;
}

}  // namespace fkm
