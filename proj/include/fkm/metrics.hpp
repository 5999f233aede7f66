#pragma once

// Orbit-pair distances: Bowen d_n, mean d̄_n, Feldman-Katok d_FKn, its
// order-free variant, the weak-mean F_n, and the edit distance on words.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fkm/matching.hpp"
#include "fkm/systems.hpp"

namespace fkm {

enum class MetricKind { Bowen, Mean, FK, FKUnordered, WeakMean };

/// "bowen", "mean", "fk", "fk-unordered", "weakmean".
std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& text);

enum class MatchFlavor { Ordered, Unordered };

/// Partial bijection between orbit indices; pair k maps domain[k] to range[k].
struct Match {
  MatchFlavor flavor = MatchFlavor::Ordered;
  std::vector<std::size_t> domain;
  std::vector<std::size_t> range;
  std::vector<double> distances;
  double delta = 0.0;
  std::size_t n = 0;

  std::size_t size() const { return domain.size(); }
  /// f̄_{n,delta} or f̃_{n,delta}: 1 - |pi| / n.
  double unmatched() const { return unmatched_fraction(size(), n); }
};

struct FkOptions {
  std::optional<double> tol;  ///< unset selects default_tolerance(system)
  bool exact = false;         ///< scan candidate thresholds instead of bisecting
};

/// 1e-9 * max(1, diameter).
double default_tolerance(const System& system);

/// C(i, j) = d(T^i x, T^j y).
Eigen::MatrixXd cost_matrix(const OrbitSegment& a, const OrbitSegment& b);

double bowen_distance(const OrbitSegment& a, const OrbitSegment& b);
double mean_distance(const OrbitSegment& a, const OrbitSegment& b);
Match max_ordered_match(const OrbitSegment& a, const OrbitSegment& b, double delta);
Match max_unordered_match(const OrbitSegment& a, const OrbitSegment& b, double delta);
double fk_distance(const OrbitSegment& a, const OrbitSegment& b, FkOptions options = {});
double fk_unordered_distance(const OrbitSegment& a, const OrbitSegment& b, FkOptions options = {});
double weak_mean_distance(const OrbitSegment& a, const OrbitSegment& b);

/// 1 - LCS(w, v) / n.
double word_edit_distance(const Word& w, const Word& v);
std::size_t word_lcs(const Word& w, const Word& v);

/// All metrics of one orbit pair over a single shared cost matrix.
class PairMetrics {
 public:
  PairMetrics(const OrbitSegment& a, const OrbitSegment& b);

  std::size_t n() const { return n_; }
  const Eigen::MatrixXd& cost() const { return cost_; }

  double bowen() const;
  double mean() const;
  /// f̄_{n,delta} and f̃_{n,delta} under the given comparison.
  double ordered_unmatched(double delta, Threshold mode = Threshold::Strict) const;
  double unordered_unmatched(double delta, Threshold mode = Threshold::Strict) const;
  double fk(FkOptions options = {}) const;
  double fk_unordered(FkOptions options = {}) const;
  double weak_mean() const;

 private:
  std::size_t n_;
  double tol_;
  double upper_;
  Eigen::MatrixXd cost_;
  bool swapped_;  // weak_mean runs on the canonically ordered pair
};

double orbit_distance(MetricKind kind, const OrbitSegment& a, const OrbitSegment& b, FkOptions options = {});

}  // namespace fkm
