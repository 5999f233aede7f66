#include "fkm/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "fkm/error.hpp"
#include "fkm/parallel.hpp"

namespace fkm {

std::string to_string(SetKind kind) { return kind == SetKind::Spanning ? "spanning" : "separated"; }

std::vector<OrbitSegment> orbits_of(const System& system, std::span<const Point> points, std::size_t n) {
  std::vector<OrbitSegment> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(system.orbit(p, n));
  return out;
}

// ---------------------------------------------------------------------------
// Ball graph

BallGraph::BallGraph(std::span<const OrbitSegment> segments, MetricKind kind, double radius, Threshold mode)
    : rows_(segments.size(), segments.size()) {
  const BallTest test(segments, kind, radius, mode);
  const std::size_t count = segments.size();
  parallel_for(count, [&](std::size_t i) {
    auto row = rows_.row(i);
    for (std::size_t j = i + 1; j < count; ++j) {
      if (test(i, j)) row[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  });
  for (std::size_t i = 0; i < count; ++i) {
    rows_.set(i, i);
    for (std::size_t j = i + 1; j < count; ++j) {
      if (rows_.test(i, j)) rows_.set(j, i);
    }
  }
}

std::vector<std::size_t> BallGraph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  const auto r = row(i);
  for (std::size_t w = 0; w < r.size(); ++w) {
    for (std::uint64_t bits = r[w]; bits != 0; bits &= bits - 1) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  }
  return out;
}

namespace {

void require_sample(std::span<const OrbitSegment> sample, double epsilon) {
  if (sample.empty()) throw DomainError("sample is empty");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
}

// Greedy cover: repeatedly take the point whose ball holds the most uncovered
// points (lowest index on ties) until stop(covered) holds.
template <typename Stop>
std::vector<std::size_t> greedy_cover(const BallGraph& graph, Stop&& stop) {
  const std::size_t count = graph.size();
  std::vector<std::vector<std::uint32_t>> adj(count);
  std::vector<std::size_t> gain(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j : graph.neighbors(i)) adj[i].push_back(static_cast<std::uint32_t>(j));
    gain[i] = adj[i].size();
  }
  std::vector<char> covered(count, 0);
  std::size_t covered_count = 0;
  std::vector<std::size_t> centers;
  while (!stop(covered_count)) {
    const auto best = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
    if (gain[best] == 0) throw std::logic_error("greedy cover stalled");
    centers.push_back(best);
    for (std::uint32_t u : adj[best]) {
      if (covered[u]) continue;
      covered[u] = 1;
      ++covered_count;
      for (std::uint32_t w : adj[u]) --gain[w];
    }
  }
  return centers;
}

SpanningResult make_result(SetKind kind, MetricKind metric, std::span<const OrbitSegment> sample, double epsilon,
                           bool exact) {
  SpanningResult r;
  r.kind = kind;
  r.metric = metric;
  r.n = sample.front().size();
  r.epsilon = epsilon;
  r.exact = exact;
  return r;
}

using Mask = std::uint32_t;

std::vector<Mask> small_adjacency(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon) {
  if (sample.size() > kExactLimit) {
    throw DomainError("exhaustive search is limited to " + std::to_string(kExactLimit) + " points");
  }
  const BallGraph graph(sample, kind, epsilon, Threshold::Closed);
  std::vector<Mask> adj(sample.size(), 0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      if (graph.adjacent(i, j)) adj[i] |= Mask{1} << j;
    }
  }
  return adj;
}

std::vector<std::size_t> members(Mask mask) {
  std::vector<std::size_t> out;
  for (; mask != 0; mask &= mask - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
  return out;
}

}  // namespace

SpanningResult greedy_spanning(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon) {
  require_sample(sample, epsilon);
  const BallGraph graph(sample, kind, epsilon, Threshold::Closed);
  auto result = make_result(SetKind::Spanning, kind, sample, epsilon, false);
  result.centers = greedy_cover(graph, [&](std::size_t covered) { return covered == sample.size(); });
  verify_result(result, sample);
  return result;
}

SpanningResult greedy_separated(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon) {
  require_sample(sample, epsilon);
  const BallTest close(sample, kind, epsilon, Threshold::Closed);
  auto result = make_result(SetKind::Separated, kind, sample, epsilon, false);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const bool apart = std::none_of(result.centers.begin(), result.centers.end(),
                                    [&](std::size_t k) { return close(k, i); });
    if (apart) result.centers.push_back(i);
  }
  verify_result(result, sample);
  return result;
}

SpanningResult exact_spanning(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon) {
  require_sample(sample, epsilon);
  const auto adj = small_adjacency(sample, kind, epsilon);
  const Mask all = (Mask{1} << sample.size()) - 1;
  Mask best = all;
  for (Mask s = 1; s <= all; ++s) {
    if (std::popcount(s) >= std::popcount(best)) continue;
    Mask cover = 0;
    for (std::size_t i : members(s)) cover |= adj[i];
    if (cover == all) best = s;
  }
  auto result = make_result(SetKind::Spanning, kind, sample, epsilon, true);
  result.centers = members(best);
  verify_result(result, sample);
  return result;
}

SpanningResult exact_separated(std::span<const OrbitSegment> sample, MetricKind kind, double epsilon) {
  require_sample(sample, epsilon);
  const auto adj = small_adjacency(sample, kind, epsilon);
  const Mask all = (Mask{1} << sample.size()) - 1;
  Mask best = 1;
  for (Mask s = 1; s <= all; ++s) {
    if (std::popcount(s) <= std::popcount(best)) continue;
    bool separated = true;
    for (std::size_t i : members(s)) {
      if ((adj[i] & s) != (Mask{1} << i)) {
        separated = false;
        break;
      }
    }
    if (separated) best = s;
  }
  auto result = make_result(SetKind::Separated, kind, sample, epsilon, true);
  result.centers = members(best);
  verify_result(result, sample);
  return result;
}

void verify_result(const SpanningResult& result, std::span<const OrbitSegment> sample) {
  if (result.centers.empty()) throw std::logic_error("result has no centers");
  const BallTest close(sample, result.metric, result.epsilon, Threshold::Closed);
  if (result.kind == SetKind::Separated) {
    for (std::size_t a = 0; a < result.centers.size(); ++a) {
      for (std::size_t b = a + 1; b < result.centers.size(); ++b) {
        if (close(result.centers[a], result.centers[b])) throw std::logic_error("separated set has close centers");
      }
    }
    return;
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const bool covered = std::any_of(result.centers.begin(), result.centers.end(),
                                     [&](std::size_t c) { return close(c, i); });
    if (!covered) throw std::logic_error("spanning set misses point " + std::to_string(i));
  }
}

SpanningResult measure_spanning(std::span<const OrbitSegment> support, MetricKind kind, double epsilon) {
  if (support.empty()) throw DomainError("measure has no points");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const BallGraph graph(support, kind, epsilon, Threshold::Strict);
  const double total = static_cast<double>(support.size());
  auto enough = [&](std::size_t covered) { return static_cast<double>(covered) / total > 1.0 - epsilon; };
  auto result = make_result(SetKind::Spanning, kind, support, epsilon, false);
  result.centers = greedy_cover(graph, enough);

  std::vector<char> covered(support.size(), 0);
  for (std::size_t c : result.centers) {
    for (std::size_t u : graph.neighbors(c)) covered[u] = 1;
  }
  const auto mass = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 1));
  result.covered_mass = static_cast<double>(mass) / total;
  if (!enough(mass)) throw std::logic_error("measure cover below 1 - epsilon");
  return result;
}

SpanningResult measure_spanning(const System& system, const EmpiricalMeasure& mu, std::size_t n, double epsilon,
                                MetricKind kind) {
  const auto support = orbits_of(system, mu.points, n);
  return measure_spanning(support, kind, epsilon);
}

// ---------------------------------------------------------------------------
// Curves

const SlopeFit& EntropyCurve::fit_for(double scale) const {
  for (const auto& f : fits) {
    if (f.scale == scale) return f;
  }
  throw DomainError("no fit for scale " + std::to_string(scale));
}

namespace {

enum class FitTarget { LogCount, NegLogMass };

SlopeFit fit_rows(std::span<const EntropyRow> all_rows, double scale, FitTarget target) {
  std::vector<EntropyRow> rows;
  for (const auto& r : all_rows) {
    if (r.scale == scale) rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [](const EntropyRow& a, const EntropyRow& b) { return a.n < b.n; });
  SlopeFit fit;
  fit.scale = scale;

  std::vector<EntropyRow> pool;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(pool), [](const EntropyRow& r) { return r.resolved; });
  if (pool.size() < 2) {
    fit.saturated = true;
    pool.clear();
    for (const auto& r : rows) {
      if (target == FitTarget::LogCount || r.value > 0.0) pool.push_back(r);
    }
  }
  if (pool.size() < 2) {
    fit.rows_used = pool.size();
    return fit;
  }
  const std::size_t used = std::max<std::size_t>(2, (pool.size() + 1) / 2);
  const std::vector<EntropyRow> window(pool.end() - static_cast<std::ptrdiff_t>(used), pool.end());
  std::vector<std::size_t> budgets;
  for (const auto& r : window) {
    if (std::find(budgets.begin(), budgets.end(), r.budget) == budgets.end()) budgets.push_back(r.budget);
  }
  // Per-budget intercepts need some budget level seen at two n; otherwise the
  // slope is not identified and one shared intercept is used.
  const bool grouped = budgets.size() > 1 && budgets.size() < used;
  const auto columns = static_cast<Eigen::Index>(grouped ? budgets.size() + 1 : 2);
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(used), columns);
  Eigen::VectorXd y(static_cast<Eigen::Index>(used));
  for (std::size_t k = 0; k < used; ++k) {
    const auto& r = window[k];
    const auto row = static_cast<Eigen::Index>(k);
    design(row, 0) = static_cast<double>(r.n);
    const auto group = grouped ? std::find(budgets.begin(), budgets.end(), r.budget) - budgets.begin() : 0;
    design(row, 1 + static_cast<Eigen::Index>(group)) = 1.0;
    y(row) = target == FitTarget::LogCount ? std::log(r.value) : -std::log(r.value);
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  fit.slope = beta(0);
  fit.rows_used = used;
  return fit;
}

bool count_resolved(std::size_t count, std::size_t sample_size) {
  return static_cast<double>(count) * std::numbers::e <= static_cast<double>(sample_size);
}

void fit_all(EntropyCurve& curve, std::span<const double> scales, FitTarget target) {
  for (double s : scales) curve.fits.push_back(fit_rows(curve.rows, s, target));
}

void require_ranges(std::span<const std::size_t> ns, std::span<const double> scales) {
  if (ns.empty()) throw DomainError("n range is empty");
  if (scales.empty()) throw DomainError("scale list is empty");
  for (std::size_t n : ns) {
    if (n == 0) throw DomainError("orbit length must be positive");
  }
}

}  // namespace

SlopeFit fit_slope(std::span<const EntropyRow> rows, double scale, bool log_of_value) {
  return fit_rows(rows, scale, log_of_value ? FitTarget::LogCount : FitTarget::NegLogMass);
}

EntropyCurve topological_entropy_curve(const System& system, const MeasureSpec& sampler, std::size_t sample_size,
                                       std::span<const std::size_t> ns, std::span<const double> epsilons,
                                       MetricKind kind, std::uint64_t seed, SetKind set) {
  if (sample_size < 2) throw DomainError("sample size must be at least 2");
  require_ranges(ns, epsilons);
  const auto sample = sample_points(system, sampler, sample_size, seed);
  EntropyCurve curve;
  curve.metric = kind;
  curve.sample_size = sample_size;
  for (std::size_t n : ns) {
    const auto segments = orbits_of(system, sample.points, n);
    for (double eps : epsilons) {
      const auto result =
          set == SetKind::Separated ? greedy_separated(segments, kind, eps) : greedy_spanning(segments, kind, eps);
      const double count = static_cast<double>(result.count());
      curve.rows.push_back({n, eps, count, std::log(count), count_resolved(result.count(), sample_size),
                            mismatch_budget(kind, n, eps, Threshold::Closed)});
    }
  }
  fit_all(curve, epsilons, FitTarget::LogCount);
  return curve;
}

EntropyCurve katok_entropy_curve(const System& system, const EmpiricalMeasure& mu, std::span<const std::size_t> ns,
                                 std::span<const double> epsilons, MetricKind kind) {
  require_ranges(ns, epsilons);
  EntropyCurve curve;
  curve.metric = kind;
  curve.sample_size = mu.size();
  for (std::size_t n : ns) {
    const auto support = orbits_of(system, mu.points, n);
    for (double eps : epsilons) {
      const auto result = measure_spanning(support, kind, eps);
      const double count = static_cast<double>(result.count());
      curve.rows.push_back({n, eps, count, std::log(count), count_resolved(result.count(), mu.size()),
                            mismatch_budget(kind, n, eps, Threshold::Strict)});
    }
  }
  fit_all(curve, epsilons, FitTarget::LogCount);
  return curve;
}

std::optional<double> LocalEntropyEstimate::headline() const {
  if (rows.empty()) return std::nullopt;
  const LocalEntropyRow* best = &rows.front();
  for (const auto& r : rows) {
    if (r.n > best->n || (r.n == best->n && r.delta < best->delta)) best = &r;
  }
  if (best->zero_mass) return std::nullopt;
  return best->estimate;
}

LocalEntropyEstimate brin_katok_local(const System& system, const EmpiricalMeasure& mu, const Point& x,
                                      std::span<const std::size_t> ns, std::span<const double> deltas,
                                      MetricKind kind) {
  require_ranges(ns, deltas);
  if (mu.size() == 0) throw DomainError("measure has no points");
  system.validate(x);
  LocalEntropyEstimate est;
  est.base = x;
  est.sample_size = mu.size();
  const std::size_t m = mu.size();
  for (std::size_t n : ns) {
    std::vector<OrbitSegment> segments;
    segments.reserve(m + 1);
    segments.push_back(system.orbit(x, n));
    for (const auto& p : mu.points) segments.push_back(system.orbit(p, n));
    for (double delta : deltas) {
      const BallTest inside(segments, kind, delta, Threshold::Strict);
      std::vector<char> hit(m, 0);
      parallel_for(m, [&](std::size_t j) { hit[j] = inside(0, j + 1) ? 1 : 0; });
      const auto count = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
      LocalEntropyRow row;
      row.n = n;
      row.delta = delta;
      row.mass = static_cast<double>(count) / static_cast<double>(m);
      row.zero_mass = count == 0;
      row.estimate = row.zero_mass ? 0.0 : -std::log(row.mass) / static_cast<double>(n);
      est.rows.push_back(row);
    }
  }
  return est;
}

EntropyCurve as_curve(const LocalEntropyEstimate& estimate, MetricKind kind) {
  EntropyCurve curve;
  curve.metric = kind;
  curve.sample_size = estimate.sample_size;
  std::vector<double> deltas;
  for (const auto& r : estimate.rows) {
    curve.rows.push_back(
        {r.n, r.delta, r.mass, r.estimate, !r.zero_mass, mismatch_budget(kind, r.n, r.delta, Threshold::Strict)});
    if (std::find(deltas.begin(), deltas.end(), r.delta) == deltas.end()) deltas.push_back(r.delta);
  }
  fit_all(curve, deltas, FitTarget::NegLogMass);
  return curve;
}

// ---------------------------------------------------------------------------
// Complexity

double Scale::operator()(std::size_t n) const {
  const double x = static_cast<double>(n);
  switch (kind) {
    case Kind::Power:
      return multiplier * std::pow(x, parameter);
    case Kind::Linear:
      return multiplier * parameter * x;
    case Kind::Exponential:
      return multiplier * std::pow(parameter, x);
  }
  return 0.0;
}

Scale parse_scale(const std::string& text) {
  Scale s;
  const auto first = text.find(':');
  if (first == std::string::npos) throw ConfigError("scale must look like power:a, linear:a or exp:b");
  const std::string name = text.substr(0, first);
  std::string rest = text.substr(first + 1);
  const auto second = rest.find(':');
  try {
    if (second != std::string::npos) {
      s.multiplier = std::stod(rest.substr(second + 1));
      rest = rest.substr(0, second);
    }
    s.parameter = std::stod(rest);
  } catch (const std::exception&) {
    throw ConfigError("bad number in scale '" + text + "'");
  }
  if (name == "power") {
    s.kind = Scale::Kind::Power;
  } else if (name == "linear") {
    s.kind = Scale::Kind::Linear;
  } else if (name == "exp") {
    s.kind = Scale::Kind::Exponential;
  } else {
    throw ConfigError("unknown scale '" + name + "'");
  }
  if (!(s.parameter > 0.0) || !(s.multiplier > 0.0)) throw ConfigError("scale parameters must be positive");
  return s;
}

std::string to_string(const Scale& scale) {
  const char* name = scale.kind == Scale::Kind::Power ? "power" : scale.kind == Scale::Kind::Linear ? "linear" : "exp";
  std::string out = std::string(name) + ":" + std::to_string(scale.parameter);
  if (scale.multiplier != 1.0) out += ":" + std::to_string(scale.multiplier);
  return out;
}

ComplexityCurve complexity_compare(std::vector<ComplexityRow> rows, const Scale& scale, double threshold) {
  ComplexityCurve curve;
  curve.scale = scale;
  curve.threshold = threshold;
  std::map<double, double> min_ratio;
  for (auto& r : rows) {
    r.ratio = static_cast<double>(r.count) / scale(r.n);
    auto [it, inserted] = min_ratio.emplace(r.epsilon, r.ratio);
    if (!inserted) it->second = std::min(it->second, r.ratio);
  }
  curve.rows = std::move(rows);
  curve.weaker = !min_ratio.empty() &&
                 std::all_of(min_ratio.begin(), min_ratio.end(), [&](const auto& e) { return e.second < threshold; });
  return curve;
}

std::vector<ComplexityRow> complexity_rows(const System& system, const EmpiricalMeasure& mu,
                                           std::span<const std::size_t> ns, std::span<const double> epsilons,
                                           MetricKind kind) {
  require_ranges(ns, epsilons);
  std::vector<ComplexityRow> rows;
  for (std::size_t n : ns) {
    const auto support = orbits_of(system, mu.points, n);
    for (double eps : epsilons) rows.push_back({n, eps, measure_spanning(support, kind, eps).count(), 0.0});
  }
  return rows;
}

}  // namespace fkm
