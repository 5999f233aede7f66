#include "fkm/criterion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <utility>

#include "fkm/error.hpp"
#include "fkm/matching.hpp"
#include "fkm/metrics.hpp"
#include "fkm/parallel.hpp"
#include "fkm/rng.hpp"
#include "json.hpp"

namespace fkm {

double word_ball_fraction(const Word& center, const std::vector<Word>& words, double epsilon) {
  if (words.empty()) return 0.0;
  const std::size_t n = center.size();
  if (n == 0) throw DomainError("words must be nonempty");
  const std::size_t alphabet = static_cast<std::size_t>(*std::max_element(center.begin(), center.end())) + 1;
  // BitRelation rows indexed by symbol: bit j set iff center[j] == symbol.
  BitRelation positions(alphabet, n);
  for (std::size_t j = 0; j < n; ++j) positions.set(center[j], j);

  const std::size_t words_per_row = positions.words_per_row();
  std::vector<std::uint64_t> v(words_per_row);
  const std::vector<std::uint64_t> none(words_per_row, 0);
  std::size_t inside = 0;
  for (const Word& w : words) {
    if (w.size() != n) throw DomainError("words have different lengths");
    std::fill(v.begin(), v.end(), ~std::uint64_t{0});
    for (std::uint16_t symbol : w) {
      const auto m = symbol < alphabet ? std::as_const(positions).row(symbol) : std::span<const std::uint64_t>(none);
      std::uint64_t carry = 0;
      for (std::size_t k = 0; k < words_per_row; ++k) {
        const std::uint64_t u = v[k] & m[k];
        const std::uint64_t sum = v[k] + u;
        const std::uint64_t with_carry = sum + carry;
        carry = (sum < v[k] || with_carry < sum) ? 1 : 0;
        v[k] = with_carry | (v[k] & ~m[k]);
      }
    }
    std::size_t ones = 0;
    for (std::size_t k = 0; k < words_per_row; ++k) {
      std::uint64_t bits = v[k];
      if (k + 1 == words_per_row && n % 64 != 0) bits &= (std::uint64_t{1} << (n % 64)) - 1;
      ones += static_cast<std::size_t>(std::popcount(bits));
    }
    if (unmatched_fraction(n - ones, n) < epsilon) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(words.size());
}

CriterionReport katok_criterion_check(const System& system, const Partition& partition, const EmpiricalMeasure& mu,
                                      std::size_t n, double epsilon, std::size_t candidate_count,
                                      std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (mu.size() == 0) throw DomainError("measure has no points");
  if (candidate_count == 0 || candidate_count > mu.size()) {
    throw DomainError("candidate count must lie in [1, sample size]");
  }
  if (n == 0) throw DomainError("word length must be positive");

  std::vector<Word> words(mu.size());
  parallel_for(mu.size(), [&](std::size_t i) { words[i] = itinerary(system, partition, mu.points[i], n); });

  // Partial Fisher-Yates over sample indices.
  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto gen = make_stream(seed, 0);
  for (std::size_t k = 0; k < candidate_count; ++k) {
    const auto pick = k + static_cast<std::size_t>(uniform_index(gen, mu.size() - k));
    std::swap(order[k], order[pick]);
  }

  std::vector<double> fractions(candidate_count);
  parallel_for(candidate_count, [&](std::size_t k) {
    fractions[k] = word_ball_fraction(words[order[k]], words, epsilon);
  });

  CriterionReport report;
  report.partition = to_string(partition);
  report.n = n;
  report.epsilon = epsilon;
  report.sample_size = mu.size();
  report.candidates = candidate_count;
  const auto best = static_cast<std::size_t>(std::max_element(fractions.begin(), fractions.end()) - fractions.begin());
  report.witness = words[order[best]];
  report.witness_index = order[best];
  report.achieved_fraction = fractions[best];
  report.pass = report.achieved_fraction >= 1.0 - epsilon;
  return report;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("no values");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ProbeReport summarize_probe(std::size_t n, std::vector<double> values, double threshold) {
  std::sort(values.begin(), values.end());
  ProbeReport r;
  r.n = n;
  r.pairs = values.size();
  r.q05 = quantile(values, 0.05);
  r.q25 = quantile(values, 0.25);
  r.median = quantile(values, 0.5);
  r.q75 = quantile(values, 0.75);
  r.q95 = quantile(values, 0.95);
  r.threshold = threshold;
  r.consistent = r.median < threshold;
  return r;
}

ProbeReport ergodicity_probe(const System& system, const EmpiricalMeasure& mu, std::size_t n, std::size_t pair_count,
                             std::uint64_t seed, ProbeOptions options) {
  if (pair_count == 0) throw DomainError("pair count must be positive");
  if (mu.size() == 0) throw DomainError("measure has no points");
  std::vector<double> values(pair_count);
  parallel_for(pair_count, [&](std::size_t k) {
    auto gen = make_stream(seed, k);
    const auto i = static_cast<std::size_t>(uniform_index(gen, mu.size()));
    const auto j = options.self_pairs ? i : static_cast<std::size_t>(uniform_index(gen, mu.size()));
    values[k] = weak_mean_distance(system.orbit(mu.points[i], n), system.orbit(mu.points[j], n));
  });
  return summarize_probe(n, std::move(values), options.threshold_fraction * system.diameter());
}

std::string to_json(const CriterionReport& r) {
  nlohmann::ordered_json j;
  j["partition"] = r.partition;
  j["n"] = r.n;
  j["epsilon"] = r.epsilon;
  j["sample_size"] = r.sample_size;
  j["candidates"] = r.candidates;
  j["witness"] = r.witness ? nlohmann::ordered_json(*r.witness) : nlohmann::ordered_json(nullptr);
  j["witness_index"] = r.witness_index ? nlohmann::ordered_json(*r.witness_index) : nlohmann::ordered_json(nullptr);
  j["achieved_fraction"] = r.achieved_fraction;
  j["pass"] = r.pass;
  return j.dump();
}

std::string to_json(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["pairs"] = r.pairs;
  j["q05"] = r.q05;
  j["q25"] = r.q25;
  j["median"] = r.median;
  j["q75"] = r.q75;
  j["q95"] = r.q95;
  j["threshold"] = r.threshold;
  j["verdict"] = r.verdict();
  return j.dump();
}

}  // namespace fkm
