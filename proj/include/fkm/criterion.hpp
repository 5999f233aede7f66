#pragma once

// Empirical checkers: Katok's word criterion and the weak-mean ergodicity probe.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fkm/systems.hpp"

namespace fkm {

struct CriterionReport {
  std::string partition;
  std::size_t n = 0;
  double epsilon = 0.0;
  std::size_t sample_size = 0;
  std::size_t candidates = 0;
  /// Best candidate word and its index in the sample, reported pass or fail.
  std::optional<Word> witness;
  std::optional<std::size_t> witness_index;
  /// Fraction of sample words w' with f̄_n(witness, w') < epsilon.
  double achieved_fraction = 0.0;
  bool pass = false;
};

/// Draws candidate_count distinct sample words (seeded) and measures, for each,
/// the fraction of all sample words within edit distance < epsilon. Passes iff
/// some candidate reaches 1 - epsilon.
CriterionReport katok_criterion_check(const System& system, const Partition& partition, const EmpiricalMeasure& mu,
                                      std::size_t n, double epsilon, std::size_t candidate_count,
                                      std::uint64_t seed);

/// Fraction of `words` within edit distance < epsilon of `center`, by
/// bit-parallel LCS.
double word_ball_fraction(const Word& center, const std::vector<Word>& words, double epsilon);

struct ProbeReport {
  std::size_t n = 0;
  std::size_t pairs = 0;
  double q05 = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  double threshold = 0.0;
  bool consistent = false;

  std::string verdict() const { return consistent ? "consistent-with-ergodic" : "inconsistent"; }
};

struct ProbeOptions {
  double threshold_fraction = 0.05;  ///< verdict threshold as a fraction of the diameter
  bool self_pairs = false;           ///< pair each drawn point with itself
};

/// F_n over pair_count iid pairs from mu x mu; pair k uses RNG stream k.
ProbeReport ergodicity_probe(const System& system, const EmpiricalMeasure& mu, std::size_t n, std::size_t pair_count,
                             std::uint64_t seed, ProbeOptions options = {});

/// Quantiles (linear interpolation between order statistics) and verdict.
ProbeReport summarize_probe(std::size_t n, std::vector<double> values, double threshold);
double quantile(const std::vector<double>& sorted, double q);

std::string to_json(const CriterionReport& report);
std::string to_json(const ProbeReport& report);

}  // namespace fkm
