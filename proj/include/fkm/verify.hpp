#pragma once

// Randomized property suites over the built-in systems.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fkm/systems.hpp"

namespace fkm {

struct NamedSystem {
  std::string name;
  SystemSpec spec;
};

/// One instance of every built-in system kind (plus a three-symbol shift and a
/// two-component system).
std::vector<NamedSystem> builtin_systems();

struct SuiteReport {
  std::string suite;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::vector<std::string> samples;  ///< first few violations, human readable
};

/// Suites: lemma-chain, orbit-shift, weak-mean-bounds, symmetry, triangle.
std::vector<std::string> suite_names();

/// `trials` random pairs (points for orbit-shift, triples for triangle) per
/// system and per n in {4, 16, 64}.
SuiteReport run_suite(const std::string& suite, std::size_t trials, std::uint64_t seed);

/// Lengths every suite sweeps.
inline constexpr std::size_t kSuiteLengths[] = {4, 16, 64};

}  // namespace fkm
