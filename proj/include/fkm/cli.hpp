#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fkm {

inline constexpr const char* kVersion = "0.1.0";

/// Every setting a command may read. Commands ignore fields they do not use.
struct RunConfig {
  std::string command;
  std::string system = "doubling";
  std::string measure;    ///< empty selects the system's natural measure
  std::string partition;  ///< empty selects "zero" on shifts, "bins:4" elsewhere
  std::string x;
  std::string y;
  std::vector<std::size_t> n;
  std::vector<double> eps;
  std::vector<double> delta;
  std::optional<double> tol;
  bool exact = false;
  std::size_t sample = 1000;  ///< N, spanning/separated sample size
  std::size_t m = 1000;       ///< M, empirical measure size
  std::size_t pairs = 200;
  std::size_t candidates = 0;  ///< 0 means every sample word
  std::size_t base = 0;        ///< sample index of the Brin-Katok base point when x is empty
  std::string kind = "fk";
  std::string set = "separated";
  std::string scale = "linear:1";
  std::optional<double> threshold;
  std::uint64_t seed = 1;
  std::string out;
  std::string suite = "all";
  std::size_t trials = 100;

  /// Canonical JSON of every field, recorded in output headers.
  std::string to_json() const;
};

/// Builds a config from `key -> text` settings (flag names without dashes).
/// Unknown keys and malformed values raise ConfigError.
RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& settings);

/// Reads a JSON object whose keys are flag names; arrays become comma lists.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// "4..12", "4..64:4" or "4,8,16".
std::vector<std::size_t> parse_lengths(const std::string& text);
/// "0.1,0.05".
std::vector<double> parse_reals(const std::string& text);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double value);

/// Entry point behind the fkm executable; args exclude the program name.
/// Exit status: 0 success, 1 configuration/domain error or failed verification,
/// 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fkm
