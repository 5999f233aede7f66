#include "fkm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "fkm/ball.hpp"
#include "fkm/criterion.hpp"
#include "fkm/entropy.hpp"
#include "fkm/error.hpp"
#include "fkm/metrics.hpp"
#include "fkm/systems.hpp"
#include "fkm/verify.hpp"
#include "json.hpp"

#include <unistd.h>

namespace fkm {

// ---------------------------------------------------------------------------
// Parsing helpers

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

template <typename T>
T parse_int(const std::string& text, const std::string& what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError("bad " + what + " '" + text + "'");
  return value;
}

double parse_real(const std::string& text, const std::string& what) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return parse_real(text.substr(0, slash), what) / parse_real(text.substr(slash + 1), what);
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ConfigError("bad " + what + " '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text.empty()) return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("bad boolean '" + text + "'");
}

}  // namespace

std::vector<std::size_t> parse_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int<std::size_t>(part, "length"));
      continue;
    }
    std::string hi_text = part.substr(dots + 2);
    std::size_t step = 1;
    if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
      step = parse_int<std::size_t>(hi_text.substr(colon + 1), "step");
      hi_text = hi_text.substr(0, colon);
    }
    const auto lo = parse_int<std::size_t>(part.substr(0, dots), "length");
    const auto hi = parse_int<std::size_t>(hi_text, "length");
    if (step == 0 || hi < lo) throw ConfigError("bad length range '" + part + "'");
    for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  }
  if (out.empty()) throw ConfigError("empty length list");
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(part, "number"));
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// RunConfig

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["system"] = system;
  j["measure"] = measure;
  j["partition"] = partition;
  j["x"] = x;
  j["y"] = y;
  j["n"] = n;
  j["eps"] = eps;
  j["delta"] = delta;
  j["tol"] = tol ? nlohmann::ordered_json(*tol) : nlohmann::ordered_json(nullptr);
  j["exact"] = exact;
  j["N"] = sample;
  j["m"] = m;
  j["pairs"] = pairs;
  j["candidates"] = candidates;
  j["base"] = base;
  j["kind"] = kind;
  j["set"] = set;
  j["scale"] = scale;
  j["threshold"] = threshold ? nlohmann::ordered_json(*threshold) : nlohmann::ordered_json(nullptr);
  j["seed"] = seed;
  j["suite"] = suite;
  j["trials"] = trials;
  return j.dump();
}

RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& settings) {
  RunConfig c;
  c.command = command;
  auto positive = [](std::size_t v, const std::string& key) {
    if (v == 0) throw ConfigError(key + " must be positive");
    return v;
  };
  for (const auto& [key, value] : settings) {
    if (key == "system") {
      c.system = value;
    } else if (key == "measure") {
      c.measure = value;
    } else if (key == "partition") {
      c.partition = value;
    } else if (key == "x") {
      c.x = value;
    } else if (key == "y") {
      c.y = value;
    } else if (key == "n") {
      c.n = parse_lengths(value);
    } else if (key == "eps") {
      c.eps = parse_reals(value);
    } else if (key == "delta") {
      c.delta = parse_reals(value);
    } else if (key == "tol") {
      c.tol = parse_real(value, "tol");
      if (!(*c.tol > 0.0)) throw ConfigError("tol must be positive");
    } else if (key == "exact") {
      c.exact = parse_bool(value);
    } else if (key == "N") {
      c.sample = positive(parse_int<std::size_t>(value, key), key);
    } else if (key == "m") {
      c.m = positive(parse_int<std::size_t>(value, key), key);
    } else if (key == "pairs") {
      c.pairs = positive(parse_int<std::size_t>(value, key), key);
    } else if (key == "candidates") {
      c.candidates = parse_int<std::size_t>(value, key);
    } else if (key == "base") {
      c.base = parse_int<std::size_t>(value, key);
    } else if (key == "kind") {
      c.kind = to_string(parse_metric_kind(value));
    } else if (key == "set") {
      if (value != "separated" && value != "spanning") throw ConfigError("set must be separated or spanning");
      c.set = value;
    } else if (key == "scale") {
      parse_scale(value);
      c.scale = value;
    } else if (key == "threshold") {
      c.threshold = parse_real(value, "threshold");
      if (!(*c.threshold > 0.0)) throw ConfigError("threshold must be positive");
    } else if (key == "seed") {
      c.seed = parse_int<std::uint64_t>(value, key);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "suite") {
      c.suite = value;
    } else if (key == "trials") {
      c.trials = positive(parse_int<std::size_t>(value, key), key);
    } else if (key != "command") {
      throw ConfigError("unknown setting '" + key + "'");
    }
  }
  for (std::size_t n : c.n) {
    if (n == 0) throw ConfigError("orbit lengths must be positive");
  }
  return c;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      out[key] = joined;
    } else if (key == "system" && value.is_object()) {
      out[key] = value.dump();
    } else if (value.is_boolean() || value.is_number()) {
      out[key] = value.dump();
    } else {
      throw ConfigError("unsupported value for '" + key + "' in config file");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

Point parse_point(const System& system, const std::string& text) {
  if (text.empty()) throw ConfigError("point is missing");
  if (system.kind() == SystemKind::TwoComponent) {
    std::uint8_t comp = 0;
    std::string rest = text;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      comp = parse_int<std::uint8_t>(text.substr(0, colon), "component");
      rest = text.substr(colon + 1);
    }
    if (comp > 1) throw ConfigError("component must be 0 or 1");
    Point p = parse_point(system.component(comp), rest);
    p.component = comp;
    return p;
  }
  if (system.symbolic()) {
    // "0110" (padded with zeros), "01..." (repeated to the horizon) or "0,1,2".
    std::string body = text;
    const bool periodic = body.size() > 3 && body.ends_with("...");
    if (periodic) body.resize(body.size() - 3);
    std::vector<std::uint8_t> symbols;
    if (body.find(',') != std::string::npos) {
      for (const auto& part : split(body, ',')) symbols.push_back(parse_int<std::uint8_t>(part, "symbol"));
    } else {
      for (char ch : body) {
        if (ch < '0' || ch > '9') throw ConfigError("bad symbol in '" + text + "'");
        symbols.push_back(static_cast<std::uint8_t>(ch - '0'));
      }
    }
    if (symbols.empty()) throw ConfigError("empty symbol string");
    if (periodic) {
      const std::size_t period = symbols.size();
      while (symbols.size() < system.horizon()) symbols.push_back(symbols[symbols.size() - period]);
    }
    return system.symbolic_point(std::move(symbols));
  }
  return system.real_point(parse_real(text, "point"));
}

struct Context {
  RunConfig config;
  System system;
  std::ostream& out;
  std::ostream& err;

  double diameter() const { return system.diameter(); }

  MeasureSpec measure() const {
    return config.measure.empty() ? natural_measure(system) : parse_measure_spec(config.measure);
  }

  MetricKind kind() const { return parse_metric_kind(config.kind); }

  const std::vector<std::size_t>& lengths() const {
    if (config.n.empty()) throw ConfigError("--n is required");
    if (system.symbolic()) {
      for (std::size_t n : config.n) {
        if (n > system.horizon()) {
          throw ConfigError("n = " + std::to_string(n) + " exceeds the horizon " + std::to_string(system.horizon()));
        }
      }
    }
    return config.n;
  }

  std::size_t length() const {
    const auto& ns = lengths();
    if (ns.size() != 1) throw ConfigError("this command takes a single --n");
    return ns.front();
  }

  std::vector<double> scales(const std::vector<double>& values, const char* flag) const {
    if (values.empty()) throw ConfigError(std::string(flag) + " is required");
    for (double v : values) {
      if (!(v > 0.0) || v > diameter()) {
        throw ConfigError(std::string(flag) + " values must lie in (0, " + format_number(diameter()) + "]");
      }
    }
    return values;
  }
};

std::string header(const RunConfig& c) {
  return std::string("# fkm ") + kVersion + " seed=" + std::to_string(c.seed) + " config=" + c.to_json() + "\n";
}

// Writes to --out atomically (temp file + rename) or to the output stream.
void emit(const Context& ctx, const std::string& body) {
  const std::string text = header(ctx.config) + body;
  if (ctx.config.out.empty()) {
    ctx.out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(ctx.config.out);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write '" + temp.string() + "'");
    file << text;
    file.flush();
    if (!file) throw IoError("write to '" + temp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoError("cannot move output into place at '" + target.string() + "'");
  }
}

void write_entropy_csv(const Context& ctx, const EntropyCurve& curve, bool mass_rows) {
  std::ostringstream csv;
  csv << "metric,n,epsilon_or_delta,count_or_mass,log_value,slope\n";
  for (const auto& r : curve.rows) {
    csv << to_string(curve.metric) << ',' << r.n << ',' << format_number(r.scale) << ','
        << format_number(r.value) << ',';
    if (!(mass_rows && r.value == 0.0)) csv << format_number(r.log_value);
    csv << ',' << format_number(curve.fit_for(r.scale).slope) << '\n';
  }
  emit(ctx, csv.str());
}

int cmd_orbit(const Context& ctx) {
  const Point x = parse_point(ctx.system, ctx.config.x);
  const auto seg = ctx.system.orbit(x, ctx.length());
  std::ostringstream csv;
  csv << "i,point\n";
  for (std::size_t i = 0; i < seg.size(); ++i) {
    csv << i << ',';
    if (seg.symbolic()) {
      for (auto d : seg.digits().subspan(i)) csv << static_cast<int>(d);
    } else {
      csv << format_number(seg.values()[i]);
    }
    csv << '\n';
  }
  emit(ctx, csv.str());
  return 0;
}

int cmd_metric(const Context& ctx) {
  const std::size_t n = ctx.length();
  const auto a = ctx.system.orbit(parse_point(ctx.system, ctx.config.x), n);
  const auto b = ctx.system.orbit(parse_point(ctx.system, ctx.config.y), n);
  FkOptions opts;
  opts.tol = ctx.config.tol;
  opts.exact = ctx.config.exact;
  const double value = orbit_distance(ctx.kind(), a, b, opts);
  if (ctx.config.out.empty()) {
    ctx.out << format_number(value) << '\n';
    return 0;
  }
  emit(ctx, "metric,n,value\n" + ctx.config.kind + "," + std::to_string(n) + "," + format_number(value) + "\n");
  return 0;
}

int cmd_span(const Context& ctx) {
  const auto ns = ctx.lengths();
  const auto eps = ctx.scales(ctx.config.eps, "--eps");
  const auto sample = sample_points(ctx.system, ctx.measure(), ctx.config.sample, ctx.config.seed);
  const bool spanning = ctx.config.set == "spanning";
  std::ostringstream csv;
  csv << "metric,n,epsilon,count,exact\n";
  for (std::size_t n : ns) {
    const auto segs = orbits_of(ctx.system, sample.points, n);
    for (double e : eps) {
      SpanningResult r;
      if (ctx.config.exact) {
        r = spanning ? exact_spanning(segs, ctx.kind(), e) : exact_separated(segs, ctx.kind(), e);
      } else {
        r = spanning ? greedy_spanning(segs, ctx.kind(), e) : greedy_separated(segs, ctx.kind(), e);
      }
      csv << ctx.config.kind << ',' << n << ',' << format_number(e) << ',' << r.count() << ','
          << (r.exact ? "true" : "false") << '\n';
    }
  }
  emit(ctx, csv.str());
  return 0;
}

int cmd_entropy_top(const Context& ctx) {
  const auto eps = ctx.scales(ctx.config.eps, "--eps");
  const auto curve =
      topological_entropy_curve(ctx.system, ctx.measure(), ctx.config.sample, ctx.lengths(), eps, ctx.kind(),
                                ctx.config.seed, ctx.config.set == "spanning" ? SetKind::Spanning : SetKind::Separated);
  write_entropy_csv(ctx, curve, false);
  return 0;
}

int cmd_entropy_katok(const Context& ctx) {
  const auto eps = ctx.scales(ctx.config.eps, "--eps");
  const auto mu = sample_points(ctx.system, ctx.measure(), ctx.config.m, ctx.config.seed);
  write_entropy_csv(ctx, katok_entropy_curve(ctx.system, mu, ctx.lengths(), eps, ctx.kind()), false);
  return 0;
}

int cmd_entropy_brinkatok(const Context& ctx) {
  const auto deltas = ctx.scales(ctx.config.delta, "--delta");
  const auto mu = sample_points(ctx.system, ctx.measure(), ctx.config.m, ctx.config.seed);
  Point x;
  if (!ctx.config.x.empty()) {
    x = parse_point(ctx.system, ctx.config.x);
  } else {
    if (ctx.config.base >= mu.size()) throw ConfigError("--base must be below --m");
    x = mu.points[ctx.config.base];
  }
  const auto est = brin_katok_local(ctx.system, mu, x, ctx.lengths(), deltas, ctx.kind());
  for (const auto& r : est.rows) {
    if (r.zero_mass) {
      ctx.err << "warning: zero empirical mass at n=" << r.n << " delta=" << format_number(r.delta) << '\n';
    }
  }
  write_entropy_csv(ctx, as_curve(est, ctx.kind()), true);
  return 0;
}

int cmd_complexity(const Context& ctx) {
  const auto eps = ctx.scales(ctx.config.eps, "--eps");
  const auto mu = sample_points(ctx.system, ctx.measure(), ctx.config.m, ctx.config.seed);
  const auto curve =
      complexity_compare(complexity_rows(ctx.system, mu, ctx.lengths(), eps, ctx.kind()), parse_scale(ctx.config.scale),
                         ctx.config.threshold.value_or(kDefaultComplexityThreshold));
  std::ostringstream csv;
  csv << "metric,n,epsilon,count,scale_value,ratio,verdict\n";
  for (const auto& r : curve.rows) {
    csv << ctx.config.kind << ',' << r.n << ',' << format_number(r.epsilon) << ',' << r.count << ','
        << format_number(curve.scale(r.n)) << ',' << format_number(r.ratio) << ',' << curve.verdict() << '\n';
  }
  emit(ctx, csv.str());
  return 0;
}

int cmd_criterion(const Context& ctx) {
  const auto eps = ctx.scales(ctx.config.eps, "--eps");
  if (eps.size() != 1) throw ConfigError("criterion takes a single --eps");
  const auto mu = sample_points(ctx.system, ctx.measure(), ctx.config.m, ctx.config.seed);
  const std::string partition_text =
      ctx.config.partition.empty() ? (ctx.system.symbolic() ? "zero" : "bins:4") : ctx.config.partition;
  const Partition partition = parse_partition(partition_text, ctx.system);
  const std::size_t candidates = ctx.config.candidates == 0 ? mu.size() : ctx.config.candidates;
  const auto report =
      katok_criterion_check(ctx.system, partition, mu, ctx.length(), eps.front(), candidates, ctx.config.seed);
  emit(ctx, to_json(report) + "\n");
  return 0;
}

int cmd_probe(const Context& ctx) {
  const auto mu = sample_points(ctx.system, ctx.measure(), ctx.config.m, ctx.config.seed);
  ProbeOptions opts;
  if (ctx.config.threshold) opts.threshold_fraction = *ctx.config.threshold;
  const auto r = ergodicity_probe(ctx.system, mu, ctx.length(), ctx.config.pairs, ctx.config.seed, opts);
  std::ostringstream csv;
  csv << "n,pairs,q05,q25,median,q75,q95,verdict\n";
  csv << r.n << ',' << r.pairs << ',' << format_number(r.q05) << ',' << format_number(r.q25) << ','
      << format_number(r.median) << ',' << format_number(r.q75) << ',' << format_number(r.q95) << ','
      << r.verdict() << '\n';
  emit(ctx, csv.str());
  return 0;
}

int cmd_verify(const Context& ctx) {
  std::vector<std::string> suites;
  if (ctx.config.suite == "all") {
    suites = suite_names();
  } else {
    suites.push_back(ctx.config.suite);
  }
  std::ostringstream csv;
  csv << "suite,checks,violations\n";
  std::size_t violations = 0;
  for (const auto& name : suites) {
    const auto report = run_suite(name, ctx.config.trials, ctx.config.seed);
    csv << report.suite << ',' << report.checks << ',' << report.violations << '\n';
    violations += report.violations;
    for (const auto& s : report.samples) ctx.err << report.suite << ": " << s << '\n';
  }
  emit(ctx, csv.str());
  return violations == 0 ? 0 : 1;
}

struct CommandInfo {
  const char* name;
  const char* help;
  std::vector<std::string> keys;
  std::function<int(const Context&)> body;
};

std::vector<CommandInfo> commands() {
  return {
      {"orbit", "Print the orbit segment of a point", {"system", "x", "n", "out"}, cmd_orbit},
      {"metric",
       "Distance between two orbit segments",
       {"system", "x", "y", "n", "kind", "tol", "exact", "out"},
       cmd_metric},
      {"span",
       "Spanning or separated set counts over a sample",
       {"system", "measure", "N", "n", "eps", "kind", "set", "exact", "seed", "out"},
       cmd_span},
      {"entropy-top",
       "Topological entropy curve from separated/spanning counts",
       {"system", "measure", "N", "n", "eps", "kind", "set", "seed", "out"},
       cmd_entropy_top},
      {"entropy-katok",
       "Measure entropy curve from measure-spanning counts",
       {"system", "measure", "m", "n", "eps", "kind", "seed", "out"},
       cmd_entropy_katok},
      {"entropy-brinkatok",
       "Local entropy from ball masses around one point",
       {"system", "measure", "m", "x", "base", "n", "delta", "kind", "seed", "out"},
       cmd_entropy_brinkatok},
      {"complexity",
       "Compare measure-spanning counts with a reference scale",
       {"system", "measure", "m", "n", "eps", "kind", "scale", "threshold", "seed", "out"},
       cmd_complexity},
      {"criterion",
       "Check the word criterion for one (n, eps)",
       {"system", "measure", "partition", "m", "n", "eps", "candidates", "seed", "out"},
       cmd_criterion},
      {"probe-ergodic",
       "Quantiles of F_n over random pairs",
       {"system", "measure", "m", "n", "pairs", "threshold", "seed", "out"},
       cmd_probe},
      {"verify", "Run randomized property suites", {"suite", "trials", "seed", "out"}, cmd_verify},
  };
}

const char* key_help(const std::string& key) {
  static const std::map<std::string, const char*> help = {
      {"system", "system spec: JSON or shorthand (full_shift:2, rotation:0.5, doubling, tent, logistic)"},
      {"measure", "bernoulli:p0,p1,..., lebesgue or arcsine (default: natural measure)"},
      {"partition", "zero or bins:<count>"},
      {"x", "point: number, symbol string ('01...' repeats), or c:value on two-component systems"},
      {"y", "second point"},
      {"n", "orbit lengths: 4..12, 4..64:4 or 4,8,16"},
      {"eps", "epsilon list"},
      {"delta", "delta list"},
      {"tol", "bisection tolerance (default 1e-9 * max(1, diameter))"},
      {"exact", "exact threshold scan (metric) or exhaustive search (span)"},
      {"N", "sample size for spanning/separated counts"},
      {"m", "empirical measure size"},
      {"pairs", "number of random pairs"},
      {"candidates", "candidate witness words (0 = all sample words)"},
      {"base", "sample index of the base point when --x is absent"},
      {"kind", "bowen, mean, fk, fk-unordered or weakmean"},
      {"set", "separated or spanning"},
      {"scale", "power:a, linear:a or exp:b, optionally :multiplier"},
      {"threshold", "verdict threshold"},
      {"seed", "RNG seed"},
      {"out", "output file (written atomically); default stdout"},
      {"suite", "lemma-chain, orbit-shift, weak-mean-bounds, symmetry, triangle or all"},
      {"trials", "random cases per system and length"},
  };
  const auto it = help.find(key);
  return it == help.end() ? "" : it->second;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feldman-Katok metrics and entropy estimates on orbit segments", "fkm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  const auto infos = commands();
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& info : infos) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    subs[info.name] = sub;
    sub->add_option("--config", config_paths[info.name], "JSON file with settings; flags override it");
    for (const auto& key : info.keys) {
      if (key == "exact") {
        options[info.name][key] = sub->add_flag("--exact")->description(key_help(key));
      } else {
        options[info.name][key] = sub->add_option("--" + key, values[info.name][key], std::string(key_help(key)));
      }
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  for (const auto& info : infos) {
    CLI::App* sub = subs[info.name];
    if (!sub->parsed()) continue;
    try {
      std::map<std::string, std::string> settings;
      if (!config_paths[info.name].empty()) settings = read_config_file(config_paths[info.name]);
      for (const auto& key : info.keys) {
        CLI::Option* opt = options[info.name][key];
        if (opt->count() == 0) continue;
        settings[key] = key == "exact" ? "true" : values[info.name][key];
      }
      if (const auto it = settings.find("command"); it != settings.end() && it->second != info.name) {
        throw ConfigError("config file is for command '" + it->second + "'");
      }
      for (const auto& [key, _] : settings) {
        if (key != "command" && std::find(info.keys.begin(), info.keys.end(), key) == info.keys.end()) {
          throw ConfigError("setting '" + key + "' does not apply to " + info.name);
        }
      }
      RunConfig config = make_config(info.name, settings);
      Context ctx{config, System(parse_system_spec(config.system)), out, err};
      return info.body(ctx);
    } catch (const IoError& e) {
      err << "I/O error: " << e.what() << '\n';
      return 2;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  err << app.help();
  return 1;
}

}  // namespace fkm
