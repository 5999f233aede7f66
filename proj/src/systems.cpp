#include "fkm/systems.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fkm/error.hpp"
#include "fkm/rng.hpp"
#include "json.hpp"

namespace fkm {
namespace {

constexpr int kLiftBits = 53;

std::size_t default_horizon(SystemKind kind) {
  switch (kind) {
    case SystemKind::FullShift:
      return kDefaultShiftHorizon;
    case SystemKind::Doubling:
    case SystemKind::Tent:
      return kDefaultLiftHorizon;
    default:
      return 0;
  }
}

bool uses_lift(SystemKind kind) { return kind == SystemKind::Doubling || kind == SystemKind::Tent; }

// Lift coordinate from the first 53 expansion digits; missing digits are 0.
double lift_value(std::span<const std::uint8_t> digits) {
  double theta = 0.0;
  double scale = 0.5;
  const std::size_t count = std::min<std::size_t>(digits.size(), kLiftBits);
  for (std::size_t i = 0; i < count; ++i, scale *= 0.5) {
    if (digits[i]) theta += scale;
  }
  return theta;
}

// Tent is the factor of doubling under the fold theta -> 2 min(theta, 1 - theta).
double fold(double theta) { return 2.0 * std::min(theta, 1.0 - theta); }

double coordinate(SystemKind kind, std::span<const std::uint8_t> digits) {
  const double theta = lift_value(digits);
  return kind == SystemKind::Tent ? fold(theta) : theta;
}

std::vector<std::uint8_t> binary_expansion(double value, std::size_t length) {
  std::vector<std::uint8_t> digits(length, 0);
  for (std::size_t i = 0; i < length && value > 0.0; ++i) {
    value *= 2.0;
    if (value >= 1.0) {
      digits[i] = 1;
      value -= 1.0;
    }
  }
  return digits;
}

const char* kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::FullShift:
      return "full_shift";
    case SystemKind::Rotation:
      return "rotation";
    case SystemKind::Doubling:
      return "doubling";
    case SystemKind::Tent:
      return "tent";
    case SystemKind::Logistic:
      return "logistic";
    case SystemKind::TwoComponent:
      return "two_component";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// SystemSpec

SystemSpec SystemSpec::full_shift(int k, std::size_t horizon) {
  SystemSpec s;
  s.kind = SystemKind::FullShift;
  s.alphabet = k;
  s.horizon = horizon;
  return s;
}

SystemSpec SystemSpec::rotation(double alpha) {
  SystemSpec s;
  s.kind = SystemKind::Rotation;
  s.alpha = alpha;
  return s;
}

SystemSpec SystemSpec::doubling(std::size_t horizon) {
  SystemSpec s;
  s.kind = SystemKind::Doubling;
  s.horizon = horizon;
  return s;
}

SystemSpec SystemSpec::tent(std::size_t horizon) {
  SystemSpec s;
  s.kind = SystemKind::Tent;
  s.horizon = horizon;
  return s;
}

SystemSpec SystemSpec::logistic() {
  SystemSpec s;
  s.kind = SystemKind::Logistic;
  return s;
}

SystemSpec SystemSpec::two_component(SystemSpec a, SystemSpec b, double weight_a) {
  SystemSpec s;
  s.kind = SystemKind::TwoComponent;
  s.weight_a = weight_a;
  s.components = {std::move(a), std::move(b)};
  return s;
}

// ---------------------------------------------------------------------------
// System

struct System::State {
  SystemSpec spec;
  PhaseMetric metric = PhaseMetric::Circle;
  double diameter = 0.5;
  std::size_t horizon = 0;
  std::vector<System> parts;
};

System::System(const SystemSpec& spec) {
  auto state = std::make_shared<State>();
  state->spec = spec;
  switch (spec.kind) {
    case SystemKind::FullShift:
      if (spec.alphabet < 2 || spec.alphabet > 255) {
        throw ConfigError("full_shift: alphabet size k must be in [2, 255]");
      }
      state->metric = PhaseMetric::Cylinder;
      state->diameter = 1.0;
      break;
    case SystemKind::Rotation:
      if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) {
        throw ConfigError("rotation: alpha must lie in [0, 1)");
      }
      state->metric = PhaseMetric::Circle;
      state->diameter = 0.5;
      break;
    case SystemKind::Doubling:
      state->metric = PhaseMetric::Circle;
      state->diameter = 0.5;
      break;
    case SystemKind::Tent:
    case SystemKind::Logistic:
      state->metric = PhaseMetric::Interval;
      state->diameter = 1.0;
      break;
    case SystemKind::TwoComponent:
      if (spec.components.size() != 2) {
        throw ConfigError("two_component: exactly two component systems are required");
      }
      if (!(spec.weight_a > 0.0 && spec.weight_a < 1.0)) {
        throw ConfigError("two_component: weight_a must lie in (0, 1)");
      }
      state->metric = PhaseMetric::Disjoint;
      state->diameter = 1.0;
      for (const auto& c : spec.components) {
        if (c.kind == SystemKind::TwoComponent) {
          throw ConfigError("two_component: components cannot be two-component systems");
        }
        state->parts.emplace_back(c);
        state->diameter = std::max(state->diameter, state->parts.back().diameter());
      }
      break;
  }
  if (spec.kind == SystemKind::FullShift || uses_lift(spec.kind)) {
    state->horizon = spec.horizon == 0 ? default_horizon(spec.kind) : spec.horizon;
    if (state->horizon < 2) throw ConfigError("horizon must be at least 2");
    state->spec.horizon = state->horizon;
  } else if (spec.horizon != 0 && spec.kind != SystemKind::TwoComponent) {
    throw ConfigError(std::string(kind_name(spec.kind)) + ": horizon applies only to shift, doubling, tent");
  }
  state_ = std::move(state);
}

System make_system(const SystemSpec& spec) { return System(spec); }

const SystemSpec& System::spec() const { return state_->spec; }
SystemKind System::kind() const { return state_->spec.kind; }
PhaseMetric System::metric() const { return state_->metric; }
double System::diameter() const { return state_->diameter; }
std::size_t System::horizon() const { return state_->horizon; }

const System& System::component(std::size_t index) const {
  if (kind() != SystemKind::TwoComponent || index > 1) {
    throw DomainError("component() requires a two-component system and index 0 or 1");
  }
  return state_->parts[index];
}

bool System::same_as(const System& other) const {
  return state_ == other.state_ || state_->spec == other.state_->spec;
}

Point System::real_point(double value, std::uint8_t comp) const {
  if (kind() == SystemKind::TwoComponent) {
    if (comp > 1) throw DomainError("component index must be 0 or 1");
    Point p = component(comp).real_point(value, 0);
    p.component = comp;
    return p;
  }
  if (comp != 0) throw DomainError("component index applies only to two-component systems");
  if (!std::isfinite(value)) throw DomainError("point coordinate must be finite");
  Point p;
  switch (kind()) {
    case SystemKind::FullShift:
      throw DomainError("full_shift points are symbol arrays, not reals");
    case SystemKind::Rotation:
    case SystemKind::Doubling:
      if (value < 0.0 || value >= 1.0) throw DomainError("circle coordinate must lie in [0, 1)");
      break;
    case SystemKind::Tent:
    case SystemKind::Logistic:
      if (value < 0.0 || value > 1.0) throw DomainError("interval coordinate must lie in [0, 1]");
      break;
    case SystemKind::TwoComponent:
      break;
  }
  p.value = value;
  if (kind() == SystemKind::Doubling || kind() == SystemKind::Tent) {
    // Snap the lift to the 2^-53 grid the exact representation lives on.
    const double grid = std::ldexp(1.0, kLiftBits);
    double theta = kind() == SystemKind::Tent ? value / 2.0 : value;
    theta = std::round(theta * grid) / grid;
    if (theta >= 1.0) theta = 0.0;
    p.digits = binary_expansion(theta, horizon());
    p.value = coordinate(kind(), p.digits);
  }
  return p;
}

Point System::symbolic_point(std::vector<std::uint8_t> symbols, std::uint8_t comp) const {
  if (kind() == SystemKind::TwoComponent) {
    if (comp > 1) throw DomainError("component index must be 0 or 1");
    Point p = component(comp).symbolic_point(std::move(symbols), 0);
    p.component = comp;
    return p;
  }
  if (kind() != SystemKind::FullShift) throw DomainError("symbolic points require a full_shift system");
  if (symbols.size() > horizon()) throw DomainError("symbol array longer than the horizon");
  symbols.resize(horizon(), 0);
  Point p;
  p.digits = std::move(symbols);
  validate(p);
  return p;
}

void System::validate(const Point& p) const {
  if (kind() == SystemKind::TwoComponent) {
    if (p.component > 1) throw DomainError("component index must be 0 or 1");
    Point inner = p;
    inner.component = 0;
    component(p.component).validate(inner);
    return;
  }
  if (p.component != 0) throw DomainError("component tag on a single-component system");
  switch (kind()) {
    case SystemKind::FullShift:
      if (p.value != 0.0) throw DomainError("real coordinate on a shift point");
      if (p.digits.size() > horizon()) throw DomainError("symbol array longer than the horizon");
      for (auto s : p.digits) {
        if (s >= spec().alphabet) throw DomainError("symbol outside the alphabet");
      }
      return;
    case SystemKind::Rotation:
      if (!p.digits.empty()) throw DomainError("symbol array on a rotation point");
      if (!std::isfinite(p.value) || p.value < 0.0 || p.value >= 1.0) {
        throw DomainError("circle coordinate must lie in [0, 1)");
      }
      return;
    case SystemKind::Logistic:
      if (!p.digits.empty()) throw DomainError("symbol array on a logistic point");
      if (!std::isfinite(p.value) || p.value < 0.0 || p.value > 1.0) {
        throw DomainError("interval coordinate must lie in [0, 1]");
      }
      return;
    case SystemKind::Doubling:
    case SystemKind::Tent:
      for (auto d : p.digits) {
        if (d > 1) throw DomainError("lift expansion digits must be binary");
      }
      if (p.value != coordinate(kind(), p.digits)) {
        throw DomainError("coordinate does not match its lift expansion");
      }
      return;
    case SystemKind::TwoComponent:
      return;
  }
}

Point System::apply(const Point& p) const {
  if (kind() == SystemKind::TwoComponent) {
    Point inner = p;
    inner.component = 0;
    Point out = component(p.component).apply(inner);
    out.component = p.component;
    return out;
  }
  Point out;
  switch (kind()) {
    case SystemKind::FullShift:
      if (p.digits.empty()) throw HorizonError("shift applied past the coordinate horizon");
      out.digits.assign(p.digits.begin() + 1, p.digits.end());
      return out;
    case SystemKind::Rotation: {
      double v = p.value + spec().alpha;
      if (v >= 1.0) v -= 1.0;
      out.value = v;
      return out;
    }
    case SystemKind::Doubling:
    case SystemKind::Tent:
      if (!p.digits.empty()) out.digits.assign(p.digits.begin() + 1, p.digits.end());
      out.value = coordinate(kind(), out.digits);
      return out;
    case SystemKind::Logistic:
      out.value = 4.0 * p.value * (1.0 - p.value);
      return out;
    case SystemKind::TwoComponent:
      break;
  }
  return out;
}

double cylinder_distance(std::span<const std::uint8_t> p, std::span<const std::uint8_t> q) {
  const std::size_t common = std::min(p.size(), q.size());
  const auto mismatch = std::mismatch(p.begin(), p.begin() + common, q.begin());
  const auto first = static_cast<int>(mismatch.first - p.begin());
  if (static_cast<std::size_t>(first) == common) return 0.0;
  return std::ldexp(1.0, -first);
}

double circle_distance(double x, double y) {
  const double d = std::abs(x - y);
  return std::min(d, 1.0 - d);
}

namespace {

double leaf_distance(PhaseMetric metric, const Point& p, const Point& q) {
  switch (metric) {
    case PhaseMetric::Cylinder:
      return cylinder_distance(p.digits, q.digits);
    case PhaseMetric::Circle:
      return circle_distance(p.value, q.value);
    case PhaseMetric::Interval:
      return std::abs(p.value - q.value);
    case PhaseMetric::Disjoint:
      break;
  }
  return 0.0;
}

}  // namespace

double System::distance(const Point& p, const Point& q) const {
  if (kind() == SystemKind::TwoComponent) {
    if (p.component > 1 || q.component > 1) throw DomainError("component index must be 0 or 1");
    validate(p);
    validate(q);
    if (p.component != q.component) return 1.0;
    return leaf_distance(component(p.component).metric(), p, q);
  }
  validate(p);
  validate(q);
  return leaf_distance(metric(), p, q);
}

OrbitSegment System::orbit(const Point& x, std::size_t n) const {
  if (n == 0) throw DomainError("orbit length must be positive");
  validate(x);
  OrbitSegment seg(*this, n);
  seg.component_ = x.component;
  const System& leaf = kind() == SystemKind::TwoComponent ? component(x.component) : *this;
  seg.leaf_metric_ = leaf.metric();
  switch (leaf.kind()) {
    case SystemKind::FullShift:
      if (n > x.digits.size()) {
        throw HorizonError("orbit length " + std::to_string(n) + " exceeds the coordinate horizon " +
                           std::to_string(x.digits.size()));
      }
      seg.digits_ = x.digits;
      break;
    case SystemKind::Doubling:
    case SystemKind::Tent: {
      // theta_{i+1} = 2 theta_i mod 1 + d_{i+53} 2^-53, exact in binary64.
      seg.values_.resize(n);
      double theta = lift_value(x.digits);
      for (std::size_t i = 0; i < n; ++i) {
        seg.values_[i] = leaf.kind() == SystemKind::Tent ? fold(theta) : theta;
        theta *= 2.0;
        if (theta >= 1.0) theta -= 1.0;
        const std::size_t next = i + 1 + (kLiftBits - 1);
        if (next < x.digits.size() && x.digits[next]) theta += 0x1.0p-53;
      }
      break;
    }
    case SystemKind::Rotation:
    case SystemKind::Logistic: {
      seg.values_.resize(n);
      Point p = x;
      p.component = 0;
      for (std::size_t i = 0; i < n; ++i) {
        seg.values_[i] = p.value;
        if (i + 1 < n) p = leaf.apply(p);
      }
      break;
    }
    case SystemKind::TwoComponent:
      break;
  }
  return seg;
}

// ---------------------------------------------------------------------------
// OrbitSegment

Point OrbitSegment::point(std::size_t i) const {
  if (i >= size_) throw DomainError("orbit index out of range");
  const System& leaf = system_.kind() == SystemKind::TwoComponent ? system_.component(component_) : system_;
  Point p;
  p.component = component_;
  if (symbolic()) {
    p.digits.assign(digits_.begin() + static_cast<std::ptrdiff_t>(i), digits_.end());
  } else {
    p.value = values_[i];
    if (leaf.kind() == SystemKind::Doubling) p.digits = binary_expansion(p.value, kLiftBits);
    if (leaf.kind() == SystemKind::Tent) {
      // Materialized tent points carry a lift reproducing their coordinate.
      p.digits = binary_expansion(p.value / 2.0, kLiftBits + 1);
    }
  }
  return p;
}

double OrbitSegment::distance(std::size_t i, const OrbitSegment& other, std::size_t j) const {
  if (component_ != other.component_) return 1.0;
  switch (leaf_metric_) {
    case PhaseMetric::Cylinder:
      return cylinder_distance(digits().subspan(i), other.digits().subspan(j));
    case PhaseMetric::Circle:
      return circle_distance(values_[i], other.values_[j]);
    case PhaseMetric::Interval:
      return std::abs(values_[i] - other.values_[j]);
    case PhaseMetric::Disjoint:
      break;
  }
  return 0.0;
}

void require_comparable(const OrbitSegment& a, const OrbitSegment& b) {
  if (a.size() != b.size()) {
    throw DomainError("orbit segments have different lengths (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  if (!a.system().same_as(b.system())) throw DomainError("orbit segments come from different systems");
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

SystemSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("system spec needs a \"kind\" field");
  const auto kind = j.at("kind").get<std::string>();
  const std::size_t horizon = j.value("horizon", std::size_t{0});
  if (kind == "full_shift") return SystemSpec::full_shift(j.value("k", 2), horizon);
  if (kind == "rotation") return SystemSpec::rotation(j.value("alpha", 0.0));
  if (kind == "doubling") return SystemSpec::doubling(horizon);
  if (kind == "tent") return SystemSpec::tent(horizon);
  if (kind == "logistic") return SystemSpec::logistic();
  if (kind == "two_component") {
    if (!j.contains("a") || !j.contains("b")) throw ConfigError("two_component needs \"a\" and \"b\"");
    return SystemSpec::two_component(spec_from_json(j.at("a")), spec_from_json(j.at("b")),
                                     j.value("weight_a", 0.5));
  }
  throw ConfigError("unknown system kind \"" + kind + "\"");
}

nlohmann::json spec_to_json(const SystemSpec& s) {
  nlohmann::json j;
  j["kind"] = kind_name(s.kind);
  switch (s.kind) {
    case SystemKind::FullShift:
      j["k"] = s.alphabet;
      j["horizon"] = s.horizon;
      break;
    case SystemKind::Rotation:
      j["alpha"] = s.alpha;
      break;
    case SystemKind::Doubling:
    case SystemKind::Tent:
      if (s.horizon != 0) j["horizon"] = s.horizon;
      break;
    case SystemKind::Logistic:
      break;
    case SystemKind::TwoComponent:
      j["a"] = spec_to_json(s.components.at(0));
      j["b"] = spec_to_json(s.components.at(1));
      j["weight_a"] = s.weight_a;
      break;
  }
  return j;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from \"" + text + "\"");
  }
}

}  // namespace

SystemSpec parse_system_spec(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid system JSON: ") + e.what());
    }
    try {
      return spec_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid system JSON: ") + e.what());
    }
  }
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "full_shift") {
    const auto comma = arg.find(',');
    const int k = arg.empty() ? 2 : static_cast<int>(parse_number(arg.substr(0, comma), "alphabet size"));
    const std::size_t h = comma == std::string::npos
                              ? 0
                              : static_cast<std::size_t>(parse_number(arg.substr(comma + 1), "horizon"));
    return SystemSpec::full_shift(k, h);
  }
  if (name == "rotation") {
    if (arg == "golden") return SystemSpec::rotation((std::sqrt(5.0) - 1.0) / 2.0);
    return SystemSpec::rotation(arg.empty() ? 0.0 : parse_number(arg, "rotation angle"));
  }
  if (name == "doubling") return SystemSpec::doubling(arg.empty() ? 0 : static_cast<std::size_t>(parse_number(arg, "horizon")));
  if (name == "tent") return SystemSpec::tent(arg.empty() ? 0 : static_cast<std::size_t>(parse_number(arg, "horizon")));
  if (name == "logistic") return SystemSpec::logistic();
  throw ConfigError("unknown system \"" + text + "\"");
}

std::string to_json(const SystemSpec& spec) { return spec_to_json(spec).dump(); }

// ---------------------------------------------------------------------------
// Measures

MeasureSpec MeasureSpec::bernoulli(std::vector<double> p) { return {MeasureKind::Bernoulli, std::move(p)}; }

MeasureSpec parse_measure_spec(const std::string& text) {
  if (text == "lebesgue") return MeasureSpec::lebesgue();
  if (text == "arcsine") return MeasureSpec::arcsine();
  const std::string prefix = "bernoulli:";
  if (text.rfind(prefix, 0) == 0) {
    std::vector<double> p;
    std::stringstream in(text.substr(prefix.size()));
    std::string item;
    while (std::getline(in, item, ',')) p.push_back(parse_number(item, "Bernoulli weight"));
    return MeasureSpec::bernoulli(std::move(p));
  }
  throw ConfigError("unknown measure \"" + text + "\"");
}

std::string to_string(const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::Lebesgue:
      return "lebesgue";
    case MeasureKind::Arcsine:
      return "arcsine";
    case MeasureKind::Bernoulli: {
      std::ostringstream out;
      out.precision(17);
      out << "bernoulli:";
      for (std::size_t i = 0; i < spec.probabilities.size(); ++i) out << (i ? "," : "") << spec.probabilities[i];
      return out.str();
    }
  }
  return "?";
}

MeasureSpec natural_measure(const System& system) {
  switch (system.kind()) {
    case SystemKind::FullShift:
      return MeasureSpec::bernoulli(std::vector<double>(static_cast<std::size_t>(system.spec().alphabet),
                                                        1.0 / system.spec().alphabet));
    case SystemKind::Logistic:
      return MeasureSpec::arcsine();
    default:
      return MeasureSpec::lebesgue();
  }
}

namespace {

void check_compatible(const System& system, const MeasureSpec& m) {
  switch (m.kind) {
    case MeasureKind::Bernoulli: {
      if (system.kind() != SystemKind::FullShift) throw ConfigError("Bernoulli measures need a full_shift system");
      if (m.probabilities.size() != static_cast<std::size_t>(system.spec().alphabet)) {
        throw ConfigError("Bernoulli weights must have one entry per symbol");
      }
      double total = 0.0;
      for (double p : m.probabilities) {
        if (!(p >= 0.0)) throw ConfigError("Bernoulli weights must be nonnegative");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) throw ConfigError("Bernoulli weights must sum to 1 within 1e-12");
      return;
    }
    case MeasureKind::Lebesgue:
      switch (system.kind()) {
        case SystemKind::Rotation:
        case SystemKind::Doubling:
        case SystemKind::Tent:
          return;
        case SystemKind::TwoComponent:
          for (std::size_t c = 0; c < 2; ++c) {
            const auto& part = system.component(c);
            if (part.kind() == SystemKind::Logistic) throw ConfigError("Lebesgue is not invariant for logistic");
          }
          return;
        default:
          throw ConfigError("Lebesgue measure needs a rotation, doubling, tent, or two-component system");
      }
    case MeasureKind::Arcsine:
      if (system.kind() != SystemKind::Logistic) throw ConfigError("arcsine measure needs the logistic system");
      return;
  }
}

// Draws one point of `system` (not two-component) from its measure.
Point draw_leaf(const System& system, const MeasureSpec& m, std::mt19937_64& gen) {
  Point p;
  switch (system.kind()) {
    case SystemKind::FullShift: {
      std::vector<double> cumulative;
      if (m.kind == MeasureKind::Bernoulli) {
        std::partial_sum(m.probabilities.begin(), m.probabilities.end(), std::back_inserter(cumulative));
      } else {
        const int k = system.spec().alphabet;
        for (int s = 1; s <= k; ++s) cumulative.push_back(static_cast<double>(s) / k);
      }
      p.digits.resize(system.horizon());
      for (auto& d : p.digits) {
        const double u = uniform01(gen);
        std::uint8_t s = 0;
        while (s + 1u < cumulative.size() && u >= cumulative[s]) ++s;
        d = s;
      }
      return p;
    }
    case SystemKind::Rotation:
      p.value = uniform01(gen);
      return p;
    case SystemKind::Doubling:
    case SystemKind::Tent: {
      p.digits.resize(system.horizon());
      for (std::size_t i = 0; i < p.digits.size(); i += 64) {
        const std::uint64_t bits = gen();
        for (std::size_t b = 0; b < 64 && i + b < p.digits.size(); ++b) {
          p.digits[i + b] = static_cast<std::uint8_t>((bits >> (63 - b)) & 1u);
        }
      }
      p.value = coordinate(system.kind(), p.digits);
      return p;
    }
    case SystemKind::Logistic: {
      const double s = std::sin(std::numbers::pi * uniform01(gen) / 2.0);
      p.value = std::min(1.0, s * s);
      return p;
    }
    case SystemKind::TwoComponent:
      break;
  }
  return p;
}

}  // namespace

EmpiricalMeasure sample_points(const System& system, const MeasureSpec& measure, std::size_t count,
                               std::uint64_t seed) {
  if (count == 0) throw ConfigError("sample size M must be at least 1");
  check_compatible(system, measure);
  EmpiricalMeasure mu;
  mu.provenance = Provenance::IidSampler;
  mu.seed = seed;
  mu.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto gen = make_stream(seed, i);
    if (system.kind() == SystemKind::TwoComponent) {
      const std::uint8_t comp = uniform01(gen) < system.spec().weight_a ? 0 : 1;
      const System& part = system.component(comp);
      Point p = draw_leaf(part, natural_measure(part), gen);
      p.component = comp;
      mu.points.push_back(std::move(p));
    } else {
      mu.points.push_back(draw_leaf(system, measure, gen));
    }
  }
  return mu;
}

EmpiricalMeasure orbit_average(const System& system, const Point& x, std::size_t count) {
  if (count == 0) throw ConfigError("sample size M must be at least 1");
  system.validate(x);
  EmpiricalMeasure mu;
  mu.provenance = Provenance::OrbitAverage;
  mu.points.reserve(count);
  Point p = x;
  for (std::size_t i = 0; i < count; ++i) {
    mu.points.push_back(p);
    if (i + 1 < count) p = system.apply(p);
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Partitions

Partition Partition::zero_coordinate(std::size_t alphabet) {
  if (alphabet < 2) throw ConfigError("partition needs at least 2 cells");
  return {Kind::ZeroCoordinate, alphabet};
}

Partition Partition::bins(std::size_t count) {
  if (count < 2) throw ConfigError("partition needs at least 2 cells");
  return {Kind::IntervalBins, count};
}

Partition parse_partition(const std::string& text, const System& system) {
  if (text == "zero") {
    if (!system.symbolic()) throw ConfigError("zero-coordinate partition needs a full_shift system");
    return Partition::zero_coordinate(static_cast<std::size_t>(system.spec().alphabet));
  }
  if (text.rfind("bins:", 0) == 0) {
    return Partition::bins(static_cast<std::size_t>(parse_number(text.substr(5), "bin count")));
  }
  throw ConfigError("unknown partition \"" + text + "\"");
}

std::string to_string(const Partition& partition) {
  return partition.kind == Partition::Kind::ZeroCoordinate ? "zero"
                                                           : "bins:" + std::to_string(partition.cells);
}

std::size_t cell_of(const System& system, const Partition& partition, const Point& p) {
  if (system.kind() == SystemKind::TwoComponent) throw DomainError("partitions of two-component systems are not supported");
  if (partition.kind == Partition::Kind::ZeroCoordinate) {
    if (!system.symbolic()) throw DomainError("zero-coordinate partition needs a full_shift system");
    if (partition.cells != static_cast<std::size_t>(system.spec().alphabet)) {
      throw DomainError("zero-coordinate partition must have one cell per symbol");
    }
    if (p.digits.empty()) throw HorizonError("point has no coordinates left");
    return p.digits.front();
  }
  if (system.symbolic()) throw DomainError("interval bins need a real-coordinate system");
  const auto cells = static_cast<double>(partition.cells);
  const auto index = static_cast<std::size_t>(std::floor(p.value * cells));
  return std::min(index, partition.cells - 1);
}

Word itinerary(const System& system, const Partition& partition, const Point& x, std::size_t n) {
  const OrbitSegment orbit = system.orbit(x, n);
  Word word(n);
  if (orbit.symbolic()) {
    (void)cell_of(system, partition, x);
    for (std::size_t i = 0; i < n; ++i) word[i] = orbit.digits()[i];
    return word;
  }
  Point probe;
  for (std::size_t i = 0; i < n; ++i) {
    probe.value = orbit.values()[i];
    word[i] = static_cast<std::uint16_t>(cell_of(system, partition, probe));
  }
  return word;
}

}  // namespace fkm
