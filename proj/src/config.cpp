#include "hqc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "hqc/units.hpp"

namespace hqc {

namespace {

constexpr double kPi = units::two_pi / 2;

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<double> to_number(std::string_view s) {
  const std::string t = trimmed(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

const std::string kNumber = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";

}  // namespace

double parse_angular_frequency(std::string_view text, const std::string& field) {
  static const std::regex re(R"(^\s*(2\s*\*?\s*(?:pi|π)\s*(?:\*|x|×)?\s*)?)" + kNumber +
                                 R"(\s*(rad/us|rad/µs|rad/μs|rad/ns|rad/s|hz|khz|mhz|ghz|thz)?\s*$)",
                             std::regex::icase);
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re))
    throw schema_error(field, fmt::format("cannot read '{}' as an angular frequency", s));
  const bool two_pi = m[1].matched;
  const double v = *to_number(m[2].str());
  if (!m[3].matched) {
    if (v == 0.0 && !two_pi) return 0.0;
    throw schema_error(field, fmt::format("'{}' has no unit (use e.g. '2pi*50 MHz' or 'rad/us')", s));
  }
  const std::string unit = lower(m[3].str());
  double w = 0.0;
  if (unit.rfind("rad/", 0) == 0) {
    const std::string per = unit.substr(4);
    w = per == "ns" ? v * 1e3 : per == "s" ? v * 1e-6 : v;
    return two_pi ? units::two_pi * w : w;
  }
  if (!two_pi && v != 0.0)
    throw schema_error(field, fmt::format("cyclic frequency '{}' needs an explicit 2pi factor", s));
  if (unit == "hz") return units::hz(v);
  if (unit == "khz") return units::khz(v);
  if (unit == "mhz") return units::mhz(v);
  if (unit == "ghz") return units::ghz(v);
  return units::thz(v);
}

double TimeSpec::resolve(double lambda_prime) const {
  if (!periods) return value;
  if (!(lambda_prime > 0.0)) throw usage_error("a time in periods needs lambda' > 0");
  return value * units::two_pi / lambda_prime;
}

TimeSpec parse_time(std::string_view text, const std::string& field) {
  static const std::regex re("^\\s*" + kNumber + R"(\s*(s|ms|us|µs|μs|ns|periods?)?\s*$)", std::regex::icase);
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw schema_error(field, fmt::format("cannot read '{}' as a time", s));
  const double v = *to_number(m[1].str());
  if (!m[2].matched) {
    if (v == 0.0) return {0.0, false};
    throw schema_error(field, fmt::format("'{}' has no unit (use e.g. '0.5 us' or '2 periods')", s));
  }
  if (v < 0.0) throw schema_error(field, "time must not be negative");
  const std::string unit = lower(m[2].str());
  if (unit.rfind("period", 0) == 0) return {v, true};
  if (unit == "s") return {v * 1e6, false};
  if (unit == "ms") return {v * 1e3, false};
  if (unit == "ns") return {v * 1e-3, false};
  return {v, false};
}

double parse_angle(std::string_view text, const std::string& field) {
  const std::string s = trimmed(text);
  if (auto v = to_number(s)) return *v;
  static const std::regex deg("^" + kNumber + R"(\s*(deg|rad)$)", std::regex::icase);
  static const std::regex pis(
      R"(^([-+])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*(?:pi|π)(?:\s*/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))?$)",
      std::regex::icase);
  std::smatch m;
  if (std::regex_match(s, m, deg)) {
    const double v = *to_number(m[1].str());
    return lower(m[2].str()) == "deg" ? v * kPi / 180.0 : v;
  }
  if (std::regex_match(s, m, pis)) {
    const double sign = m[1].matched && m[1].str() == "-" ? -1.0 : 1.0;
    const double num = m[2].matched ? *to_number(m[2].str()) : 1.0;
    const double den = m[3].matched ? *to_number(m[3].str()) : 1.0;
    if (den == 0.0) throw schema_error(field, "division by zero in angle");
    return sign * num * kPi / den;
  }
  throw schema_error(field, fmt::format("cannot read '{}' as an angle (use e.g. 'pi/2', '0.3', '90 deg')", s));
}

// ---------- YAML access ----------
namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!n.IsMap()) throw schema_error(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw schema_error(join(path, key), "unknown key");
  }
}

std::string scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw schema_error(field, "expected a scalar value");
  return n.as<std::string>();
}

double number(const YAML::Node& n, const std::string& field) {
  auto v = to_number(scalar(n, field));
  if (!v) throw schema_error(field, fmt::format("'{}' is not a number", n.as<std::string>()));
  return *v;
}

std::size_t count(const YAML::Node& n, const std::string& field, std::size_t min) {
  const double v = number(n, field);
  if (v != std::floor(v) || v < double(min)) throw schema_error(field, fmt::format("expected an integer >= {}", min));
  return std::size_t(v);
}

bool boolean(const YAML::Node& n, const std::string& field) {
  const std::string s = lower(scalar(n, field));
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  throw schema_error(field, fmt::format("'{}' is not a boolean", s));
}

template <class F>
auto enum_value(const YAML::Node& n, const std::string& field, F&& from_string) {
  try {
    return from_string(scalar(n, field));
  } catch (const schema_error&) {
    throw;
  } catch (const error& e) {
    throw schema_error(field, e.what());
  }
}

YAML::Node merged(const YAML::Node& base, const YAML::Node& over) {
  if (!base.IsMap() || !over.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const std::string key = kv.first.as<std::string>();
    out[key] = base[key] ? merged(base[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

std::size_t logical_dim(GateKind k) { return k == GateKind::cp ? 4 : 2; }

Vector named_state(const std::string& name, GateKind kind, const std::string& field) {
  const auto d = Eigen::Index(logical_dim(kind));
  Vector v = Vector::Zero(d);
  if (name == "bell") {
    v(0) = v(d - 1) = 1.0 / std::sqrt(2.0);
  } else if (name == "plus") {
    v.setConstant(1.0 / std::sqrt(double(d)));
  } else if (name.rfind("basis", 0) == 0) {
    auto k = to_number(name.substr(5));
    if (!k || *k != std::floor(*k) || *k < 0 || *k >= double(d))
      throw schema_error(field, fmt::format("'{}': basis index must be 0..{}", name, d - 1));
    v(Eigen::Index(*k)) = 1.0;
  } else {
    throw schema_error(field, fmt::format("unknown state '{}' (bell, plus, basis K or an amplitude list)", name));
  }
  return v;
}

void parse_initial_state(const YAML::Node& n, ScenarioConfig& s, const std::string& field) {
  if (n.IsScalar()) {
    s.initial_label = trimmed(scalar(n, field));
    s.psi_in = named_state(s.initial_label, s.kind, field);
    return;
  }
  if (!n.IsSequence()) throw schema_error(field, "expected a state name or a list of amplitudes");
  const auto d = logical_dim(s.kind);
  if (n.size() != d) throw schema_error(field, fmt::format("expected {} amplitudes, got {}", d, n.size()));
  s.psi_in = Vector::Zero(Eigen::Index(d));
  for (std::size_t i = 0; i < d; ++i) {
    const std::string f = fmt::format("{}[{}]", field, i);
    const YAML::Node a = n[i];
    if (a.IsSequence()) {
      if (a.size() != 2) throw schema_error(f, "complex amplitudes are [re, im]");
      s.psi_in(Eigen::Index(i)) = cplx(number(a[0], f), number(a[1], f));
    } else {
      s.psi_in(Eigen::Index(i)) = number(a, f);
    }
  }
  if (std::abs(s.psi_in.squaredNorm() - 1.0) > 1e-9) throw schema_error(field, "amplitudes are not normalized");
  s.initial_label = "custom";
}

ScenarioConfig parse_scenario(const YAML::Node& n, const std::string& default_name) {
  check_keys(n, "", {"name", "seed", "holonomy", "tqda", "nvplatform", "dynamics", "output"});
  ScenarioConfig s;
  s.name = n["name"] ? trimmed(scalar(n["name"], "name")) : default_name;
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos || s.name == "." || s.name == "..")
    throw schema_error("name", "must be a plain, non-empty directory name");
  if (n["seed"]) s.seed = count(n["seed"], "seed", 0);

  const YAML::Node h = n["holonomy"];
  if (!h) throw schema_error("holonomy", "required section missing");
  check_keys(h, "holonomy", {"kind", "phi_c", "ramp", "durations", "close_loop", "ideal_angle"});
  if (!h["kind"]) throw schema_error("holonomy.kind", "required field missing");
  s.kind = enum_value(h["kind"], "holonomy.kind", gate_kind_from_string);
  if (!h["phi_c"]) throw schema_error("holonomy.phi_c", "required field missing");
  s.phi_c = parse_angle(scalar(h["phi_c"], "holonomy.phi_c"), "holonomy.phi_c");
  if (h["ramp"]) {
    const std::string r = lower(scalar(h["ramp"], "holonomy.ramp"));
    if (r == "cosine") s.ramp = Ramp::cosine;
    else if (r == "linear") s.ramp = Ramp::linear;
    else throw schema_error("holonomy.ramp", fmt::format("unknown ramp '{}' (cosine, linear)", r));
  }
  if (h["close_loop"]) s.close_loop = boolean(h["close_loop"], "holonomy.close_loop");
  const std::size_t legs = s.kind == GateKind::bitphase && s.close_loop ? 4 : 3;
  if (h["durations"]) {
    const YAML::Node d = h["durations"];
    if (!d.IsSequence() || d.size() != legs)
      throw schema_error("holonomy.durations", fmt::format("expected a list of {} relative durations", legs));
    for (std::size_t i = 0; i < legs; ++i) {
      const double w = number(d[i], fmt::format("holonomy.durations[{}]", i));
      if (!(w > 0.0)) throw schema_error(fmt::format("holonomy.durations[{}]", i), "must be positive");
      s.duration_weights.push_back(w);
    }
  } else {
    s.duration_weights.assign(legs, 1.0);
  }
  if (h["ideal_angle"]) s.ideal_angle = parse_angle(scalar(h["ideal_angle"], "holonomy.ideal_angle"), "holonomy.ideal_angle");

  if (const YAML::Node t = n["tqda"]) {
    check_keys(t, "tqda", {"counterdiabatic", "fd_fraction"});
    if (t["counterdiabatic"])
      s.counterdiabatic = enum_value(t["counterdiabatic"], "tqda.counterdiabatic", cd_source_from_string);
    if (t["fd_fraction"]) {
      s.fd_fraction = number(t["fd_fraction"], "tqda.fd_fraction");
      if (!(s.fd_fraction > 0.0 && s.fd_fraction < 0.5))
        throw schema_error("tqda.fd_fraction", "must lie in (0, 0.5)");
    }
  }

  if (const YAML::Node p = n["nvplatform"]) {
    check_keys(p, "nvplatform",
               {"g", "centers", "fock_cutoff", "include_stark", "dispersive_ratio", "guard", "lambda_prime"});
    if (p["g"]) s.drive.g = parse_angular_frequency(scalar(p["g"], "nvplatform.g"), "nvplatform.g");
    if (p["centers"]) {
      const YAML::Node c = p["centers"];
      if (!c.IsSequence()) throw schema_error("nvplatform.centers", "expected a list");
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string f = fmt::format("nvplatform.centers[{}]", i);
        NvCenterDrive d;
        if (c[i].IsScalar()) {
          if (lower(scalar(c[i], f)) != "off") throw schema_error(f, "a scalar entry must be 'off'");
          d.laser_on = false;
        } else {
          check_keys(c[i], f, {"delta", "phi", "laser"});
          if (c[i]["laser"]) d.laser_on = boolean(c[i]["laser"], f + ".laser");
          if (c[i]["phi"]) d.phi = parse_angle(scalar(c[i]["phi"], f + ".phi"), f + ".phi");
          if (c[i]["delta"]) {
            d.delta = parse_angular_frequency(scalar(c[i]["delta"], f + ".delta"), f + ".delta");
          } else if (d.laser_on) {
            throw schema_error(f + ".delta", "required for a driven centre");
          }
        }
        s.drive.centers.push_back(d);
      }
    }
    if (p["fock_cutoff"]) s.drive.fock_cutoff = count(p["fock_cutoff"], "nvplatform.fock_cutoff", 1);
    if (p["include_stark"]) s.drive.include_stark = boolean(p["include_stark"], "nvplatform.include_stark");
    if (p["dispersive_ratio"]) {
      s.drive.dispersive_ratio = number(p["dispersive_ratio"], "nvplatform.dispersive_ratio");
      if (!(s.drive.dispersive_ratio > 0.0)) throw schema_error("nvplatform.dispersive_ratio", "must be positive");
    }
    if (p["guard"]) s.drive.guard_enabled = boolean(p["guard"], "nvplatform.guard");
    if (p["lambda_prime"]) {
      const std::string v = trimmed(scalar(p["lambda_prime"], "nvplatform.lambda_prime"));
      if (lower(v) != "auto") {
        s.lambda_prime = parse_angular_frequency(v, "nvplatform.lambda_prime");
        if (!(*s.lambda_prime > 0.0)) throw schema_error("nvplatform.lambda_prime", "must be positive");
      }
    }
  }

  std::optional<YAML::Node> initial;
  if (const YAML::Node d = n["dynamics"]) {
    check_keys(d, "dynamics",
               {"layer", "total_time", "kappa", "gamma", "gamma_phi", "initial_state", "samples", "tol", "wilson_steps"});
    if (d["layer"]) s.layer = enum_value(d["layer"], "dynamics.layer", layer_from_string);
    if (d["total_time"]) s.total_time = parse_time(scalar(d["total_time"], "dynamics.total_time"), "dynamics.total_time");
    for (auto [key, dst] : {std::pair{"kappa", &s.noise.kappa}, std::pair{"gamma", &s.noise.gamma},
                            std::pair{"gamma_phi", &s.noise.gamma_phi}}) {
      const std::string f = std::string("dynamics.") + key;
      if (d[key]) *dst = parse_angular_frequency(scalar(d[key], f), f);
      if (*dst < 0.0) throw schema_error(f, "rates must not be negative");
    }
    if (d["initial_state"]) initial = d["initial_state"];
    if (d["samples"]) s.samples = count(d["samples"], "dynamics.samples", 1);
    if (d["tol"]) {
      s.tol = number(d["tol"], "dynamics.tol");
      if (!(s.tol > 0.0 && s.tol < 1e-2)) throw schema_error("dynamics.tol", "must lie in (0, 1e-2)");
    }
    if (d["wilson_steps"]) s.wilson_steps = count(d["wilson_steps"], "dynamics.wilson_steps", 1);
  }
  if (initial) parse_initial_state(*initial, s, "dynamics.initial_state");
  else s.psi_in = named_state(s.initial_label, s.kind, "dynamics.initial_state");

  s.output_dir = s.name;
  if (const YAML::Node o = n["output"]) {
    check_keys(o, "output", {"dir", "trajectory"});
    if (o["dir"]) {
      s.output_dir = trimmed(scalar(o["dir"], "output.dir"));
      if (s.output_dir.empty() || s.output_dir.front() == '/' || s.output_dir.find("..") != std::string::npos)
        throw schema_error("output.dir", "must be a relative path inside the output root");
    }
    if (o["trajectory"]) s.write_trajectory = boolean(o["trajectory"], "output.trajectory");
  }

  // Derived checks that need the whole scenario.
  try {
    (void)s.resolved_lambda_prime();
  } catch (const usage_error& e) {
    throw schema_error("nvplatform.lambda_prime", e.what());
  }
  if (s.resolved_total_time() <= 0.0) throw schema_error("dynamics.total_time", "must be positive");
  return s;
}

std::vector<double> parse_sweep_values(const YAML::Node& v, const std::string& axis) {
  const std::string field = "sweep.values";
  std::vector<double> out;
  auto value = [&](const YAML::Node& x, const std::string& f) {
    try {
      return parse_axis_value(axis, scalar(x, f));
    } catch (const schema_error& e) {
      throw schema_error(f, e.what());
    }
  };
  if (v.IsSequence()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(value(v[i], fmt::format("{}[{}]", field, i)));
  } else if (v.IsMap()) {
    check_keys(v, field, {"linspace", "logspace"});
    const bool log = bool(v["logspace"]);
    const YAML::Node r = log ? v["logspace"] : v["linspace"];
    const std::string f = field + (log ? ".logspace" : ".linspace");
    if (!r.IsSequence() || r.size() != 3) throw schema_error(f, "expected [first, last, count]");
    const double a = value(r[0], f), b = value(r[1], f);
    const std::size_t k = count(r[2], f, 1);
    if (log && !(a > 0.0 && b > 0.0)) throw schema_error(f, "log spacing needs positive end points");
    for (std::size_t i = 0; i < k; ++i) {
      const double u = k == 1 ? 0.0 : double(i) / double(k - 1);
      out.push_back(log ? a * std::pow(b / a, u) : a + (b - a) * u);
    }
  } else {
    throw schema_error(field, "expected a list or a linspace/logspace mapping");
  }
  if (out.empty()) throw schema_error(field, "no values to sweep");
  return out;
}

}  // namespace

double ScenarioConfig::resolved_lambda_prime() const {
  if (lambda_prime) return *lambda_prime;
  const NvCenterDrive* first = nullptr;
  for (const auto& c : drive.centers) {
    if (!c.laser_on) continue;
    if (!first) {
      first = &c;
      continue;
    }
    const double lp = effective_rabi(drive.g, first->delta, c.delta);
    if (!(lp > 0.0)) throw usage_error("the first two driven centres give lambda' <= 0");
    return lp;
  }
  throw usage_error("needs two driven centres or an explicit value");
}

double ScenarioConfig::resolved_total_time() const { return total_time.resolve(resolved_lambda_prime()); }

GateSetup ScenarioConfig::to_setup() const {
  GateSetup g;
  g.kind = kind;
  const double total = resolved_total_time();
  double sum = 0.0;
  for (double w : duration_weights) sum += w;
  std::vector<double> durations;
  for (double w : duration_weights) durations.push_back(total * w / sum);
  g.schedule = make_schedule(kind, phi_c, durations, ramp, resolved_lambda_prime());
  g.layer = layer;
  g.counterdiabatic = counterdiabatic;
  g.noise = noise;
  g.drive = drive;
  g.psi_in = psi_in;
  g.initial_label = initial_label;
  g.schedule_id = name;
  g.ideal_angle = ideal_angle;
  g.wilson_steps = wilson_steps;
  g.samples = samples;
  g.tol = tol;
  g.fd_fraction = fd_fraction;
  return g;
}

nlohmann::ordered_json ScenarioConfig::resolved() const {
  using json = nlohmann::ordered_json;
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["holonomy"] = {{"kind", to_string(kind)},
                   {"phi_c_rad", phi_c},
                   {"ramp", ramp == Ramp::cosine ? "cosine" : "linear"},
                   {"durations", duration_weights},
                   {"close_loop", close_loop},
                   {"ideal_angle_rad", ideal_angle ? json(*ideal_angle) : json(nullptr)}};
  j["tqda"] = {{"counterdiabatic", to_string(counterdiabatic)}, {"fd_fraction", fd_fraction}};
  json centers = json::array();
  for (const auto& c : drive.centers)
    centers.push_back({{"laser", c.laser_on ? "on" : "off"}, {"delta_rad_per_us", c.delta}, {"phi_rad", c.phi}});
  j["nvplatform"] = {{"g_rad_per_us", drive.g},
                     {"centers", centers},
                     {"fock_cutoff", drive.fock_cutoff},
                     {"include_stark", drive.include_stark},
                     {"dispersive_ratio", drive.dispersive_ratio},
                     {"guard", drive.guard_enabled},
                     {"lambda_prime", lambda_prime ? "explicit" : "auto"},
                     {"lambda_prime_rad_per_us", resolved_lambda_prime()}};
  json psi = json::array();
  for (Eigen::Index i = 0; i < psi_in.size(); ++i) psi.push_back({psi_in(i).real(), psi_in(i).imag()});
  j["dynamics"] = {{"layer", to_string(layer)},
                   {"total_time_us", resolved_total_time()},
                   {"total_time_periods", total_time.periods ? json(total_time.value) : json(nullptr)},
                   {"kappa_rad_per_us", noise.kappa},
                   {"gamma_rad_per_us", noise.gamma},
                   {"gamma_phi_rad_per_us", noise.gamma_phi},
                   {"initial_state", initial_label},
                   {"psi_in", psi},
                   {"samples", samples},
                   {"tol", tol},
                   {"wilson_steps", wilson_steps}};
  j["output"] = {{"dir", output_dir}, {"trajectory", write_trajectory}};
  return j;
}

CampaignConfig parse_campaign(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw schema_error(origin, fmt::format("not valid YAML: {}", e.what()));
  }
  if (!root || root.IsNull()) throw schema_error(origin, "empty configuration");
  check_keys(root, "", {"name", "seed", "holonomy", "tqda", "nvplatform", "dynamics", "output", "sweep", "scenarios"});

  CampaignConfig c;
  c.source = text;
  c.sha256 = sha256_hex(text);
  YAML::Node base = YAML::Clone(root);
  base.remove("scenarios");
  base.remove("sweep");
  if (const YAML::Node list = root["scenarios"]) {
    if (!list.IsSequence() || list.size() == 0) throw schema_error("scenarios", "expected a non-empty list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      try {
        c.scenarios.push_back(parse_scenario(merged(base, list[i]), fmt::format("scenario_{}", i + 1)));
      } catch (const schema_error& e) {
        throw schema_error(fmt::format("scenarios[{}].{}", i, e.field()), std::string(e.what()).substr(e.field().size() + 2));
      }
    }
  } else {
    c.scenarios.push_back(parse_scenario(base, "scenario"));
  }
  std::set<std::string> dirs;
  for (const auto& s : c.scenarios)
    if (!dirs.insert(s.output_dir).second)
      throw schema_error("output.dir", fmt::format("two scenarios write to '{}'", s.output_dir));

  if (const YAML::Node sw = root["sweep"]) {
    check_keys(sw, "sweep", {"axis", "values"});
    if (!sw["axis"]) throw schema_error("sweep.axis", "required field missing");
    SweepSpec spec;
    spec.axis = trimmed(scalar(sw["axis"], "sweep.axis"));
    const auto& axes = sweep_axes();
    if (std::find(axes.begin(), axes.end(), spec.axis) == axes.end())
      throw schema_error("sweep.axis", fmt::format("unknown axis '{}'", spec.axis));
    if (!sw["values"]) throw schema_error("sweep.values", "required field missing");
    spec.values = parse_sweep_values(sw["values"], spec.axis);
    c.sweep = spec;
  }
  return c;
}

CampaignConfig load_campaign(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error(fmt::format("cannot open config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_campaign(ss.str(), path);
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"phi_c", "total_time", "total_periods", "lambda_prime", "g",
                                             "kappa", "gamma",      "gamma_phi",     "tol",          "fock_cutoff"};
  return axes;
}

double parse_axis_value(const std::string& axis, std::string_view text) {
  const std::string f = "sweep." + axis;
  if (axis == "phi_c") return parse_angle(text, f);
  if (axis == "total_time") {
    const TimeSpec t = parse_time(text, f);
    if (t.periods) throw schema_error(f, "use the total_periods axis for times in periods");
    return t.value;
  }
  if (axis == "lambda_prime" || axis == "g" || axis == "kappa" || axis == "gamma" || axis == "gamma_phi")
    return parse_angular_frequency(text, f);
  if (axis == "total_periods" || axis == "tol" || axis == "fock_cutoff") {
    auto v = to_number(text);
    if (!v) throw schema_error(f, fmt::format("'{}' is not a number", std::string(text)));
    return *v;
  }
  throw usage_error(fmt::format("unknown sweep axis '{}'", axis));
}

void apply_axis(ScenarioConfig& s, const std::string& axis, double value) {
  if (axis == "phi_c") s.phi_c = value;
  else if (axis == "total_time") s.total_time = {value, false};
  else if (axis == "total_periods") s.total_time = {value, true};
  else if (axis == "lambda_prime") s.lambda_prime = value;
  else if (axis == "g") s.drive.g = value;
  else if (axis == "kappa") s.noise.kappa = value;
  else if (axis == "gamma") s.noise.gamma = value;
  else if (axis == "gamma_phi") s.noise.gamma_phi = value;
  else if (axis == "tol") s.tol = value;
  else if (axis == "fock_cutoff") {
    if (value < 1.0 || value != std::floor(value)) throw usage_error("fock_cutoff must be an integer >= 1");
    s.drive.fock_cutoff = std::size_t(value);
  } else {
    throw usage_error(fmt::format("unknown sweep axis '{}'", axis));
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw usage_error("SHA-256 digest failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace hqc
