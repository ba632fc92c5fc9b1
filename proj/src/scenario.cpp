#include "fokker/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace fokker {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> run_keys{"name",    "experiment", "nodes",    "seed",     "hbar",
                                     "output",  "tol_grad",   "tol_shell", "tol_root", "max_iterations"};
const std::set<std::string> particle_keys{
    "mass",  "charge",   "switching", "s_on",   "s_off",  "ramp",     "worldline", "start",
    "end",   "t0",       "duration",  "radius", "speed",  "phase",    "centre_x",  "centre_y",
    "file",  "frozen",   "warp"};

template <class T>
T get(const pt::ptree& section, const std::string& where, const std::string& key, const T& fallback) {
  const auto text = section.get_optional<std::string>(key);
  if (!text) return fallback;
  const auto v = pt::ptree(*text).get_value_optional<T>();
  if (!v) throw ConfigError(where + "." + key + ": cannot parse '" + *text + "'");
  return *v;
}

void check_keys(const pt::ptree& section, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, child] : section) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
}

ParticleSpec parse_particle(const pt::ptree& s, const std::string& where,
                            const std::filesystem::path& base) {
  check_keys(s, where, particle_keys);
  ParticleSpec p;
  p.mass = get(s, where, "mass", 1.0);
  require_positive(p.mass, where + ".mass");

  const double e = get(s, where, "charge", 0.0);
  const auto sw = get<std::string>(s, where, "switching", e == 0.0 ? "off" : "always");
  if (sw == "off") {
    p.profile = SwitchingProfile::off();
  } else if (sw == "always") {
    p.profile = SwitchingProfile::always_on(e);
  } else if (sw == "pulse") {
    p.profile = SwitchingProfile::pulse(e, get(s, where, "s_on", 0.0), get(s, where, "s_off", 1.0),
                                        get(s, where, "ramp", 1.0));
  } else {
    throw ConfigError(where + ".switching: expected off, always or pulse, got '" + sw + "'");
  }

  const auto shape = get<std::string>(s, where, "worldline", "straight");
  if (shape == "straight") {
    p.shape = Shape::straight;
    p.start = parse_four_vector(get<std::string>(s, where, "start", "0 0 0 0"));
    p.end = parse_four_vector(get<std::string>(s, where, "end", "1 0 0 0"));
  } else if (shape == "circular") {
    p.shape = Shape::circular;
    p.t0 = get(s, where, "t0", 0.0);
    p.duration = get(s, where, "duration", 1.0);
    p.radius = get(s, where, "radius", 1.0);
    p.speed = get(s, where, "speed", 0.0);
    p.phase = get(s, where, "phase", 0.0);
    p.centre_x = get(s, where, "centre_x", 0.0);
    p.centre_y = get(s, where, "centre_y", 0.0);
    require_positive(p.duration, where + ".duration");
    require_positive(p.radius, where + ".radius");
    if (!(std::abs(p.speed) < 1.0)) throw ConfigError(where + ".speed must satisfy |v| < 1");
  } else if (shape == "file") {
    p.shape = Shape::file;
    const auto f = s.get_optional<std::string>("file");
    if (!f) throw ConfigError(where + ".file is required for worldline = file");
    p.file = base / *f;
    if (!std::filesystem::exists(p.file)) throw ConfigError(where + ".file: no such file " + p.file.string());
  } else {
    throw ConfigError(where + ".worldline: expected straight, circular or file, got '" + shape + "'");
  }
  p.warp = get(s, where, "warp", 0.0);
  if (!(std::abs(p.warp) < 1.0)) throw ConfigError(where + ".warp must satisfy |warp| < 1");
  p.frozen = get(s, where, "frozen", false);
  return p;
}

}  // namespace

std::vector<double> parse_reals(const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

FourVector parse_four_vector(const std::string& text) {
  const auto v = parse_reals(text);
  if (v.size() != 4) throw ConfigError("expected four components, got '" + text + "'");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<double> Scenario::param_list(const std::string& key, std::vector<double> fallback) const {
  const auto text = params.get_optional<std::string>(key);
  if (!text) return fallback;
  try {
    return parse_reals(*text);
  } catch (const ConfigError& e) {
    throw ConfigError("params." + key + ": " + e.what());
  }
}

FourVector Scenario::param_vector(const std::string& key, const FourVector& fallback) const {
  const auto text = params.get_optional<std::string>(key);
  if (!text) return fallback;
  try {
    return parse_four_vector(*text);
  } catch (const ConfigError& e) {
    throw ConfigError("params." + key + ": " + e.what());
  }
}

Scenario parse_scenario(std::istream& is, const std::filesystem::path& base_dir, std::string name) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  for (const auto& [section, child] : tree) {
    if (section != "run" && section != "particle1" && section != "particle2" && section != "params")
      throw ConfigError("unknown section [" + section + "]");
    if (!child.data().empty()) throw ConfigError("key '" + section + "' outside any section");
  }
  const auto run = tree.get_child_optional("run");
  if (!run) throw ConfigError("missing [run] section");
  check_keys(*run, "run", run_keys);

  Scenario sc;
  sc.name = get<std::string>(*run, "run", "name", std::move(name));
  const auto exp = run->get_optional<std::string>("experiment");
  if (!exp) throw ConfigError("run.experiment is required");
  sc.experiment = *exp;
  const auto nodes = get<long long>(*run, "run", "nodes", 65);
  if (nodes < 3) throw ConfigError("run.nodes must be at least 3");
  sc.nodes = static_cast<std::size_t>(nodes);
  sc.seed = get<std::uint64_t>(*run, "run", "seed", 1);
  sc.hbar = get(*run, "run", "hbar", 1.0);
  sc.output = get<std::string>(*run, "run", "output", "out");
  sc.tol_grad = get(*run, "run", "tol_grad", 1e-8);
  sc.tol_shell = get(*run, "run", "tol_shell", 1e-8);
  sc.tol_root = get(*run, "run", "tol_root", 1e-12);
  sc.max_iterations = get(*run, "run", "max_iterations", 500);
  require_positive(sc.hbar, "run.hbar");
  require_positive(sc.tol_grad, "run.tol_grad");
  require_positive(sc.tol_shell, "run.tol_shell");
  require_positive(sc.tol_root, "run.tol_root");
  if (sc.max_iterations < 0) throw ConfigError("run.max_iterations must be non-negative");

  const pt::ptree empty;
  sc.particle1 = parse_particle(tree.get_child("particle1", empty), "particle1", base_dir);
  sc.particle2 = parse_particle(tree.get_child("particle2", empty), "particle2", base_dir);
  sc.params = tree.get_child("params", empty);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open scenario " + file.string());
  return parse_scenario(is, file.parent_path(), file.stem().string());
}

Worldline build_worldline(const ParticleSpec& p, std::size_t nodes) {
  if (p.shape == Shape::file) {
    std::ifstream is(p.file);
    if (!is) throw ConfigError("cannot open worldline table " + p.file.string());
    return read_worldline_table(is, p.mass, p.profile);
  }
  const double pi = std::numbers::pi;
  std::vector<FourVector> pts(nodes);
  std::vector<double> lapse(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    const double st = std::sin(pi * t);
    const double g = t + p.warp * st * st / pi;
    const double dg = 1.0 + p.warp * std::sin(2.0 * pi * t);
    if (p.shape == Shape::straight) {
      const FourVector d = p.end - p.start;
      const double len2 = dot(d, d);
      if (!(len2 > 0.0)) throw ConfigError("straight worldline must be timelike");
      pts[k] = p.start + g * d;
      lapse[k] = std::sqrt(len2) * dg / p.mass;
    } else {
      const double T = p.duration;
      const double a = p.phase + p.speed / p.radius * T * g;
      pts[k] = {p.t0 + T * g, p.centre_x + p.radius * std::cos(a), p.centre_y + p.radius * std::sin(a), 0.0};
      lapse[k] = T * dg * std::sqrt(1.0 - p.speed * p.speed) / p.mass;
    }
  }
  return Worldline(std::move(pts), std::move(lapse), p.mass, p.profile);
}

}  // namespace fokker
