#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "fokker/errors.hpp"
#include "fokker/worldline.hpp"

namespace fokker {

enum class Shape { straight, circular, file };

/// One [particleN] section.
struct ParticleSpec {
  double mass = 1.0;
  SwitchingProfile profile;
  Shape shape = Shape::straight;
  // straight
  FourVector start, end{1.0, 0.0, 0.0, 0.0};
  // circular: x = (t0 + T tau, cx + r cos(phase + w T tau), cy + r sin(...), 0), w = v / r
  double t0 = 0.0, duration = 1.0, radius = 1.0, speed = 0.0, phase = 0.0;
  double centre_x = 0.0, centre_y = 0.0;
  // Both analytic shapes are sampled at g(tau) = tau + warp sin^2(pi tau) / pi.
  double warp = 0.0;
  std::filesystem::path file;
  bool frozen = false;
};

/// Parsed scenario file. Unknown keys in [run] and [particleN] are config
/// errors; [params] is free-form and read by the experiment.
struct Scenario {
  std::string name;
  std::string experiment;
  std::size_t nodes = 65;
  std::uint64_t seed = 1;
  double hbar = 1.0;
  std::filesystem::path output = "out";
  double tol_grad = 1e-8;
  double tol_shell = 1e-8;
  double tol_root = 1e-12;
  int max_iterations = 500;
  ParticleSpec particle1, particle2;
  boost::property_tree::ptree params;

  template <class T>
  T param(const std::string& key, const T& fallback) const {
    const auto text = params.get_optional<std::string>(key);
    if (!text) return fallback;
    const auto v = boost::property_tree::ptree(*text).get_value_optional<T>();
    if (!v) throw ConfigError("params." + key + ": cannot parse '" + *text + "'");
    return *v;
  }
  std::vector<double> param_list(const std::string& key, std::vector<double> fallback) const;
  FourVector param_vector(const std::string& key, const FourVector& fallback) const;
};

/// Throws ConfigError with the offending key on any problem.
Scenario load_scenario(const std::filesystem::path& file);
Scenario parse_scenario(std::istream& is, const std::filesystem::path& base_dir, std::string name);

Worldline build_worldline(const ParticleSpec& p, std::size_t nodes);

/// "a b c d" -> {a, b, c, d}; ConfigError unless exactly four reals.
FourVector parse_four_vector(const std::string& text);
std::vector<double> parse_reals(const std::string& text);

}  // namespace fokker
