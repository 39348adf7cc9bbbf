#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rcsc/connect.hpp"
#include "rcsc/functional.hpp"
#include "rcsc/normapprox.hpp"
#include "rcsc/space.hpp"

namespace rcsc {

/// Invalid or incomplete run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { Sample, Moments, Gamma, Clt, Render };

inline std::string task_name(Task t) {
  switch (t) {
    case Task::Sample: return "sample";
    case Task::Moments: return "moments";
    case Task::Gamma: return "gamma";
    case Task::Clt: return "clt";
    case Task::Render: return "render";
  }
  return "unknown";
}

inline Task parse_task(const std::string& s) {
  if (s == "sample") return Task::Sample;
  if (s == "moments") return Task::Moments;
  if (s == "gamma") return Task::Gamma;
  if (s == "clt") return Task::Clt;
  if (s == "render") return Task::Render;
  throw ConfigError("unknown task '" + s + "'");
}

struct SystemSpec {
  std::string name;
  int alpha = 1;
  std::vector<double> p;  // constant
  double r = 0.0;         // rips, cech, hyperbolic_geometric
  double q = 1.0;         // hyperbolic systems: φ_2
  StationaryProfile profile;
};

struct RunConfig {
  std::string text;  // verbatim file contents
  Task task = Task::Moments;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "out";

  Space space = EuclideanBox{{{0.0, 1.0}, {0.0, 1.0}}};
  SystemSpec system;
  double beta = 1.0;
  CoefficientVector a;

  std::size_t moment_replicates = 0;
  IntegrationOptions integration;

  std::size_t gamma_outer = 1000;
  std::size_t gamma_inner = 200;
  std::size_t fourth_moment_replicates = 10000;

  Regime regime = Regime::IncreasingIntensity;
  std::vector<double> ladder;
  std::size_t clt_replicates = 1000;
  StandardizationMode standardization = StandardizationMode::ClosedForm;
  std::size_t clt_gamma_outer = 0;

  Window window() const { return Window{space}; }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"run", {"task", "seed", "threads", "out"}},
      {"space", {"kind", "bounds", "radius", "density", "marks", "mark_values", "mark_weights"}},
      {"system", {"name", "alpha", "p", "r", "q", "kernel", "radius", "coupling", "higher_order"}},
      {"model", {"beta", "a"}},
      {"moments", {"replicates", "min_samples", "max_samples", "tolerance"}},
      {"gamma", {"outer", "inner", "fourth_moment_replicates"}},
      {"clt", {"regime", "ladder", "replicates", "standardization", "gamma_outer"}},
  };
  return schema;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + tok + "' is not a number");
    }
  }
  return out;
}

template <typename T>
T get_number(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
  const auto v = pt.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto list = parse_list(key, *v);
  if (list.size() != 1) throw ConfigError("key '" + key + "' needs exactly one number");
  if constexpr (std::is_integral_v<T>) {
    if (list[0] < 0 || list[0] != static_cast<double>(static_cast<std::uint64_t>(list[0])))
      throw ConfigError("key '" + key + "' must be a nonnegative integer");
    return static_cast<T>(list[0]);
  } else {
    return static_cast<T>(list[0]);
  }
}

inline std::string get_string(const boost::property_tree::ptree& pt, const std::string& key, const std::string& fallback) {
  return pt.get<std::string>(key, fallback);
}

inline std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t used = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("seed '" + s + "' is not an unsigned 64-bit integer");
  }
}

/// "0 1, 0 2" -> [0,1] × [0,2].
inline std::vector<Interval> parse_bounds(const std::string& s) {
  std::vector<Interval> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto v = parse_list("space.bounds", part);
    if (v.size() != 2) throw ConfigError("space.bounds: each interval needs 'lo hi'");
    out.push_back({v[0], v[1]});
  }
  return out;
}

inline MarkDistribution parse_marks(const boost::property_tree::ptree& pt) {
  const auto kind = get_string(pt, "space.marks", "single");
  if (kind == "single") return MarkDistribution::single();
  if (kind == "uniform") return MarkDistribution::uniform();
  if (kind == "discrete") {
    auto values = parse_list("space.mark_values", get_string(pt, "space.mark_values", ""));
    auto weights = parse_list("space.mark_weights", get_string(pt, "space.mark_weights", ""));
    try {
      return MarkDistribution::discrete(std::move(values), std::move(weights));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("space marks: ") + e.what());
    }
  }
  throw ConfigError("unknown mark distribution '" + kind + "'");
}

inline Space parse_space(const boost::property_tree::ptree& pt) {
  const auto kind = get_string(pt, "space.kind", "box");
  if (kind == "disk") {
    HyperbolicDisk d;
    d.radius = get_number<double>(pt, "space.radius", 1.0);
    const auto density = get_string(pt, "space.density", "cosh");
    if (density == "cosh") d.density = RadialDensity::Cosh;
    else if (density == "sinh") d.density = RadialDensity::Sinh;
    else throw ConfigError("unknown radial density '" + density + "'");
    return d;
  }
  const auto bounds = parse_bounds(get_string(pt, "space.bounds", "0 1, 0 1"));
  if (kind == "box") return EuclideanBox{bounds};
  if (kind == "stationary") return MarkedStationary{bounds, parse_marks(pt)};
  throw ConfigError("unknown space kind '" + kind + "'");
}

inline SystemSpec parse_system(const boost::property_tree::ptree& pt) {
  SystemSpec s;
  s.name = get_string(pt, "system.name", "");
  if (s.name.empty()) throw ConfigError("system.name is required");
  s.alpha = get_number<int>(pt, "system.alpha", 1);
  s.p = parse_list("system.p", get_string(pt, "system.p", ""));
  s.r = get_number<double>(pt, "system.r", 0.0);
  s.q = get_number<double>(pt, "system.q", 1.0);
  const auto kernel = get_string(pt, "system.kernel", "indicator");
  if (kernel == "indicator") s.profile.kernel = StationaryProfile::Kernel::Indicator;
  else if (kernel == "gaussian") s.profile.kernel = StationaryProfile::Kernel::Gaussian;
  else throw ConfigError("unknown kernel '" + kernel + "'");
  s.profile.radius = get_number<double>(pt, "system.radius", 0.1);
  s.profile.coupling = get_number<double>(pt, "system.coupling", 0.0);
  s.profile.higher_order = parse_list("system.higher_order", get_string(pt, "system.higher_order", ""));
  return s;
}

}  // namespace detail

/// Connection system named by the spec, built for `window`.
inline ConnectionSystem make_system(const SystemSpec& s, const Window& window) {
  try {
    if (s.name == "constant") return constant_system(s.alpha, s.p);
    if (s.name == "rips") return rips_system(s.alpha, s.r, window);
    if (s.name == "cech") {
      if (window.is_hyperbolic()) throw ConfigError("cech system needs a Euclidean space");
      return cech_system(s.alpha, s.r, window);
    }
    if (s.name == "hyperbolic_geometric" || s.name == "hyperbolic_line") {
      if (!window.is_hyperbolic()) throw ConfigError(s.name + " needs space.kind = disk");
      if (s.alpha != 2) throw ConfigError(s.name + " has alpha = 2");
      return s.name == "hyperbolic_geometric" ? hyperbolic_geometric_system(s.r, s.q) : hyperbolic_line_system(s.q);
    }
    if (s.name == "stationary") return stationary_marked_system(s.alpha, s.profile, window);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("system '" + s.name + "': " + e.what());
  }
  throw ConfigError("unknown system '" + s.name + "'");
}

/// Command-line values that take precedence over the [run] section.
struct Overrides {
  std::optional<std::string> task;
  std::optional<std::string> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

/// Parses and validates a run configuration. Every check that can fail does
/// so here, before any computation.
inline RunConfig parse_config(const std::string& text, const Overrides& over = {}) {
  boost::property_tree::ptree pt;
  try {
    std::istringstream in(text);
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const auto& schema = detail::config_schema();
  for (const auto& [section, body] : pt) {
    const auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }

  RunConfig c;
  c.text = text;
  c.task = parse_task(over.task ? *over.task : detail::get_string(pt, "run.task", "moments"));
  c.seed = detail::parse_seed(over.seed ? *over.seed : detail::get_string(pt, "run.seed", "1"));
  c.threads = over.threads ? *over.threads : detail::get_number<int>(pt, "run.threads", 1);
  c.out = over.out ? *over.out : detail::get_string(pt, "run.out", "out");

  try {
    c.space = detail::parse_space(pt);
    (void)Window{c.space};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("space: ") + e.what());
  }
  c.system = detail::parse_system(pt);
  const Window window{c.space};
  const auto system = make_system(c.system, window);

  c.beta = detail::get_number<double>(pt, "model.beta", 1.0);
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) throw ConfigError("model.beta must be positive");
  if (const auto a = pt.get_optional<std::string>("model.a")) {
    c.a.a = detail::parse_list("model.a", *a);
  } else {
    c.a = CoefficientVector::euler(system.alpha());
  }
  if (c.a.alpha() != system.alpha()) throw ConfigError("model.a needs alpha+1 coefficients");

  c.moment_replicates = detail::get_number<std::size_t>(pt, "moments.replicates", 0);
  c.integration.min_samples = detail::get_number<std::size_t>(pt, "moments.min_samples", c.integration.min_samples);
  c.integration.max_samples = detail::get_number<std::size_t>(pt, "moments.max_samples", c.integration.max_samples);
  c.integration.relative_tolerance = detail::get_number<double>(pt, "moments.tolerance", c.integration.relative_tolerance);
  if (c.integration.min_samples < 1000) throw ConfigError("moments.min_samples must be at least 1000");
  if (c.integration.max_samples < c.integration.min_samples) throw ConfigError("moments.max_samples below min_samples");
  if (!(c.integration.relative_tolerance > 0.0)) throw ConfigError("moments.tolerance must be positive");
  c.integration.seed = c.seed;
  c.integration.threads = c.threads;
  if (c.moment_replicates == 1) throw ConfigError("moments.replicates must be 0 or at least 2");

  c.gamma_outer = detail::get_number<std::size_t>(pt, "gamma.outer", c.gamma_outer);
  c.gamma_inner = detail::get_number<std::size_t>(pt, "gamma.inner", c.gamma_inner);
  c.fourth_moment_replicates = detail::get_number<std::size_t>(pt, "gamma.fourth_moment_replicates", c.fourth_moment_replicates);
  if (c.gamma_inner < 100) throw ConfigError("gamma.inner must be at least 100");
  if (c.gamma_outer < 2) throw ConfigError("gamma.outer must be at least 2");

  const auto regime = detail::get_string(pt, "clt.regime", "increasing_intensity");
  if (regime == "increasing_intensity") c.regime = Regime::IncreasingIntensity;
  else if (regime == "increasing_window") c.regime = Regime::IncreasingWindow;
  else if (regime == "multivariate_stationary") c.regime = Regime::MultivariateStationary;
  else throw ConfigError("unknown regime '" + regime + "'");
  c.ladder = detail::parse_list("clt.ladder", detail::get_string(pt, "clt.ladder", ""));
  c.clt_replicates = detail::get_number<std::size_t>(pt, "clt.replicates", c.clt_replicates);
  const auto st = detail::get_string(pt, "clt.standardization",
                                     c.regime == Regime::IncreasingIntensity ? "closed_form" : "empirical");
  if (st == "closed_form") c.standardization = StandardizationMode::ClosedForm;
  else if (st == "empirical") c.standardization = StandardizationMode::Empirical;
  else throw ConfigError("unknown standardization '" + st + "'");
  c.clt_gamma_outer = detail::get_number<std::size_t>(pt, "clt.gamma_outer", 0);
  if (c.task == Task::Clt) {
    if (c.ladder.empty()) throw ConfigError("clt.ladder is required for task clt");
    for (std::size_t i = 0; i < c.ladder.size(); ++i)
      if (!(c.ladder[i] > 0.0) || (i > 0 && !(c.ladder[i] > c.ladder[i - 1])))
        throw ConfigError("clt.ladder must be positive and strictly increasing");
    if (c.clt_replicates < 1000) throw ConfigError("clt.replicates must be at least 1000");
    if (c.regime != Regime::IncreasingIntensity && window.is_hyperbolic())
      throw ConfigError("window ladders need a Euclidean space");
    if (c.clt_gamma_outer == 1) throw ConfigError("clt.gamma_outer must be 0 or at least 2");
  }
  if (c.task == Task::Render && !window.is_hyperbolic()) throw ConfigError("task render needs space.kind = disk");
  if (c.threads < 0) throw ConfigError("run.threads must be nonnegative");
  return c;
}

inline RunConfig load_config(const std::string& path, const Overrides& over = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), over);
}

}  // namespace rcsc
