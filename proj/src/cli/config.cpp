#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qphonon/cli.hpp"

namespace qphonon::cli {

namespace {

using nlohmann::json;

// Tracks which keys of one JSON object were consumed; finish() rejects the rest.
class Fields {
 public:
  Fields(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return object_.contains(key); }

  const json& get(const std::string& key) {
    if (!object_.contains(key)) throw ConfigError(at(key), "required field missing");
    seen_.insert(key);
    return object_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(at(key), "must be > 0");
    return d;
  }

  double positive_or(const std::string& key, double fallback) { return has(key) ? positive(key) : fallback; }

  long long integer(const std::string& key) { return integer_value(get(key), at(key)); }

  int integer_at_least(const std::string& key, long long minimum) {
    const long long v = integer(key);
    if (v < minimum) throw ConfigError(at(key), "must be >= " + std::to_string(minimum));
    if (v > std::numeric_limits<int>::max()) throw ConfigError(at(key), "too large");
    return static_cast<int>(v);
  }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(at(item.key()), "unknown field");
    }
  }

  static long long integer_value(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<long long>();
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

Complex parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  Fields f(v, path);
  const Complex z{f.number("re"), f.number_or("im", 0.0)};
  f.finish();
  return z;
}

TimeGridConfig parse_time(const json& v, const std::string& path) {
  Fields f(v, path);
  TimeGridConfig t;
  t.t_end = f.positive("t_end");
  t.samples = static_cast<std::size_t>(f.integer_at_least("samples", 2));
  f.finish();
  return t;
}

PulseProfile parse_pulse(const json& v, const std::string& path) {
  Fields f(v, path);
  const std::string type = f.string("type");
  const Complex amplitude = parse_complex(f.get("amplitude"), f.at("amplitude"));
  PulseProfile pulse;
  if (type == "constant") {
    pulse = PulseProfile::constant(amplitude);
  } else if (type == "monochromatic") {
    pulse = PulseProfile::monochromatic(amplitude, f.number("omega_f"));
  } else if (type == "gaussian") {
    const double omega_f = f.number("omega_f");
    const double center = f.number("center");
    const double width = f.positive("width");
    pulse = PulseProfile::gaussian(amplitude, omega_f, center, width);
  } else {
    throw ConfigError(f.at("type"), "expected one of constant, monochromatic, gaussian");
  }
  f.finish();
  return pulse;
}

std::vector<int> parse_sizes(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    const long long n = Fields::integer_value(v[i], item);
    if (n < 1) throw ConfigError(item, "must be >= 1");
    if (n > 5000) throw ConfigError(item, "must be <= 5000");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

std::vector<std::pair<int, int>> parse_pairs(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of [N, Delta] pairs");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(item, "expected [N, Delta]");
    const auto sizes = parse_sizes(v[i], item);
    out.emplace_back(sizes[0], sizes[1]);
  }
  return out;
}

EvolveConfig parse_evolve(const json& v, const std::string& path) {
  Fields f(v, path);
  EvolveConfig c;
  c.n_total = f.integer_at_least("n_total", 1);
  c.omega_e = f.number("omega_e");
  c.pulse = parse_pulse(f.get("pulse"), f.at("pulse"));
  c.time = parse_time(f.get("time"), f.at("time"));
  c.max_step = f.positive_or("max_step", c.max_step);
  c.quadrature_step = f.positive_or("quadrature_step", c.quadrature_step);
  f.finish();
  return c;
}

SweepConfig parse_sweep(const json& v, const std::string& path) {
  Fields f(v, path);
  SweepConfig c;
  c.n_values = parse_sizes(f.get("n_values"), f.at("n_values"));
  std::sort(c.n_values.begin(), c.n_values.end());
  if (std::adjacent_find(c.n_values.begin(), c.n_values.end()) != c.n_values.end()) {
    throw ConfigError(f.at("n_values"), "entries must be distinct");
  }
  c.omega_e = f.number("omega_e");
  c.pulse = parse_pulse(f.get("pulse"), f.at("pulse"));
  c.time = parse_time(f.get("time"), f.at("time"));
  c.max_step = f.positive_or("max_step", c.max_step);
  c.quadrature_step = f.positive_or("quadrature_step", c.quadrature_step);
  f.finish();
  return c;
}

AlgebraCheckConfig parse_algebra_check(const json& v, const std::string& path) {
  Fields f(v, path);
  AlgebraCheckConfig c;
  c.n_values = parse_sizes(f.get("n_values"), f.at("n_values"));
  if (f.has("dressed_pairs")) c.dressed_pairs = parse_pairs(f.get("dressed_pairs"), f.at("dressed_pairs"));
  if (f.has("random_pairs")) c.random_pairs = f.integer_at_least("random_pairs", 0);
  if (f.has("random_max")) c.random_max = f.integer_at_least("random_max", 1);
  f.finish();
  return c;
}

DressedCheckConfig parse_dressed_check(const json& v, const std::string& path) {
  Fields f(v, path);
  DressedCheckConfig c;
  c.pairs = parse_pairs(f.get("pairs"), f.at("pairs"));
  if (c.pairs.empty()) throw ConfigError(f.at("pairs"), "expected at least one pair");
  if (f.has("random_pairs")) c.random_pairs = f.integer_at_least("random_pairs", 0);
  if (f.has("random_max")) c.random_max = f.integer_at_least("random_max", 1);
  if (f.has("evolution")) {
    Fields e(f.get("evolution"), f.at("evolution"));
    DressedEvolution d;
    d.mu_d = e.number("mu_d");
    d.omega_e = e.number("omega_e");
    d.omega_g = e.number_or("omega_g", 0.0);
    d.omega_0 = e.number_or("omega_0", 0.0);
    d.time = parse_time(e.get("time"), e.at("time"));
    d.max_step = e.positive_or("max_step", d.max_step);
    e.finish();
    c.evolution = d;
  }
  f.finish();
  return c;
}

RabiConfig parse_rabi(const json& v, const std::string& path) {
  Fields f(v, path);
  RabiConfig c;
  c.n_total = f.integer_at_least("n_total", 1);
  c.g = f.number("g");
  c.omega_e = f.number("omega_e");
  c.omega_f = f.number("omega_f");
  c.time = parse_time(f.get("time"), f.at("time"));
  c.max_step = f.positive_or("max_step", c.max_step);
  f.finish();
  return c;
}

}  // namespace

std::vector<double> TimeGridConfig::grid() const {
  std::vector<double> g(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    g[k] = t_end * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  return g;
}

RunConfig parse_config(const nlohmann::json& document) {
  Fields top(document, "");
  const long long version = top.integer("schema_version");
  if (version != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
  }
  RunConfig config;
  config.command = top.string("command");
  if (top.has("seed")) {
    const long long seed = top.integer("seed");
    if (seed < 0) throw ConfigError("seed", "must be >= 0");
    config.seed = static_cast<std::uint64_t>(seed);
  }
  if (top.has("output_dir")) config.output_dir = top.string("output_dir");

  const std::string& cmd = config.command;
  if (cmd == "algebra-check") {
    config.params = parse_algebra_check(top.get(cmd), cmd);
  } else if (cmd == "evolve") {
    config.params = parse_evolve(top.get(cmd), cmd);
  } else if (cmd == "sweep") {
    config.params = parse_sweep(top.get(cmd), cmd);
  } else if (cmd == "dressed-check") {
    config.params = parse_dressed_check(top.get(cmd), cmd);
  } else if (cmd == "rabi") {
    config.params = parse_rabi(top.get(cmd), cmd);
  } else {
    throw ConfigError("command", "unknown command '" + cmd + "'");
  }
  top.finish();
  return config;
}

}  // namespace qphonon::cli
