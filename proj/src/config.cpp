#include "campanato/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace campanato {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_string(os.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("missing config key: " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: " + s);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  double v = get_double(key);
  int i = int(std::lround(v));
  if (double(i) != v) throw std::invalid_argument("config key " + key + ": not an integer");
  return i;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::string s = get_string(key);
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("config key " + key + ": empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

GridDomain domain_from_config(const Config& cfg) {
  return GridDomain(cfg.get_int("domain.dim"), cfg.get_double("domain.half_width"),
                    cfg.get_int("domain.points_per_axis"),
                    boundary_from_string(cfg.get_string("domain.boundary")));
}

PotentialSpec potential_from_config(const Config& cfg) {
  PotentialSpec spec;
  const std::string kind = cfg.get_string("potential.kind");
  if (kind == "constant") {
    spec.kind = PotentialSpec::Kind::Constant;
    spec.constant_value = cfg.get_double("potential.value", 1.0);
  } else if (kind == "power_law") {
    spec.kind = PotentialSpec::Kind::PowerLaw;
    spec.exponent = cfg.get_double("potential.exponent", 2.0);
  } else if (kind == "bump") {
    spec.kind = PotentialSpec::Kind::Bump;
    spec.width = cfg.get_double("potential.width", 0.5);
    spec.amplitude = cfg.get_double("potential.amplitude", 1.0);
  } else if (kind == "half_space") {
    spec.kind = PotentialSpec::Kind::HalfSpaceIndicator;
    spec.offset = cfg.get_double("potential.offset", 0.0);
  } else {
    throw std::invalid_argument("unknown potential.kind: " + kind);
  }
  return spec;
}

OperatorSpec operator_from_config(const Config& cfg, const GridDomain& domain) {
  OperatorSpec spec;
  const std::string kind = cfg.get_string("operator.kind", "laplacian");
  if (kind == "laplacian") {
    spec.kind = OperatorKind::Laplacian;
  } else if (kind == "schrodinger") {
    spec.kind = OperatorKind::Schrodinger;
    spec.potential = make_potential(potential_from_config(cfg), domain);
  } else {
    throw std::invalid_argument("unknown operator.kind: " + kind);
  }
  spec.order_m = cfg.get_double("operator.m", 2.0);
  if (cfg.has("operator.epsilon_list")) spec.epsilon_list = cfg.get_double_list("operator.epsilon_list");
  if (cfg.has("operator.theta_policy")) spec.theta_policy = cfg.get_double_list("operator.theta_policy");
  return spec;
}

NormParams norm_params_from_config(const Config& cfg, const GridDomain& domain) {
  NormParams params;
  params.p = cfg.get_double("norms.p", 2.0);
  params.lambda = cfg.get_double("norms.lambda", 0.5);
  params.m = cfg.get_double("operator.m", 2.0);
  validate_norm_params(params, domain.dim);
  return params;
}

BallFamily family_from_config(const Config& cfg, const GridDomain& domain) {
  if (!cfg.has("family.stride")) return BallFamily::make_default(domain);
  int stride = cfg.get_int("family.stride");
  double ratio = cfg.get_double("family.ratio", 1.0 / std::sqrt(2.0));
  int count = cfg.get_int("family.radius_count");
  return BallFamily::make(domain, stride, ratio, count);
}

HeightGrid heights_from_config(const Config& cfg, const GridDomain& domain) {
  double h = domain.spacing();
  double t_min = cfg.get_double("heights.t_min", 2.0 * h);
  double t_max = cfg.get_double("heights.t_max", 0.5 * domain.half_width);
  int count = cfg.get_int("heights.count", 64);
  return HeightGrid(domain, t_min, t_max, count);
}

}  // namespace campanato
