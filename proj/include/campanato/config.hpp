#pragma once

#include <map>
#include <string>
#include <vector>

#include "campanato/dirichlet.hpp"
#include "campanato/grid.hpp"
#include "campanato/norms.hpp"
#include "campanato/operator_engine.hpp"
#include "campanato/potentials.hpp"

namespace campanato {

/// Flat "key = value" configuration with dotted section prefixes and '#'
/// comments. No positional structure beyond the keys themselves.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Object builders shared by the CLI subcommands. All throw
// std::invalid_argument on malformed configuration.
GridDomain domain_from_config(const Config& cfg);
PotentialSpec potential_from_config(const Config& cfg);
OperatorSpec operator_from_config(const Config& cfg, const GridDomain& domain);
NormParams norm_params_from_config(const Config& cfg, const GridDomain& domain);
BallFamily family_from_config(const Config& cfg, const GridDomain& domain);
HeightGrid heights_from_config(const Config& cfg, const GridDomain& domain);

}  // namespace campanato
