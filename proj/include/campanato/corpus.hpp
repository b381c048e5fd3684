#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "campanato/grid.hpp"

namespace campanato {

struct NamedFunction {
  std::string name;
  GridFunction f;
};

/// Deterministic test-function corpus. The spec string is a comma list of
/// generator:count entries, e.g. "constants:2,modes:3,random_trig:5".
/// Generators: constants, modes, random_trig, bumps, indicators,
/// morrey_singular (the regularized |x - x0|^{-(n-lambda)/p} family).
struct CorpusSpec {
  std::vector<std::pair<std::string, int>> generators;
  std::uint64_t seed = 1;
  double p = 2.0;       // exponents for the morrey_singular family
  double lambda = 0.5;
};

CorpusSpec parse_corpus_spec(const std::string& spec, std::uint64_t seed, double p, double lambda);

std::vector<NamedFunction> generate_corpus(const CorpusSpec& spec, const GridDomain& domain);

}  // namespace campanato
