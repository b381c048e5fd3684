#include "campanato/corpus.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace campanato {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (char c : name) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

CorpusSpec parse_corpus_spec(const std::string& spec, std::uint64_t seed, double p, double lambda) {
  CorpusSpec out;
  out.seed = seed;
  out.p = p;
  out.lambda = lambda;
  std::istringstream is(spec);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    std::string name = colon == std::string::npos ? item : item.substr(0, colon);
    int count = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
    if (count < 1) throw std::invalid_argument("corpus generator count must be positive");
    out.generators.emplace_back(name, count);
  }
  if (out.generators.empty()) throw std::invalid_argument("empty corpus spec");
  return out;
}

std::vector<NamedFunction> generate_corpus(const CorpusSpec& spec, const GridDomain& domain) {
  if (spec.generators.empty()) throw std::invalid_argument("empty corpus spec");
  std::vector<NamedFunction> corpus;
  const double R = domain.half_width;
  const int dim = domain.dim;

  for (const auto& [name, count] : spec.generators) {
    std::mt19937_64 rng(mix_seed(spec.seed, name));
    if (name == "constants") {
      const double values[] = {1.0, -2.0, 0.5, 3.0, -0.25};
      for (int i = 0; i < count; ++i) {
        double c = values[i % 5] * (1 + i / 5);
        corpus.push_back({"const_" + std::to_string(i),
                          sample(domain, [c](const std::array<double, 3>&) { return c; })});
      }
    } else if (name == "modes") {
      for (int i = 0; i < count; ++i) {
        double xi = kPi * double(i + 1) / R;
        corpus.push_back({"mode_" + std::to_string(i + 1),
                          sample(domain, [xi](const std::array<double, 3>& x) {
                            return std::cos(xi * x[0]);
                          })});
      }
    } else if (name == "random_trig") {
      std::normal_distribution<double> amp(0.0, 1.0);
      std::uniform_int_distribution<int> freq(-4, 4);
      for (int i = 0; i < count; ++i) {
        struct Term {
          double a, phase;
          std::array<int, 3> k;
        };
        std::vector<Term> terms;
        for (int tix = 0; tix < 6; ++tix) {
          Term t;
          t.a = amp(rng);
          t.phase = kPi * amp(rng);
          t.k = {0, 0, 0};
          bool nonzero = false;
          for (int a = 0; a < dim; ++a) {
            t.k[a] = freq(rng);
            nonzero = nonzero || t.k[a] != 0;
          }
          if (!nonzero) t.k[0] = 1;
          terms.push_back(t);
        }
        corpus.push_back({"trig_" + std::to_string(i),
                          sample(domain, [terms, R, dim](const std::array<double, 3>& x) {
                            double v = 0.0;
                            for (const auto& t : terms) {
                              double arg = t.phase;
                              for (int a = 0; a < dim; ++a) arg += kPi * t.k[a] * x[a] / R;
                              v += t.a * std::cos(arg);
                            }
                            return v;
                          })});
      }
    } else if (name == "bumps") {
      std::uniform_real_distribution<double> pos(-0.5 * R, 0.5 * R);
      for (int i = 0; i < count; ++i) {
        std::array<double, 3> c{0, 0, 0};
        for (int a = 0; a < dim; ++a) c[a] = pos(rng);
        double w = R / 4.0;
        corpus.push_back({"bump_" + std::to_string(i),
                          sample(domain, [c, w, dim](const std::array<double, 3>& x) {
                            double r2 = 0.0;
                            for (int a = 0; a < dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
                            return std::exp(-r2 / (w * w));
                          })});
      }
    } else if (name == "indicators") {
      for (int i = 0; i < count; ++i) {
        double lo = -R / 3.0 + 0.15 * R * i;
        double hi = R / 3.0 + 0.1 * R * i;
        corpus.push_back({"indicator_" + std::to_string(i),
                          sample(domain, [lo, hi, dim](const std::array<double, 3>& x) {
                            for (int a = 0; a < dim; ++a)
                              if (x[a] < lo || x[a] > hi) return 0.0;
                            return 1.0;
                          })});
      }
    } else if (name == "morrey_singular") {
      // |x - x0|^{-(n - lambda)/p} regularized at the singular node.
      const double gamma = (double(dim) - spec.lambda) / spec.p;
      const double placements[] = {0.0, 3.0 * R / 8.0, -R / 4.0};
      for (int i = 0; i < count; ++i) {
        std::array<double, 3> c{0, 0, 0};
        c[0] = domain.coord(domain.snap_index(placements[i % 3]));
        corpus.push_back(
            {"singular_" + std::to_string(i),
             sample_regularized(domain, [c, gamma, dim](const std::array<double, 3>& x) {
               double r2 = 0.0;
               for (int a = 0; a < dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
               return std::pow(std::sqrt(r2), -gamma);
             })});
      }
    } else {
      throw std::invalid_argument("unknown corpus generator: " + name);
    }
  }
  return corpus;
}

}  // namespace campanato
