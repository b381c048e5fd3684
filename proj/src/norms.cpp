#include "campanato/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace campanato {

void validate_norm_params(const NormParams& params, int dim) {
  if (!(params.p >= 1.0)) throw std::invalid_argument("NormParams: p must be >= 1");
  if (!(params.lambda > 0.0 && params.lambda < double(dim) * (1.0 - 1e-12)))
    throw std::invalid_argument(
        "NormParams: lambda must lie in (0, n); the endpoint regimes are out of range");
  if (!(params.m > 0.0)) throw std::invalid_argument("NormParams: m must be positive");
}

namespace {

// Shared sup-over-family scan. integrand(ball) returns the raw supremand
// r^{-lambda} * integral for that ball. Centers are scanned in parallel
// into per-center slots, then reduced serially, so Serial and Parallel
// agree bitwise.
template <class Integrand>
NormValue scan_family(const BallFamily& family, double p, const Integrand& integrand, Exec exec) {
  NormValue out;
  const auto& centers = family.centers();
  const auto& radii = family.radii();
  std::vector<double> values(centers.size());

  for (std::size_t rj = 0; rj < radii.size(); ++rj) {
    const std::int64_t nc = std::int64_t(centers.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t ci = 0; ci < nc; ++ci)
      values[std::size_t(ci)] = integrand(family.ball(std::size_t(ci), rj), rj);

    double radius_max = 0.0;
    std::size_t radius_arg = 0;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (values[ci] > radius_max) {
        radius_max = values[ci];
        radius_arg = ci;
      }
    }
    out.profile.push_back({radii[rj], radius_max});
    if (radius_max > out.raw_max) {
      out.raw_max = radius_max;
      out.argmax_ball = family.ball(radius_arg, rj);
    }
  }
  out.value = std::pow(out.raw_max, 1.0 / p);
  return out;
}

}  // namespace

NormValue morrey_norm(const GridFunction& f, const NormParams& params, const BallFamily& family,
                      Exec exec) {
  validate_norm_params(params, f.domain().dim);
  if (!(f.domain() == family.domain())) throw std::invalid_argument("morrey_norm: domain mismatch");
  return scan_family(
      family, params.p,
      [&](const Ball& b, std::size_t) {
        return std::pow(b.radius, -params.lambda) * ball_lp_integral(f, b, params.p);
      },
      exec);
}

NormValue campanato_classical(const GridFunction& f, const NormParams& params,
                              const BallFamily& family, Exec exec) {
  validate_norm_params(params, f.domain().dim);
  if (!(f.domain() == family.domain()))
    throw std::invalid_argument("campanato_classical: domain mismatch");
  const double measure = f.domain().cell_measure();
  return scan_family(
      family, params.p,
      [&](const Ball& b, std::size_t) {
        const double mean = ball_mean(f, b);
        double sum = 0.0;
        for_each_ball_node(f.domain(), b, [&](std::size_t i) { sum += pow_abs(f[i] - mean, params.p); });
        return std::pow(b.radius, -params.lambda) * measure * sum;
      },
      exec);
}

NormValue campanato_operator(const GridFunction& f, const OperatorEngine& engine,
                             const NormParams& params, const BallFamily& family, Exec exec) {
  validate_norm_params(params, f.domain().dim);
  if (!(f.domain() == engine.domain()))
    throw std::invalid_argument("campanato_operator: function and engine domains differ");
  if (!(f.domain() == family.domain()))
    throw std::invalid_argument("campanato_operator: family domain mismatch");
  if (params.m != engine.spec().order_m)
    throw std::invalid_argument("campanato_operator: params.m must equal the engine's order_m");

  // One semigroup apply per radius, shared across all centers.
  const auto& radii = family.radii();
  std::vector<GridFunction> osc;
  osc.reserve(radii.size());
  for (double r : radii) osc.push_back(f - engine.semigroup_apply(engine.time_for_radius(r), f));

  const double measure = f.domain().cell_measure();
  return scan_family(
      family, params.p,
      [&](const Ball& b, std::size_t rj) {
        const GridFunction& g = osc[rj];
        double sum = 0.0;
        for_each_ball_node(f.domain(), b, [&](std::size_t i) { sum += pow_abs(g[i], params.p); });
        return std::pow(b.radius, -params.lambda) * measure * sum;
      },
      exec);
}

void append_norm_report(ReportWriter& rep, const std::string& section_name,
                        const std::string& norm_kind, const NormValue& value,
                        const NormParams& params, int dim) {
  rep.section(section_name);
  rep.kv("norm", norm_kind);
  rep.kv("value", value.value);
  rep.kv("p", params.p);
  rep.kv("lambda", params.lambda);
  std::string center;
  for (int a = 0; a < dim; ++a)
    center += (a ? " " : "") + format_double(value.argmax_ball.center[std::size_t(a)]);
  rep.kv("argmax_center", center);
  rep.kv("argmax_radius", value.argmax_ball.radius);
  for (std::size_t j = 0; j < value.profile.size(); ++j)
    rep.kv("profile_" + std::to_string(j),
           format_double(value.profile[j].radius) + " " + format_double(value.profile[j].value));
}

double mtype_norm(const GridFunction& f, double p, double beta) {
  if (!(p >= 1.0)) throw std::invalid_argument("mtype_norm: p must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("mtype_norm: beta must be positive");
  const GridDomain& d = f.domain();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto x = d.point(i);
    double r2 = 0.0;
    for (int a = 0; a < d.dim; ++a) r2 += x[a] * x[a];
    double w = std::pow(1.0 + std::sqrt(r2), -(double(d.dim) + beta));
    sum += pow_abs(f[i], p) * w;
  }
  return std::pow(d.cell_measure() * sum, 1.0 / p);
}

}  // namespace campanato
