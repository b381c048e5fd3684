#include "campanato/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace campanato {

GridFunction make_potential(const PotentialSpec& spec, const GridDomain& domain) {
  ScalarField expr;
  switch (spec.kind) {
    case PotentialSpec::Kind::Constant: {
      double c = spec.constant_value;
      expr = [c](const std::array<double, 3>&) { return c; };
      break;
    }
    case PotentialSpec::Kind::PowerLaw: {
      double a = spec.exponent;
      auto c = spec.center;
      int dim = domain.dim;
      expr = [a, c, dim](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int ax = 0; ax < dim; ++ax) r2 += (x[ax] - c[ax]) * (x[ax] - c[ax]);
        return std::pow(std::sqrt(r2), a);
      };
      break;
    }
    case PotentialSpec::Kind::Bump: {
      auto c = spec.center;
      double w = spec.width, amp = spec.amplitude;
      int dim = domain.dim;
      expr = [c, w, amp, dim](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int ax = 0; ax < dim; ++ax) r2 += (x[ax] - c[ax]) * (x[ax] - c[ax]);
        return amp * std::exp(-r2 / (w * w));
      };
      break;
    }
    case PotentialSpec::Kind::HalfSpaceIndicator: {
      double off = spec.offset;
      expr = [off](const std::array<double, 3>& x) { return x[0] >= off ? 1.0 : 0.0; };
      break;
    }
    case PotentialSpec::Kind::Custom:
      if (!spec.custom) throw std::invalid_argument("make_potential: missing custom expression");
      expr = spec.custom;
      break;
  }

  GridFunction V = sample_regularized(domain, expr);
  bool any_positive = false;
  for (std::size_t i = 0; i < V.size(); ++i) {
    if (!(V[i] >= 0.0)) throw std::invalid_argument("make_potential: negative sample");
    if (V[i] > 0.0) any_positive = true;
  }
  if (!any_positive) throw std::invalid_argument("make_potential: potential identically zero");
  return V;
}

ReverseHolderResult reverse_holder_constant(const GridFunction& V, double q,
                                            const BallFamily& family, Exec exec) {
  if (!(q > 1.0)) throw std::invalid_argument("reverse_holder_constant: q must exceed 1");
  if (!(V.domain() == family.domain()))
    throw std::invalid_argument("reverse_holder_constant: domain mismatch");

  const auto& centers = family.centers();
  const auto& radii = family.radii();

  struct Slot {
    double ratio = -1.0;  // -1 marks a skipped ball
  };
  std::vector<Slot> slots(centers.size());

  ReverseHolderResult out;
  for (std::size_t rj = 0; rj < radii.size(); ++rj) {
    const std::int64_t nc = std::int64_t(centers.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t ci = 0; ci < nc; ++ci) {
      Ball b = family.ball(std::size_t(ci), rj);
      double sum = 0.0, sum_q = 0.0;
      std::size_t count = 0;
      for_each_ball_node(V.domain(), b, [&](std::size_t i) {
        sum += V[i];
        sum_q += pow_abs(V[i], q);
        ++count;
      });
      double mean = sum / double(count);
      if (mean == 0.0) {
        slots[std::size_t(ci)].ratio = -1.0;
      } else {
        slots[std::size_t(ci)].ratio = std::pow(sum_q / double(count), 1.0 / q) / mean;
      }
    }
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (slots[ci].ratio < 0.0) {
        ++out.skipped;
        continue;
      }
      ++out.evaluated;
      if (slots[ci].ratio > out.constant) {
        out.constant = slots[ci].ratio;
        out.argmax = family.ball(ci, rj);
      }
    }
  }
  if (out.evaluated == 0) throw std::runtime_error("potential vanishes on family");
  return out;
}

BqCertification certify_bq(const PotentialSpec& spec, const GridDomain& base, double q, int budget,
                           Exec exec) {
  if (budget < 2) throw std::invalid_argument("certify_bq: budget must allow >= 2 levels");

  BqCertification cert;
  const int n = base.dim;
  cert.meets_q_ge_half_n = q >= 0.5 * double(n);
  cert.meets_q_ge_n = q >= double(n);

  for (int level = 0; level < budget; ++level) {
    GridDomain domain(base.dim, base.half_width, base.points_per_axis << level, base.boundary);
    GridFunction V = make_potential(spec, domain);
    auto rh = reverse_holder_constant(V, q, BallFamily::make_default(domain), exec);
    cert.level_constants.push_back(rh.constant);
    cert.constant = rh.constant;
    cert.skipped_balls = rh.skipped;
    cert.levels_used = level + 1;

    if (cert.level_constants.size() >= 3) {
      auto rel_change = [&](std::size_t i) {
        return std::abs(cert.level_constants[i] / cert.level_constants[i - 1] - 1.0);
      };
      std::size_t last = cert.level_constants.size() - 1;
      if (rel_change(last) <= 0.1 && rel_change(last - 1) <= 0.1) {
        cert.certified = true;
        return cert;
      }
    }
  }

  const std::size_t last = cert.level_constants.size() - 1;
  cert.diverging =
      cert.level_constants[last] > cert.level_constants[last - 1] * 1.1;
  return cert;
}

}  // namespace campanato
