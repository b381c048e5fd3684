#pragma once

#include <span>
#include <vector>

#include "campanato/grid.hpp"
#include "campanato/operator_engine.hpp"
#include "campanato/report.hpp"

namespace campanato {

/// Exponents for the ball-supremum functionals. lambda must lie strictly
/// inside (0, n); the endpoint regimes are rejected at validation time.
struct NormParams {
  double p = 2.0;
  double lambda = 0.5;
  double m = 2.0;
};

void validate_norm_params(const NormParams& params, int dim);

struct RadiusProfilePoint {
  double radius;
  double value;  // max over centers of r^{-lambda} * integral (pre 1/p power)
};

/// Norm value plus the diagnostics that make the ball-discretization
/// auditable: the argmax ball and the per-radius profile of the raw
/// supremand.
struct NormValue {
  double value = 0.0;
  double raw_max = 0.0;
  Ball argmax_ball;
  std::vector<RadiusProfilePoint> profile;
};

/// (max over the family of r^{-lambda} int_B |f|^p)^{1/p}.
NormValue morrey_norm(const GridFunction& f, const NormParams& params, const BallFamily& family,
                      Exec exec = Exec::Parallel);

/// Same supremum with the integrand |f - mean_B f|^p.
NormValue campanato_classical(const GridFunction& f, const NormParams& params,
                              const BallFamily& family, Exec exec = Exec::Parallel);

/// Oscillation measured against the semigroup average: integrand
/// |f - e^{-r^m L} f|^p (Poisson action when the engine runs the sqrt
/// calculus, m = 1). params.m must equal the engine's order_m.
NormValue campanato_operator(const GridFunction& f, const OperatorEngine& engine,
                             const NormParams& params, const BallFamily& family,
                             Exec exec = Exec::Parallel);

/// Growth-weighted L^p size: (int |f|^p (1+|x|)^{-(n+beta)})^{1/p}.
double mtype_norm(const GridFunction& f, double p, double beta);

/// Structured-text serialization of a norm result: norm kind, value,
/// exponents, argmax ball and the per-radius profile.
void append_norm_report(ReportWriter& rep, const std::string& section_name,
                        const std::string& norm_kind, const NormValue& value,
                        const NormParams& params, int dim);

}  // namespace campanato
