#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "campanato/grid.hpp"
#include "campanato/norms.hpp"
#include "campanato/operator_engine.hpp"

namespace campanato {

/// Long-time limit diagnostics. The limit is the semigroup at the largest
/// scheduled time; converged requires the successive sup-deviations to be
/// nonincreasing and the final one to clear the tolerance. No extrapolation.
struct LimitDiagnostics {
  std::vector<double> t_schedule;
  std::vector<double> sup_deviations;
  bool converged = false;
  std::optional<std::pair<int, int>> offending_pair;  // first nonmonotone step
  GridFunction limit;
  double limit_sup = 0.0;

  explicit LimitDiagnostics(const GridDomain& d) : limit(d) {}
};

std::vector<double> geometric_schedule(double t0, double ratio, int count);

/// sigma_L(f): semigroup long-time limit along a geometric schedule whose
/// final time must reach (R/2)^m.
LimitDiagnostics sigma_limit(const OperatorEngine& engine, const GridFunction& f,
                             std::span<const double> t_schedule, double tol);

struct KernelMembership {
  bool member = false;
  double max_deviation = 0.0;
  double threshold = 0.0;
};

/// Fixed-point test for the kernel space: sup_t sup_x |e^{-tL}f - f| against
/// tol * (1 + sup|f|). t_list must span at least two decades.
KernelMembership kernel_membership(const OperatorEngine& engine, const GridFunction& f,
                                   std::span<const double> t_list, double tol);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
  double max_residual = 0.0;  // in log units
  bool power_law = false;     // residuals small enough for a power-law read
};

/// Least-squares slope of log sup|e^{-tL}f - e^{-KtL}f| against log t.
DecayFit check_semigroup_gap_decay(const OperatorEngine& engine, const GridFunction& f,
                                   const NormParams& params, double K,
                                   std::span<const double> t_grid);

/// Least-squares slope of log sup|e^{-tL}f| against log t.
DecayFit check_linfty_bound(const OperatorEngine& engine, const GridFunction& f,
                            const NormParams& params, std::span<const double> t_grid);

/// Weighted-difference quotient: the left side of the growth-weighted bound
/// divided by t^{-(n-lambda+delta)/m} times the operator Campanato norm^p.
double check_weighted_difference(const OperatorEngine& engine, const GridFunction& f,
                                 const NormParams& params, double t, double delta,
                                 const BallFamily& family);

}  // namespace campanato
