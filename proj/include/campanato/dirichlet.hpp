#pragma once

#include <optional>
#include <span>
#include <vector>

#include "campanato/grid.hpp"
#include "campanato/norms.hpp"
#include "campanato/operator_engine.hpp"

namespace campanato {

/// Log-spaced heights t_1 < ... < t_M in [t_min, t_max] with t_min >= 2h and
/// t_max <= R/2; the ratio between consecutive heights is constant.
class HeightGrid {
 public:
  HeightGrid(const GridDomain& domain, double t_min, double t_max, int count);

  const std::vector<double>& heights() const { return heights_; }
  int count() const { return int(heights_.size()); }
  double t_min() const { return heights_.front(); }
  double t_max() const { return heights_.back(); }
  double log_step() const { return log_step_; }

 private:
  std::vector<double> heights_;
  double log_step_ = 0.0;
};

enum class FieldProvenance { Extended, External };

/// Samples u(x, t_j) of a function on the upper half-space, stored slice by
/// slice. Extended provenance records the boundary function it came from.
class SolutionField {
 public:
  SolutionField(const GridDomain& domain, HeightGrid heights, std::vector<GridFunction> slices,
                FieldProvenance provenance, std::optional<GridFunction> boundary = {});

  const GridDomain& domain() const { return domain_; }
  const HeightGrid& heights() const { return heights_; }
  FieldProvenance provenance() const { return provenance_; }
  const std::optional<GridFunction>& boundary() const { return boundary_; }
  const GridFunction& slice(int j) const { return slices_[std::size_t(j)]; }
  int slice_count() const { return int(slices_.size()); }

  /// Slice at an off-grid height by log-linear interpolation.
  GridFunction interpolate_slice(double t) const;

 private:
  GridDomain domain_;
  HeightGrid heights_;
  std::vector<GridFunction> slices_;
  FieldProvenance provenance_;
  std::optional<GridFunction> boundary_;
};

/// u(x, t_j) = e^{-t_j sqrt(L)} f; slices evaluate in parallel.
SolutionField poisson_extension(const OperatorEngine& engine, const GridFunction& f,
                                const HeightGrid& heights, Exec exec = Exec::Parallel);

/// Max over interior heights of sup |-u_tt + L u| divided by the max of
/// sup |L u|; u_tt by central differences in log-t coordinates.
double pde_residual(const SolutionField& field, const OperatorEngine& engine);

struct CarlesonBallRow {
  Ball ball;
  double value = 0.0;         // r^{-lambda} * resolved integral
  double collar_bound = 0.0;  // t_min^2 * sup_B |grad u(t_min)|^2 * |B|, scaled by r^{-lambda}
  int heights_used = 0;
  bool truncated_top = false;  // r exceeded the top of the height grid
};

struct CarlesonValue {
  double value = 0.0;
  Ball argmax;
  double collar_bound = 0.0;  // collar bound of the argmax ball
  std::size_t skipped = 0;    // balls with fewer than 4 heights below their radius
  std::vector<CarlesonBallRow> table;
};

/// sup over balls of r^{-lambda} int_0^r int_B t |grad u|^2 dx dt with
/// grad = (grad_x, d_t); trapezoid in log t over the resolved heights. The
/// unresolved collar (0, t_min) is omitted and its bound reported.
CarlesonValue carleson_functional(const SolutionField& field, const NormParams& params,
                                  const BallFamily& family, Exec exec = Exec::Parallel);

/// Square-function analog with only the t-derivative term and measure
/// dx dt / t; d_t e^{-t sqrt(L)} f is computed spectrally. The returned
/// value is the quadratic supremand itself (no 1/p power), like the
/// Carleson value.
NormValue square_function_norm(const OperatorEngine& engine, const GridFunction& f,
                               const NormParams& params, const HeightGrid& heights,
                               const BallFamily& family, Exec exec = Exec::Parallel);

struct TraceDiagnostics {
  std::vector<double> k_schedule;
  std::vector<double> fk_morrey_norms;
  std::vector<double> cauchy_increments;  // sup on the inner box of |f_{k+1} - f_k|
  double reconstruction_error = 0.0;      // max over heights, inner box
  bool norms_uniform = false;             // max/min of fk norms within 10%
  bool extension_consistent = false;      // reconstruction error under the threshold
  GridFunction recovered;

  explicit TraceDiagnostics(const GridDomain& d) : recovered(d) {}
};

/// Boundary recovery from the slices f_k = u(., 1/k): uniform Morrey bounds,
/// Cauchy increments on the inner box, recovered f = last f_k, and the
/// reconstruction error against e^{-t sqrt(L)} f across all heights. Morrey
/// norms growing monotonically by more than 2x across the schedule abort
/// with "no uniform trace bound".
TraceDiagnostics trace_recover(const SolutionField& field, const OperatorEngine& engine,
                               const NormParams& params, std::span<const double> k_schedule,
                               double consistency_tol = 1e-2, double inner_fraction = 0.5);

/// On-disk field: one grid binary per slice ("<base>.slice<j>.f64") plus a
/// "<base>.meta" header listing the domain, provenance and heights.
void write_solution_field(const SolutionField& field, const std::string& base);
SolutionField read_solution_field(const std::string& base);

}  // namespace campanato
