#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "campanato/grid.hpp"

namespace campanato {

enum class OperatorKind { Laplacian, Schrodinger };
enum class SemigroupKind { Heat, Poisson };

/// Discretized generator: -Delta (kind Laplacian) or -Delta + V. order_m is
/// the calculus exponent (2 for the heat calculus, 1 when the engine is read
/// as generating e^{-t sqrt(L)}). epsilon_list and theta_policy feed the
/// kernel-bound checks; the decay supremum itself is not grid-decidable, so
/// explicit candidate exponents stand in for it.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::Laplacian;
  std::optional<GridFunction> potential;  // required iff kind == Schrodinger
  double order_m = 2.0;
  std::vector<double> epsilon_list = {1.0};
  std::vector<double> theta_policy = {1.0};
};

/// Spectral representation of L: Fourier multipliers |xi|^2 for the periodic
/// Laplacian, a dense symmetric eigendecomposition (second-order central
/// differences plus diagonal V) otherwise. Semigroups act by functional
/// calculus on the coefficients, so the semigroup law holds exactly up to
/// roundoff. Engines are immutable after build; all applies are const and
/// safe to call concurrently.
class OperatorEngine {
 public:
  static constexpr std::size_t kEigenRouteBudget = 4096;

  static OperatorEngine build(const OperatorSpec& spec, const GridDomain& domain);

  const OperatorSpec& spec() const { return *spec_; }
  const GridDomain& domain() const { return domain_; }
  bool fourier_route() const { return fourier_; }

  /// e^{-tL} f by functional calculus; t = 0 returns f exactly.
  GridFunction heat_apply(double t, const GridFunction& f) const;
  /// e^{-t sqrt(L)} f; t = 0 returns f exactly.
  GridFunction poisson_apply(double t, const GridFunction& f) const;
  /// heat_apply unless order_m == 1, then poisson_apply.
  GridFunction semigroup_apply(double t, const GridFunction& f) const;
  /// The semigroup time matching a ball radius: r^m (heat) or r (sqrt calculus).
  double time_for_radius(double r) const;

  /// d/dt e^{-t sqrt(L)} f, computed spectrally (exact coefficients).
  GridFunction poisson_dt_apply(double t, const GridFunction& f) const;

  /// Discrete L itself: multiplier |xi|^2 on the Fourier route, the
  /// central-difference stencil plus V on the eigen route.
  GridFunction apply_generator(const GridFunction& f) const;

  /// Batch of semigroup times sharing one analysis pass; parallel over times.
  std::vector<GridFunction> apply_many(SemigroupKind kind, std::span<const double> times,
                                       const GridFunction& f, Exec exec = Exec::Parallel) const;

  /// Quadrature oracle for poisson_apply: e^{-t sqrt(L)} written as a
  /// Gaussian-weighted integral of heat operators (midpoint rule in the
  /// subordination variable). Never the production path.
  GridFunction poisson_via_subordination(double t, const GridFunction& f, int nodes,
                                         bool check_convergence = false) const;

  /// Semigroup applied to the discrete delta at node y scaled by h^{-dim}.
  GridFunction kernel_column(double t, std::size_t y_flat, SemigroupKind kind) const;

  double min_eigenvalue() const;

  // Eigen-route accessors (throw on the Fourier route).
  const Eigen::VectorXd& eigenvalues() const;
  const Eigen::MatrixXd& eigenvectors() const;
  /// Coefficients of f in the grid-orthonormal eigenbasis.
  Eigen::VectorXd analyze(const GridFunction& f) const;
  GridFunction eigenfunction(int j) const;

  /// Sorted multipliers (Fourier route), mainly for tests.
  std::vector<double> fourier_multipliers() const;

 private:
  OperatorEngine() = default;

  enum class Weight { Heat, Poisson, PoissonDt, Generator };
  GridFunction apply_weight(Weight w, double t, const GridFunction& f) const;
  GridFunction stencil_apply(const GridFunction& f) const;

  std::shared_ptr<const OperatorSpec> spec_;
  GridDomain domain_;
  bool fourier_ = false;

  // eigen route
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXd eigvecs_;  // grid-orthonormal: h^dim * Phi^T Phi = I

  // fourier route
  std::vector<double> mult_;
  struct FftPlans;
  std::shared_ptr<FftPlans> plans_;
};

/// Central-difference (truncated) or spectral (periodic) derivative along
/// one axis; pure grid operation shared by the kernel-bound and Carleson
/// machinery.
GridFunction gradient_component(const GridFunction& f, int axis);

enum class KernelBoundKind {
  HeatDecay,        // |p_t| <= C t^{-n/m} (1 + |x-y| / t^{1/m})^{-(n+eps)}
  PoissonShape,     // P_t <= C t / (t^2 + |x-y|^2)^{(n+1)/2}
  PoissonDtShape,   // |t d/dt P_t| against the same envelope
  PoissonGradShape  // |t grad_x P_t| against the same envelope
};

struct KernelBoundParams {
  double C = 1.0;
  double m = 2.0;
  double epsilon = 1.0;
};

struct KernelBoundRow {
  double t;
  double max_ratio;
};

struct KernelBoundReport {
  double max_ratio = 0.0;
  double argmax_t = 0.0;
  std::size_t argmax_x = 0;
  std::size_t argmax_y = 0;
  bool pass = false;
  std::vector<KernelBoundRow> per_time;
};

/// Max of kernel/bound over sampled columns; pass iff the ratio stays <= 1
/// for the supplied C. Report-only: never throws on a failed bound.
/// max_distance > 0 restricts the scan to |x - y| <= max_distance; the
/// free-space envelopes only hold away from the wrap/truncation collar.
KernelBoundReport check_kernel_bound(const OperatorEngine& engine, std::span<const double> t_list,
                                     const KernelBoundParams& params, KernelBoundKind kind,
                                     int y_stride = 0, Exec exec = Exec::Parallel,
                                     double max_distance = 0.0);

/// Least-squares fit of C in kernel ~= C * t / (t^2 + |x-y|^2)^{(n+1)/2}
/// over a near-diagonal window |x-y| <= window; used for the Poisson shape
/// constant, which the calculus leaves symbolic.
double fit_poisson_constant(const OperatorEngine& engine, std::span<const double> t_list,
                            double window);

}  // namespace campanato
