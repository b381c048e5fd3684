#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace campanato {

/// Execution mode for the scan kernels. Parallel runs the OpenMP path,
/// Serial the reference loops; both produce bit-identical results.
enum class Exec { Serial, Parallel };

enum class Boundary { Periodic, TruncatedDirichlet };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Uniform grid on [-R, R]^dim with nodes x_i = -R + i*h per axis,
/// h = 2R/N. Periodic identifies -R with R; TruncatedDirichlet treats
/// values at lattice points outside the index range as zero.
struct GridDomain {
  int dim = 1;
  double half_width = 1.0;
  int points_per_axis = 2;
  Boundary boundary = Boundary::Periodic;

  GridDomain() = default;
  GridDomain(int dim_, double half_width_, int points_per_axis_, Boundary boundary_);

  double spacing() const { return 2.0 * half_width / points_per_axis; }
  double cell_measure() const;
  std::size_t point_count() const;

  double coord(int i) const { return -half_width + i * spacing(); }
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;
  std::array<double, 3> point(std::size_t flat) const;

  /// Index of the node nearest to x along one axis (periodic wrap applied).
  int snap_index(double x) const;

  /// Shortest signed distance between two axis coordinates (min-image for
  /// periodic domains).
  double axis_distance(double a, double b) const;
  double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const;

  bool operator==(const GridDomain&) const = default;
};

/// Real-valued samples on a GridDomain. Immutable by convention after an
/// operation returns it; every producing operation checks finiteness.
class GridFunction {
 public:
  explicit GridFunction(const GridDomain& domain);
  GridFunction(const GridDomain& domain, std::vector<double> values);

  const GridDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double sup_norm() const;
  /// Throws if any value is NaN/Inf, naming the offending coordinate.
  void require_finite(const char* context) const;

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double a, const GridFunction& f);
double sup_diff(const GridFunction& a, const GridFunction& b);

using ScalarField = std::function<double(const std::array<double, 3>&)>;

/// Pointwise sampling; a non-finite value at any node is an error.
GridFunction sample(const GridDomain& domain, const ScalarField& expr);

/// As sample(), but nodes where expr is non-finite take the average of
/// expr over the node's cell (16-point-per-axis Gauss quadrature).
GridFunction sample_regularized(const GridDomain& domain, const ScalarField& expr);

/// Average of expr over the cell of half-width h/2 centered at the node,
/// by tensor-product 16-point Gauss-Legendre quadrature.
double cell_average(const GridDomain& domain, const ScalarField& expr,
                    const std::array<double, 3>& node);

/// Ball with center snapped to the grid. Radius lies in [h, R].
struct Ball {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

Ball make_ball(const GridDomain& domain, const std::array<double, 3>& center, double radius);

std::size_t ball_node_count(const GridDomain& domain, const Ball& b);

/// Visits the flat index of every grid node inside the ball. Periodic
/// domains wrap (min-image metric); TruncatedDirichlet clips to the box.
/// Deterministic visiting order.
void for_each_ball_node(const GridDomain& domain, const Ball& b,
                        const std::function<void(std::size_t)>& visit);

/// Midpoint quadrature of |f|^p over the ball: h^dim * sum over nodes.
double ball_lp_integral(const GridFunction& f, const Ball& b, double p);

/// Mean of the samples inside the ball.
double ball_mean(const GridFunction& f, const Ball& b);

/// |v|^p with |0|^p = 0; p = 1 and p = 2 short-circuit the pow call.
double pow_abs(double v, double p);

/// Finite discretization of the supremum over all balls: centers on a
/// sublattice of stride s, radii in geometric progression R * ratio^j.
/// Refining (smaller stride, more radii) keeps every existing pair.
class BallFamily {
 public:
  static BallFamily make(const GridDomain& domain, int stride, double ratio, int radius_count);
  /// stride = N/16, ratio = 2^{-1/2}, radii down to 2h.
  static BallFamily make_default(const GridDomain& domain);

  /// Halves the stride (floor 1) and appends one smaller radius while the
  /// radius floor h allows it. Anchor and ratio are held fixed.
  BallFamily refine() const;

  const GridDomain& domain() const { return domain_; }
  int stride() const { return stride_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<std::array<double, 3>>& centers() const { return centers_; }
  std::size_t ball_count() const { return centers_.size() * radii_.size(); }
  Ball ball(std::size_t center_idx, std::size_t radius_idx) const;

 private:
  BallFamily() = default;
  GridDomain domain_;
  int stride_ = 1;
  double ratio_ = 0.5;
  std::vector<double> radii_;
  std::vector<std::array<double, 3>> centers_;
};

/// Flat little-endian float64 dump plus a "<path>.meta" text header with
/// dim, half_width, points_per_axis and boundary.
void write_grid_function(const GridFunction& f, const std::string& path);
GridFunction read_grid_function(const std::string& path);

/// Raw array helpers used by the engine cache (same binary convention).
void write_f64_array(std::span<const double> data, const std::string& path);
std::vector<double> read_f64_array(const std::string& path);

}  // namespace campanato
