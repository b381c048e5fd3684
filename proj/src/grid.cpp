#include "campanato/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace campanato {

static_assert(std::endian::native == std::endian::little,
              "grid binary format assumes a little-endian host");

namespace {

constexpr std::size_t kMaxPointCount = std::size_t(1) << 24;

std::string format_point(const std::array<double, 3>& x, int dim) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < dim; ++a) os << (a ? ", " : "") << x[a];
  os << ")";
  return os.str();
}

// 16-point Gauss-Legendre abscissae/weights on [-1, 1].
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

}  // namespace

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "truncated_dirichlet";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "truncated_dirichlet" || s == "dirichlet") return Boundary::TruncatedDirichlet;
  throw std::invalid_argument("unknown boundary kind: " + s);
}

GridDomain::GridDomain(int dim_, double half_width_, int points_per_axis_, Boundary boundary_)
    : dim(dim_), half_width(half_width_), points_per_axis(points_per_axis_), boundary(boundary_) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("GridDomain: dim must be 1, 2 or 3");
  if (!(half_width > 0.0)) throw std::invalid_argument("GridDomain: half_width must be positive");
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw std::invalid_argument("GridDomain: points_per_axis must be a positive even integer");
  double count = std::pow(double(points_per_axis), dim);
  if (count > double(kMaxPointCount))
    throw std::invalid_argument("GridDomain: total point count exceeds the memory budget");
}

double GridDomain::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= spacing();
  return m;
}

std::size_t GridDomain::point_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= std::size_t(points_per_axis);
  return n;
}

std::array<int, 3> GridDomain::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = int(flat % std::size_t(points_per_axis));
    flat /= std::size_t(points_per_axis);
  }
  return idx;
}

std::size_t GridDomain::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * std::size_t(points_per_axis) + std::size_t(idx[a]);
  return flat;
}

std::array<double, 3> GridDomain::point(std::size_t flat) const {
  auto idx = unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = coord(idx[a]);
  return x;
}

int GridDomain::snap_index(double x) const {
  int i = int(std::lround((x + half_width) / spacing()));
  const int n = points_per_axis;
  if (boundary == Boundary::Periodic) {
    i %= n;
    if (i < 0) i += n;
  } else {
    i = std::clamp(i, 0, n - 1);
  }
  return i;
}

double GridDomain::axis_distance(double a, double b) const {
  double d = a - b;
  if (boundary == Boundary::Periodic) {
    const double period = 2.0 * half_width;
    d = std::remainder(d, period);
  }
  return d;
}

double GridDomain::distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
  double s = 0.0;
  for (int ax = 0; ax < dim; ++ax) {
    double d = axis_distance(a[ax], b[ax]);
    s += d * d;
  }
  return std::sqrt(s);
}

GridFunction::GridFunction(const GridDomain& domain)
    : domain_(domain), values_(domain.point_count(), 0.0) {}

GridFunction::GridFunction(const GridDomain& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.point_count())
    throw std::invalid_argument("GridFunction: values length does not match the domain");
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void GridFunction::require_finite(const char* context) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::runtime_error(std::string(context) + ": non-finite value at node " +
                               format_point(domain_.point(i), domain_.dim));
    }
  }
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain() == b.domain())) throw std::invalid_argument("grid function domain mismatch");
  GridFunction out(a.domain());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain() == b.domain())) throw std::invalid_argument("grid function domain mismatch");
  GridFunction out(a.domain());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

GridFunction operator*(double a, const GridFunction& f) {
  GridFunction out(f.domain());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i];
  return out;
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
  if (!(a.domain() == b.domain())) throw std::invalid_argument("grid function domain mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GridFunction sample(const GridDomain& domain, const ScalarField& expr) {
  GridFunction f(domain);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto x = domain.point(i);
    double v = expr(x);
    if (!std::isfinite(v))
      throw std::runtime_error("sample: non-finite value at node " +
                               format_point(x, domain.dim));
    f[i] = v;
  }
  return f;
}

double cell_average(const GridDomain& domain, const ScalarField& expr,
                    const std::array<double, 3>& node) {
  const double half = 0.5 * domain.spacing();
  double sum = 0.0;
  const int dim = domain.dim;
  const auto loops = [&](auto&& self, int axis, std::array<double, 3> x, double w) -> void {
    if (axis == dim) {
      sum += w * expr(x);
      return;
    }
    for (int g = 0; g < kGaussN; ++g) {
      auto y = x;
      y[axis] = node[axis] + half * kGaussX[g];
      self(self, axis + 1, y, w * 0.5 * kGaussW[g]);
    }
  };
  loops(loops, 0, node, 1.0);
  return sum;
}

GridFunction sample_regularized(const GridDomain& domain, const ScalarField& expr) {
  GridFunction f(domain);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto x = domain.point(i);
    double v = expr(x);
    if (!std::isfinite(v)) {
      v = cell_average(domain, expr, x);
      if (!std::isfinite(v))
        throw std::runtime_error("sample_regularized: cell average non-finite at node " +
                                 format_point(x, domain.dim));
    }
    f[i] = v;
  }
  return f;
}

Ball make_ball(const GridDomain& domain, const std::array<double, 3>& center, double radius) {
  if (!(radius >= domain.spacing()))
    throw std::invalid_argument("Ball: radius must be at least the grid spacing");
  if (!(radius <= domain.half_width))
    throw std::invalid_argument("Ball: radius must not exceed the half-width");
  Ball b;
  b.radius = radius;
  for (int a = 0; a < domain.dim; ++a) b.center[a] = domain.coord(domain.snap_index(center[a]));
  return b;
}

void for_each_ball_node(const GridDomain& domain, const Ball& b,
                        const std::function<void(std::size_t)>& visit) {
  const int n = domain.points_per_axis;
  const double h = domain.spacing();
  const int dim = domain.dim;
  const double r2 = b.radius * b.radius * (1.0 + 1e-12);

  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dim; ++a) c[a] = domain.snap_index(b.center[a]);
  int K = int(std::floor(b.radius / h + 1e-12));

  // Offset ranges per axis; periodic wraps (each node at most once),
  // truncated clips to the box.
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    if (domain.boundary == Boundary::Periodic) {
      if (2 * K + 1 >= n) {
        lo[a] = -n / 2;
        hi[a] = n / 2 - 1;
      } else {
        lo[a] = -K;
        hi[a] = K;
      }
    } else {
      lo[a] = std::max(-K, -c[a]);
      hi[a] = std::min(K, n - 1 - c[a]);
    }
  }

  std::array<int, 3> d{0, 0, 0};
  const auto loops = [&](auto&& self, int axis, double dist2) -> void {
    if (axis == dim) {
      if (dist2 <= r2) {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
          int i = c[a] + d[a];
          if (domain.boundary == Boundary::Periodic) {
            i %= n;
            if (i < 0) i += n;
          }
          idx[a] = i;
        }
        visit(domain.flatten(idx));
      }
      return;
    }
    for (d[axis] = lo[axis]; d[axis] <= hi[axis]; ++d[axis]) {
      double dd = d[axis] * h;
      self(self, axis + 1, dist2 + dd * dd);
    }
  };
  loops(loops, 0, 0.0);
}

std::size_t ball_node_count(const GridDomain& domain, const Ball& b) {
  std::size_t count = 0;
  for_each_ball_node(domain, b, [&](std::size_t) { ++count; });
  return count;
}

double pow_abs(double v, double p) {
  double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

double ball_lp_integral(const GridFunction& f, const Ball& b, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("ball_lp_integral: p must be >= 1");
  double sum = 0.0;
  std::size_t count = 0;
  for_each_ball_node(f.domain(), b, [&](std::size_t i) {
    sum += pow_abs(f[i], p);
    ++count;
  });
  if (count == 0) throw std::runtime_error("degenerate ball: no grid nodes inside");
  return f.domain().cell_measure() * sum;
}

double ball_mean(const GridFunction& f, const Ball& b) {
  double sum = 0.0;
  std::size_t count = 0;
  for_each_ball_node(f.domain(), b, [&](std::size_t i) {
    sum += f[i];
    ++count;
  });
  if (count == 0) throw std::runtime_error("degenerate ball: no grid nodes inside");
  return sum / double(count);
}

BallFamily BallFamily::make(const GridDomain& domain, int stride, double ratio, int radius_count) {
  if (stride < 1) throw std::invalid_argument("BallFamily: stride must be >= 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("BallFamily: ratio must be in (0,1)");
  if (radius_count < 1) throw std::invalid_argument("BallFamily: need at least one radius");

  BallFamily fam;
  fam.domain_ = domain;
  fam.stride_ = stride;
  fam.ratio_ = ratio;

  const double h = domain.spacing();
  for (int j = 0; j < radius_count; ++j) {
    double r = domain.half_width * std::pow(ratio, j);
    if (r < h)
      throw std::invalid_argument("BallFamily: radius below the grid spacing; reduce radius_count");
    fam.radii_.push_back(r);
  }

  const int n = domain.points_per_axis;
  std::array<int, 3> idx{0, 0, 0};
  const auto loops = [&](auto&& self, int axis) -> void {
    if (axis == domain.dim) {
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int a = 0; a < domain.dim; ++a) x[a] = domain.coord(idx[a]);
      fam.centers_.push_back(x);
      return;
    }
    for (idx[axis] = 0; idx[axis] < n; idx[axis] += stride) self(self, axis + 1);
  };
  loops(loops, 0);
  return fam;
}

BallFamily BallFamily::make_default(const GridDomain& domain) {
  int stride = std::max(1, domain.points_per_axis / 16);
  const double ratio = 1.0 / std::sqrt(2.0);
  const double h = domain.spacing();
  int count = 1;
  while (domain.half_width * std::pow(ratio, count) >= 2.0 * h) ++count;
  return make(domain, stride, ratio, count);
}

BallFamily BallFamily::refine() const {
  int stride = std::max(1, stride_ / 2);
  int count = int(radii_.size());
  if (domain_.half_width * std::pow(ratio_, count) >= domain_.spacing()) ++count;
  return make(domain_, stride, ratio_, count);
}

Ball BallFamily::ball(std::size_t center_idx, std::size_t radius_idx) const {
  Ball b;
  b.center = centers_.at(center_idx);
  b.radius = radii_.at(radius_idx);
  return b;
}

void write_f64_array(std::span<const double> data, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(data.data()),
           std::streamsize(data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write: " + path);
}

std::vector<double> read_f64_array(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::streamsize bytes = is.tellg();
  if (bytes < 0 || bytes % std::streamsize(sizeof(double)) != 0)
    throw std::runtime_error("not a float64 array: " + path);
  std::vector<double> data(std::size_t(bytes) / sizeof(double));
  is.seekg(0);
  is.read(reinterpret_cast<char*>(data.data()), bytes);
  if (!is) throw std::runtime_error("short read: " + path);
  return data;
}

void write_grid_function(const GridFunction& f, const std::string& path) {
  write_f64_array(f.values(), path);
  std::ofstream meta(path + ".meta", std::ios::trunc);
  if (!meta) throw std::runtime_error("cannot open for writing: " + path + ".meta");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", f.domain().half_width);
  meta << "dim = " << f.domain().dim << "\n"
       << "half_width = " << buf << "\n"
       << "points_per_axis = " << f.domain().points_per_axis << "\n"
       << "boundary = " << to_string(f.domain().boundary) << "\n";
}

GridFunction read_grid_function(const std::string& path) {
  std::ifstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("missing sidecar header: " + path + ".meta");
  int dim = 0, n = 0;
  double half_width = 0.0;
  std::string boundary;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    ls >> key >> eq;
    if (key == "dim") ls >> dim;
    else if (key == "half_width") ls >> half_width;
    else if (key == "points_per_axis") ls >> n;
    else if (key == "boundary") ls >> boundary;
  }
  GridDomain domain(dim, half_width, n, boundary_from_string(boundary));
  auto data = read_f64_array(path);
  return GridFunction(domain, std::move(data));
}

}  // namespace campanato
