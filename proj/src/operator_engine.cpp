#include "campanato/operator_engine.hpp"

#include <fftw3.h>
#include <omp.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace campanato {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

template <class T>
std::uint64_t fnv1a_value(const T& v, std::uint64_t seed) {
  return fnv1a(&v, sizeof(T), seed);
}

// FFTW planner access is not thread-safe; executions through the new-array
// interface are. Plans are cached per grid signature and created under a
// global lock, with FFTW_UNALIGNED so any buffer qualifies.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_planner_mutex;
std::map<std::pair<int, int>, PlanPair> g_plan_cache;

PlanPair get_plans(int dim, int n) {
  std::lock_guard<std::mutex> lock(g_planner_mutex);
  auto key = std::make_pair(dim, n);
  auto it = g_plan_cache.find(key);
  if (it != g_plan_cache.end()) return it->second;

  std::vector<int> dims(std::size_t(dim), n);
  std::size_t n_real = 1;
  for (int a = 0; a < dim; ++a) n_real *= std::size_t(n);
  std::size_t n_cplx = n_real / std::size_t(n) * (std::size_t(n) / 2 + 1);

  std::vector<double> rbuf(n_real);
  std::vector<double> cbuf(2 * n_cplx);
  auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());

  PlanPair plans;
  plans.fwd = fftw_plan_dft_r2c(dim, dims.data(), rbuf.data(), c,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.bwd = fftw_plan_dft_c2r(dim, dims.data(), c, rbuf.data(),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plans.fwd || !plans.bwd) throw std::runtime_error("FFTW plan creation failed");
  g_plan_cache[key] = plans;
  return plans;
}

std::size_t complex_bin_count(const GridDomain& d) {
  std::size_t n = 1;
  for (int a = 0; a < d.dim - 1; ++a) n *= std::size_t(d.points_per_axis);
  return n * (std::size_t(d.points_per_axis) / 2 + 1);
}

// Signed lattice frequency of a complex bin along each axis; the last axis
// is the halved r2c axis.
void bin_frequencies(const GridDomain& d, std::size_t bin, int out[3]) {
  const int n = d.points_per_axis;
  const int nc = n / 2 + 1;
  int raw[3] = {0, 0, 0};
  std::size_t rest = bin;
  raw[d.dim - 1] = int(rest % std::size_t(nc));
  rest /= std::size_t(nc);
  for (int a = d.dim - 2; a >= 0; --a) {
    raw[a] = int(rest % std::size_t(n));
    rest /= std::size_t(n);
  }
  for (int a = 0; a < d.dim; ++a) out[a] = (a == d.dim - 1) ? raw[a] : (raw[a] <= n / 2 ? raw[a] : raw[a] - n);
}

}  // namespace

struct OperatorEngine::FftPlans {
  PlanPair plans;
  std::size_t n_real = 0;
  std::size_t n_cplx = 0;
};

OperatorEngine OperatorEngine::build(const OperatorSpec& spec, const GridDomain& domain) {
  OperatorEngine e;
  e.spec_ = std::make_shared<OperatorSpec>(spec);
  e.domain_ = domain;

  if (!(spec.order_m > 0.0)) throw std::invalid_argument("OperatorSpec: order_m must be positive");

  if (spec.kind == OperatorKind::Schrodinger) {
    if (!spec.potential) throw std::invalid_argument("Schrodinger operator requires a potential");
    if (!(spec.potential->domain() == domain))
      throw std::invalid_argument("potential sampled on a different domain");
    for (std::size_t i = 0; i < spec.potential->size(); ++i)
      if (!((*spec.potential)[i] >= 0.0))
        throw std::invalid_argument("potential must be nonnegative pointwise");
  }

  e.fourier_ = (spec.kind == OperatorKind::Laplacian && domain.boundary == Boundary::Periodic);

  if (e.fourier_) {
    const std::size_t bins = complex_bin_count(domain);
    e.mult_.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      int k[3];
      bin_frequencies(domain, b, k);
      double mu = 0.0;
      for (int a = 0; a < domain.dim; ++a) {
        double xi = kPi * double(k[a]) / domain.half_width;
        mu += xi * xi;
      }
      e.mult_[b] = mu;
    }
    auto plans = std::make_shared<FftPlans>();
    plans->plans = get_plans(domain.dim, domain.points_per_axis);
    plans->n_real = domain.point_count();
    plans->n_cplx = bins;
    e.plans_ = std::move(plans);
    return e;
  }

  const std::size_t n = domain.point_count();
  if (n > kEigenRouteBudget)
    throw std::invalid_argument(
        "dense eigendecomposition budget exceeded (N^dim must be <= 4096 off the Fourier route)");

  // Disk cache keyed by a content hash of (spec, domain).
  std::string cache_base;
  if (const char* dir = std::getenv("CAMPANATO_CACHE_DIR"); dir && *dir) {
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a("campanato-engine-v1", 19, h);
    int kind = int(spec.kind);
    h = fnv1a_value(kind, h);
    h = fnv1a_value(spec.order_m, h);
    h = fnv1a_value(domain.dim, h);
    h = fnv1a_value(domain.half_width, h);
    h = fnv1a_value(domain.points_per_axis, h);
    int bd = int(domain.boundary);
    h = fnv1a_value(bd, h);
    if (spec.potential)
      h = fnv1a(spec.potential->values().data(), spec.potential->size() * sizeof(double), h);
    std::ostringstream os;
    os << std::hex << h;
    std::filesystem::create_directories(dir);
    cache_base = (std::filesystem::path(dir) / os.str()).string();

    try {
      auto vals = read_f64_array(cache_base + ".vals");
      auto vecs = read_f64_array(cache_base + ".vecs");
      if (vals.size() == n && vecs.size() == n * n) {
        e.eigvals_ = Eigen::Map<Eigen::VectorXd>(vals.data(), Eigen::Index(n));
        e.eigvecs_ = Eigen::Map<Eigen::MatrixXd>(vecs.data(), Eigen::Index(n), Eigen::Index(n));
        return e;
      }
    } catch (const std::exception&) {
      // cache miss; fall through to the solve
    }
  }

  const double h = domain.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const int nn = domain.points_per_axis;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto idx = domain.unflatten(i);
    double diag = 2.0 * domain.dim * inv_h2;
    if (spec.potential) diag += (*spec.potential)[i];
    A(Eigen::Index(i), Eigen::Index(i)) += diag;
    for (int a = 0; a < domain.dim; ++a) {
      for (int step : {-1, 1}) {
        auto nb = idx;
        nb[a] += step;
        if (domain.boundary == Boundary::Periodic) {
          nb[a] = (nb[a] + nn) % nn;
        } else if (nb[a] < 0 || nb[a] >= nn) {
          continue;  // zero outside the box
        }
        A(Eigen::Index(i), Eigen::Index(domain.flatten(nb))) += -inv_h2;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-solver failure");
  e.eigvals_ = solver.eigenvalues();
  // Grid-orthonormal: h^dim * Phi^T Phi = I.
  e.eigvecs_ = solver.eigenvectors() / std::sqrt(domain.cell_measure());

  if (!cache_base.empty()) {
    try {
      write_f64_array({e.eigvals_.data(), n}, cache_base + ".vals.tmp");
      write_f64_array({e.eigvecs_.data(), n * n}, cache_base + ".vecs.tmp");
      std::filesystem::rename(cache_base + ".vals.tmp", cache_base + ".vals");
      std::filesystem::rename(cache_base + ".vecs.tmp", cache_base + ".vecs");
    } catch (const std::exception&) {
      // cache write failures are non-fatal
    }
  }
  return e;
}

double OperatorEngine::min_eigenvalue() const {
  if (fourier_) return 0.0;
  return eigvals_(0);
}

const Eigen::VectorXd& OperatorEngine::eigenvalues() const {
  if (fourier_) throw std::logic_error("eigenvalues(): engine is on the Fourier route");
  return eigvals_;
}

const Eigen::MatrixXd& OperatorEngine::eigenvectors() const {
  if (fourier_) throw std::logic_error("eigenvectors(): engine is on the Fourier route");
  return eigvecs_;
}

Eigen::VectorXd OperatorEngine::analyze(const GridFunction& f) const {
  if (fourier_) throw std::logic_error("analyze(): engine is on the Fourier route");
  Eigen::Map<const Eigen::VectorXd> v(f.values().data(), Eigen::Index(f.size()));
  return domain_.cell_measure() * (eigvecs_.transpose() * v);
}

GridFunction OperatorEngine::eigenfunction(int j) const {
  if (fourier_) throw std::logic_error("eigenfunction(): engine is on the Fourier route");
  GridFunction f(domain_);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = eigvecs_(Eigen::Index(i), j);
  return f;
}

std::vector<double> OperatorEngine::fourier_multipliers() const {
  if (!fourier_) throw std::logic_error("fourier_multipliers(): engine is on the eigen route");
  auto m = mult_;
  std::sort(m.begin(), m.end());
  return m;
}

GridFunction OperatorEngine::apply_weight(Weight w, double t, const GridFunction& f) const {
  if (!(f.domain() == domain_)) throw std::invalid_argument("apply: domain mismatch");

  const auto weight_of = [&](double mu) -> double {
    switch (w) {
      case Weight::Heat:
        return std::exp(-t * mu);
      case Weight::Poisson:
        return std::exp(-t * std::sqrt(std::max(mu, 0.0)));
      case Weight::PoissonDt: {
        double s = std::sqrt(std::max(mu, 0.0));
        return -s * std::exp(-t * s);
      }
      case Weight::Generator:
        return mu;
    }
    return 0.0;
  };

  GridFunction out(domain_);
  if (fourier_) {
    std::vector<double> rbuf(plans_->n_real);
    std::vector<double> cbuf(2 * plans_->n_cplx);
    std::memcpy(rbuf.data(), f.values().data(), plans_->n_real * sizeof(double));
    auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
    fftw_execute_dft_r2c(plans_->plans.fwd, rbuf.data(), c);
    for (std::size_t b = 0; b < plans_->n_cplx; ++b) {
      double wb = weight_of(mult_[b]);
      c[b][0] *= wb;
      c[b][1] *= wb;
    }
    fftw_execute_dft_c2r(plans_->plans.bwd, c, rbuf.data());
    const double scale = 1.0 / double(plans_->n_real);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rbuf[i] * scale;
  } else {
    Eigen::VectorXd a = analyze(f);
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) *= weight_of(eigvals_(j));
    Eigen::VectorXd v = eigvecs_ * a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v(Eigen::Index(i));
  }
  out.require_finite("semigroup apply");
  return out;
}

GridFunction OperatorEngine::heat_apply(double t, const GridFunction& f) const {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_apply: t must be nonnegative");
  if (t == 0.0) return f;
  return apply_weight(Weight::Heat, t, f);
}

GridFunction OperatorEngine::poisson_apply(double t, const GridFunction& f) const {
  if (!(t >= 0.0)) throw std::invalid_argument("poisson_apply: t must be nonnegative");
  if (t == 0.0) return f;
  return apply_weight(Weight::Poisson, t, f);
}

GridFunction OperatorEngine::semigroup_apply(double t, const GridFunction& f) const {
  return spec_->order_m == 1.0 ? poisson_apply(t, f) : heat_apply(t, f);
}

double OperatorEngine::time_for_radius(double r) const {
  return spec_->order_m == 1.0 ? r : std::pow(r, spec_->order_m);
}

GridFunction OperatorEngine::poisson_dt_apply(double t, const GridFunction& f) const {
  if (!(t >= 0.0)) throw std::invalid_argument("poisson_dt_apply: t must be nonnegative");
  return apply_weight(Weight::PoissonDt, t, f);
}

GridFunction OperatorEngine::stencil_apply(const GridFunction& f) const {
  const double inv_h2 = 1.0 / (domain_.spacing() * domain_.spacing());
  const int nn = domain_.points_per_axis;
  GridFunction out(domain_);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = domain_.unflatten(i);
    double acc = 2.0 * domain_.dim * f[i];
    for (int a = 0; a < domain_.dim; ++a) {
      for (int step : {-1, 1}) {
        auto nb = idx;
        nb[a] += step;
        if (domain_.boundary == Boundary::Periodic) {
          nb[a] = (nb[a] + nn) % nn;
        } else if (nb[a] < 0 || nb[a] >= nn) {
          continue;
        }
        acc -= f[domain_.flatten(nb)];
      }
    }
    out[i] = acc * inv_h2;
    if (spec_->potential) out[i] += (*spec_->potential)[i] * f[i];
  }
  return out;
}

GridFunction OperatorEngine::apply_generator(const GridFunction& f) const {
  if (fourier_) return apply_weight(Weight::Generator, 0.0, f);
  auto out = stencil_apply(f);
  out.require_finite("apply_generator");
  return out;
}

std::vector<GridFunction> OperatorEngine::apply_many(SemigroupKind kind,
                                                     std::span<const double> times,
                                                     const GridFunction& f, Exec exec) const {
  const Weight w = kind == SemigroupKind::Heat ? Weight::Heat : Weight::Poisson;
  std::vector<GridFunction> out(times.size(), GridFunction(domain_));

  if (!fourier_) {
    const Eigen::VectorXd a = analyze(f);
    const std::int64_t count = std::int64_t(times.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t k = 0; k < count; ++k) {
      double t = times[std::size_t(k)];
      if (t == 0.0) {
        out[std::size_t(k)] = f;
        continue;
      }
      Eigen::VectorXd damped = a;
      for (Eigen::Index j = 0; j < damped.size(); ++j) {
        double mu = eigvals_(j);
        damped(j) *= (w == Weight::Heat) ? std::exp(-t * mu)
                                         : std::exp(-t * std::sqrt(std::max(mu, 0.0)));
      }
      Eigen::VectorXd v = eigvecs_ * damped;
      auto& g = out[std::size_t(k)];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = v(Eigen::Index(i));
    }
  } else {
    std::vector<double> rbuf(plans_->n_real);
    std::vector<double> base(2 * plans_->n_cplx);
    std::memcpy(rbuf.data(), f.values().data(), plans_->n_real * sizeof(double));
    fftw_execute_dft_r2c(plans_->plans.fwd, rbuf.data(),
                         reinterpret_cast<fftw_complex*>(base.data()));
    const double scale = 1.0 / double(plans_->n_real);
    const std::int64_t count = std::int64_t(times.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t k = 0; k < count; ++k) {
      double t = times[std::size_t(k)];
      if (t == 0.0) {
        out[std::size_t(k)] = f;
        continue;
      }
      std::vector<double> cb = base;
      auto* c = reinterpret_cast<fftw_complex*>(cb.data());
      for (std::size_t b = 0; b < plans_->n_cplx; ++b) {
        double mu = mult_[b];
        double wb = (w == Weight::Heat) ? std::exp(-t * mu)
                                        : std::exp(-t * std::sqrt(std::max(mu, 0.0)));
        c[b][0] *= wb;
        c[b][1] *= wb;
      }
      std::vector<double> rb(plans_->n_real);
      fftw_execute_dft_c2r(plans_->plans.bwd, c, rb.data());
      auto& g = out[std::size_t(k)];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = rb[i] * scale;
    }
  }
  for (auto& g : out) g.require_finite("apply_many");
  return out;
}

GridFunction OperatorEngine::poisson_via_subordination(double t, const GridFunction& f, int nodes,
                                                       bool check_convergence) const {
  if (nodes < 50) throw std::invalid_argument("poisson_via_subordination: nodes must be >= 50");
  if (!(t >= 0.0)) throw std::invalid_argument("poisson_via_subordination: t must be nonnegative");
  if (t == 0.0) return f;

  // e^{-t sqrt(mu)} = (2/sqrt(pi)) * int_0^inf e^{-w^2} e^{-(t^2/(4 w^2)) mu} dw,
  // midpoint rule on [0, W]; the integrand vanishes to all orders at both
  // ends. W = 6 keeps the truncation below roundoff while concentrating
  // nodes near the w -> 0 singularity that limits the convergence rate.
  const auto factor_at = [&](double mu, int n_nodes) -> double {
    const double W = 6.0;
    const double dw = W / double(n_nodes);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
      double wi = (double(i) + 0.5) * dw;
      double s = t * t / (4.0 * wi * wi);
      acc += std::exp(-wi * wi) * std::exp(-s * mu);
    }
    return 2.0 / std::sqrt(kPi) * dw * acc;
  };

  const auto run = [&](int n_nodes) -> GridFunction {
    GridFunction out(domain_);
    if (fourier_) {
      std::vector<double> rbuf(plans_->n_real);
      std::vector<double> cbuf(2 * plans_->n_cplx);
      std::memcpy(rbuf.data(), f.values().data(), plans_->n_real * sizeof(double));
      auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
      fftw_execute_dft_r2c(plans_->plans.fwd, rbuf.data(), c);
      for (std::size_t b = 0; b < plans_->n_cplx; ++b) {
        double wb = factor_at(mult_[b], n_nodes);
        c[b][0] *= wb;
        c[b][1] *= wb;
      }
      fftw_execute_dft_c2r(plans_->plans.bwd, c, rbuf.data());
      const double scale = 1.0 / double(plans_->n_real);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = rbuf[i] * scale;
    } else {
      Eigen::VectorXd a = analyze(f);
      for (Eigen::Index j = 0; j < a.size(); ++j) a(j) *= factor_at(eigvals_(j), n_nodes);
      Eigen::VectorXd v = eigvecs_ * a;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = v(Eigen::Index(i));
    }
    return out;
  };

  GridFunction out = run(nodes);
  if (check_convergence) {
    GridFunction refined = run(2 * nodes);
    if (sup_diff(out, refined) > 1e-6)
      throw std::runtime_error("subordination quadrature did not converge under node doubling");
  }
  out.require_finite("poisson_via_subordination");
  return out;
}

GridFunction OperatorEngine::kernel_column(double t, std::size_t y_flat, SemigroupKind kind) const {
  GridFunction delta(domain_);
  delta[y_flat] = 1.0 / domain_.cell_measure();
  return kind == SemigroupKind::Heat ? heat_apply(t, delta) : poisson_apply(t, delta);
}

GridFunction gradient_component(const GridFunction& f, int axis) {
  const GridDomain& d = f.domain();
  if (axis < 0 || axis >= d.dim) throw std::invalid_argument("gradient_component: bad axis");
  GridFunction out(d);

  if (d.boundary == Boundary::Periodic) {
    // Spectral derivative; the Nyquist mode is mapped to zero.
    PlanPair plans = get_plans(d.dim, d.points_per_axis);
    const std::size_t n_real = d.point_count();
    const std::size_t n_cplx = complex_bin_count(d);
    std::vector<double> rbuf(n_real);
    std::vector<double> cbuf(2 * n_cplx);
    std::memcpy(rbuf.data(), f.values().data(), n_real * sizeof(double));
    auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
    fftw_execute_dft_r2c(plans.fwd, rbuf.data(), c);
    for (std::size_t b = 0; b < n_cplx; ++b) {
      int k[3];
      bin_frequencies(d, b, k);
      double xi = (k[axis] == d.points_per_axis / 2) ? 0.0 : kPi * double(k[axis]) / d.half_width;
      double re = c[b][0], im = c[b][1];
      c[b][0] = -xi * im;
      c[b][1] = xi * re;
    }
    fftw_execute_dft_c2r(plans.bwd, c, rbuf.data());
    const double scale = 1.0 / double(n_real);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rbuf[i] * scale;
  } else {
    const int nn = d.points_per_axis;
    const double inv_2h = 0.5 / d.spacing();
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto idx = d.unflatten(i);
      double right = 0.0, left = 0.0;
      if (idx[axis] + 1 < nn) {
        auto nb = idx;
        nb[axis] += 1;
        right = f[d.flatten(nb)];
      }
      if (idx[axis] - 1 >= 0) {
        auto nb = idx;
        nb[axis] -= 1;
        left = f[d.flatten(nb)];
      }
      out[i] = (right - left) * inv_2h;
    }
  }
  out.require_finite("gradient_component");
  return out;
}

namespace {

double bound_value(const KernelBoundParams& p, KernelBoundKind kind, int dim, double t, double d) {
  if (kind == KernelBoundKind::HeatDecay) {
    double tm = std::pow(t, 1.0 / p.m);
    return p.C * std::pow(t, -double(dim) / p.m) * std::pow(1.0 + d / tm, -(double(dim) + p.epsilon));
  }
  return p.C * t / std::pow(t * t + d * d, 0.5 * (dim + 1));
}

}  // namespace

KernelBoundReport check_kernel_bound(const OperatorEngine& engine, std::span<const double> t_list,
                                     const KernelBoundParams& params, KernelBoundKind kind,
                                     int y_stride, Exec exec, double max_distance) {
  const GridDomain& d = engine.domain();
  const double h = d.spacing();
  const double t_lo = 4.0 * h * h;
  const double t_hi = std::pow(d.half_width / 4.0, params.m);
  for (double t : t_list)
    if (!(t >= t_lo && t <= t_hi))
      throw std::invalid_argument("check_kernel_bound: t outside the resolved range");

  if (y_stride <= 0) y_stride = std::max(1, d.points_per_axis / 16);
  std::vector<std::size_t> ys;
  {
    std::array<int, 3> idx{0, 0, 0};
    const auto loops = [&](auto&& self, int axis) -> void {
      if (axis == d.dim) {
        ys.push_back(d.flatten(idx));
        return;
      }
      for (idx[axis] = 0; idx[axis] < d.points_per_axis; idx[axis] += y_stride) self(self, axis + 1);
    };
    loops(loops, 0);
  }

  struct PairResult {
    double ratio = 0.0;
    std::size_t x = 0;
  };
  const std::size_t n_pairs = t_list.size() * ys.size();
  std::vector<PairResult> results(n_pairs);

#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (std::int64_t pi = 0; pi < std::int64_t(n_pairs); ++pi) {
    const std::size_t ti = std::size_t(pi) / ys.size();
    const std::size_t yi = std::size_t(pi) % ys.size();
    const double t = t_list[ti];
    const std::size_t y = ys[yi];
    const auto ypt = d.point(y);

    std::vector<double> value(d.point_count(), 0.0);
    switch (kind) {
      case KernelBoundKind::HeatDecay: {
        auto col = engine.kernel_column(t, y, SemigroupKind::Heat);
        for (std::size_t i = 0; i < col.size(); ++i) value[i] = std::abs(col[i]);
        break;
      }
      case KernelBoundKind::PoissonShape: {
        auto col = engine.kernel_column(t, y, SemigroupKind::Poisson);
        for (std::size_t i = 0; i < col.size(); ++i) value[i] = std::abs(col[i]);
        break;
      }
      case KernelBoundKind::PoissonDtShape: {
        const double dt = t / 100.0;
        auto hi = engine.kernel_column(t + dt, y, SemigroupKind::Poisson);
        auto lo = engine.kernel_column(t - dt, y, SemigroupKind::Poisson);
        for (std::size_t i = 0; i < hi.size(); ++i)
          value[i] = std::abs(t * (hi[i] - lo[i]) / (2.0 * dt));
        break;
      }
      case KernelBoundKind::PoissonGradShape: {
        auto col = engine.kernel_column(t, y, SemigroupKind::Poisson);
        std::vector<GridFunction> grads;
        for (int a = 0; a < d.dim; ++a) grads.push_back(gradient_component(col, a));
        for (std::size_t i = 0; i < col.size(); ++i) {
          double s = 0.0;
          for (int a = 0; a < d.dim; ++a) s += grads[std::size_t(a)][i] * grads[std::size_t(a)][i];
          value[i] = t * std::sqrt(s);
        }
        break;
      }
    }

    PairResult best;
    for (std::size_t i = 0; i < value.size(); ++i) {
      double dist = d.distance(d.point(i), ypt);
      if (max_distance > 0.0 && dist > max_distance) continue;
      double ratio = value[i] / bound_value(params, kind, d.dim, t, dist);
      if (ratio > best.ratio) {
        best.ratio = ratio;
        best.x = i;
      }
    }
    results[std::size_t(pi)] = best;
  }

  KernelBoundReport report;
  report.per_time.resize(t_list.size());
  for (std::size_t ti = 0; ti < t_list.size(); ++ti)
    report.per_time[ti] = {t_list[ti], 0.0};
  for (std::size_t pi = 0; pi < n_pairs; ++pi) {
    const std::size_t ti = pi / ys.size();
    const std::size_t yi = pi % ys.size();
    report.per_time[ti].max_ratio = std::max(report.per_time[ti].max_ratio, results[pi].ratio);
    if (results[pi].ratio > report.max_ratio) {
      report.max_ratio = results[pi].ratio;
      report.argmax_t = t_list[ti];
      report.argmax_x = results[pi].x;
      report.argmax_y = ys[yi];
    }
  }
  report.pass = report.max_ratio <= 1.0;
  return report;
}

double fit_poisson_constant(const OperatorEngine& engine, std::span<const double> t_list,
                            double window) {
  const GridDomain& d = engine.domain();
  std::array<int, 3> ci{0, 0, 0};
  for (int a = 0; a < d.dim; ++a) ci[a] = d.points_per_axis / 2;
  const std::size_t y = d.flatten(ci);
  const auto ypt = d.point(y);

  double num = 0.0, den = 0.0;
  for (double t : t_list) {
    auto col = engine.kernel_column(t, y, SemigroupKind::Poisson);
    for (std::size_t i = 0; i < col.size(); ++i) {
      double dist = d.distance(d.point(i), ypt);
      if (dist > window) continue;
      double q = t / std::pow(t * t + dist * dist, 0.5 * (d.dim + 1));
      num += col[i] * q;
      den += q * q;
    }
  }
  if (den == 0.0) throw std::runtime_error("fit_poisson_constant: empty fit window");
  return num / den;
}

}  // namespace campanato
