#include "campanato/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace campanato {

HeightGrid::HeightGrid(const GridDomain& domain, double t_min, double t_max, int count) {
  const double h = domain.spacing();
  if (!(t_min >= 2.0 * h * (1.0 - 1e-12)))
    throw std::invalid_argument("HeightGrid: t_min must be at least 2h");
  if (!(t_max <= 0.5 * domain.half_width * (1.0 + 1e-12)))
    throw std::invalid_argument("HeightGrid: t_max must not exceed R/2");
  if (!(t_min < t_max)) throw std::invalid_argument("HeightGrid: t_min must be below t_max");
  if (count < 2) throw std::invalid_argument("HeightGrid: need at least two heights");

  log_step_ = std::log(t_max / t_min) / double(count - 1);
  heights_.resize(std::size_t(count));
  for (int j = 0; j < count; ++j)
    heights_[std::size_t(j)] = t_min * std::exp(log_step_ * double(j));
  heights_.front() = t_min;
  heights_.back() = t_max;
}

SolutionField::SolutionField(const GridDomain& domain, HeightGrid heights,
                             std::vector<GridFunction> slices, FieldProvenance provenance,
                             std::optional<GridFunction> boundary)
    : domain_(domain),
      heights_(std::move(heights)),
      slices_(std::move(slices)),
      provenance_(provenance),
      boundary_(std::move(boundary)) {
  if (int(slices_.size()) != heights_.count())
    throw std::invalid_argument("SolutionField: one slice per height required");
  for (const auto& s : slices_) {
    if (!(s.domain() == domain_)) throw std::invalid_argument("SolutionField: domain mismatch");
    s.require_finite("SolutionField slice");
  }
}

GridFunction SolutionField::interpolate_slice(double t) const {
  const auto& ts = heights_.heights();
  if (!(t >= ts.front() * (1.0 - 1e-12) && t <= ts.back() * (1.0 + 1e-12)))
    throw std::invalid_argument("interpolate_slice: height outside the grid");
  double pos = std::log(t / ts.front()) / heights_.log_step();
  int j0 = std::clamp(int(std::floor(pos)), 0, heights_.count() - 2);
  double w = pos - double(j0);
  if (std::abs(w) < 1e-9) return slices_[std::size_t(j0)];
  if (std::abs(w - 1.0) < 1e-9) return slices_[std::size_t(j0 + 1)];
  GridFunction out(domain_);
  const auto& a = slices_[std::size_t(j0)];
  const auto& b = slices_[std::size_t(j0 + 1)];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  return out;
}

SolutionField poisson_extension(const OperatorEngine& engine, const GridFunction& f,
                                const HeightGrid& heights, Exec exec) {
  if (!(f.domain() == engine.domain()))
    throw std::invalid_argument("poisson_extension: domain mismatch");
  auto slices = engine.apply_many(SemigroupKind::Poisson, heights.heights(), f, exec);
  return SolutionField(engine.domain(), heights, std::move(slices), FieldProvenance::Extended, f);
}

double pde_residual(const SolutionField& field, const OperatorEngine& engine) {
  const int M = field.slice_count();
  if (M < 5) throw std::invalid_argument("pde_residual: need at least 5 heights");
  if (!(field.domain() == engine.domain()))
    throw std::invalid_argument("pde_residual: domain mismatch");

  const double dtau = field.heights().log_step();
  const auto& ts = field.heights().heights();

  double max_residual = 0.0;
  double scale = 0.0;
  for (int j = 1; j + 1 < M; ++j) {
    const auto& um = field.slice(j - 1);
    const auto& u0 = field.slice(j);
    const auto& up = field.slice(j + 1);
    const GridFunction Lu = engine.apply_generator(u0);
    const double t = ts[std::size_t(j)];
    double res_j = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      // u_tt = (u_tautau - u_tau) / t^2 on the uniform log grid
      double u_tau = (up[i] - um[i]) / (2.0 * dtau);
      double u_tautau = (up[i] - 2.0 * u0[i] + um[i]) / (dtau * dtau);
      double u_tt = (u_tautau - u_tau) / (t * t);
      res_j = std::max(res_j, std::abs(-u_tt + Lu[i]));
    }
    max_residual = std::max(max_residual, res_j);
    scale = std::max(scale, Lu.sup_norm());
  }
  if (scale == 0.0) return max_residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return max_residual / scale;
}

namespace {

// Pointwise |grad u|^2 per slice: spatial components by the grid derivative,
// d_t by central differences in log t (2nd-order one-sided at the ends).
std::vector<std::vector<double>> gradient_squared_slices(const SolutionField& field) {
  const int M = field.slice_count();
  const GridDomain& d = field.domain();
  const double dtau = field.heights().log_step();
  const auto& ts = field.heights().heights();

  std::vector<std::vector<double>> gsq(std::size_t(M),
                                       std::vector<double>(d.point_count(), 0.0));
  for (int j = 0; j < M; ++j) {
    auto& out = gsq[std::size_t(j)];
    for (int a = 0; a < d.dim; ++a) {
      GridFunction g = gradient_component(field.slice(j), a);
      for (std::size_t i = 0; i < g.size(); ++i) out[i] += g[i] * g[i];
    }
    const double t = ts[std::size_t(j)];
    for (std::size_t i = 0; i < d.point_count(); ++i) {
      double u_tau;
      if (j == 0)
        u_tau = (-3.0 * field.slice(0)[i] + 4.0 * field.slice(1)[i] - field.slice(2)[i]) /
                (2.0 * dtau);
      else if (j == M - 1)
        u_tau = (3.0 * field.slice(M - 1)[i] - 4.0 * field.slice(M - 2)[i] +
                 field.slice(M - 3)[i]) /
                (2.0 * dtau);
      else
        u_tau = (field.slice(j + 1)[i] - field.slice(j - 1)[i]) / (2.0 * dtau);
      double u_t = u_tau / t;
      out[i] += u_t * u_t;
    }
  }
  return gsq;
}

// Trapezoid of t * S(t) dt over [t_min, min(r, t_max)] in log coordinates,
// with a log-linear partial segment up to r when it lands between heights.
// S_j is the per-height ball sum already scaled by the cell measure.
double resolved_time_integral(const std::vector<double>& S, const std::vector<double>& ts,
                              double dtau, double r, int* heights_used, bool* truncated_top) {
  const int M = int(ts.size());
  int J = -1;
  for (int j = 0; j < M; ++j)
    if (ts[std::size_t(j)] <= r) J = j;
  *heights_used = J + 1;
  *truncated_top = r > ts.back();
  if (J < 0) return 0.0;

  auto F = [&](int j) { return ts[std::size_t(j)] * ts[std::size_t(j)] * S[std::size_t(j)]; };
  double acc = 0.0;
  for (int j = 0; j + 1 <= J; ++j) acc += 0.5 * dtau * (F(j) + F(j + 1));
  if (J + 1 < M && ts[std::size_t(J)] < r) {
    double frac = std::log(r / ts[std::size_t(J)]) / dtau;
    double f_end = F(J) + (F(J + 1) - F(J)) * frac;
    acc += 0.5 * frac * dtau * (F(J) + f_end);
  }
  return acc;
}

}  // namespace

CarlesonValue carleson_functional(const SolutionField& field, const NormParams& params,
                                  const BallFamily& family, Exec exec) {
  const GridDomain& d = field.domain();
  validate_norm_params(params, d.dim);
  if (!(d == family.domain())) throw std::invalid_argument("carleson_functional: domain mismatch");

  const auto gsq = gradient_squared_slices(field);
  const auto& ts = field.heights().heights();
  const double dtau = field.heights().log_step();
  const double measure = d.cell_measure();

  CarlesonValue out;
  const auto& centers = family.centers();
  const auto& radii = family.radii();
  std::vector<CarlesonBallRow> rows(centers.size());

  for (std::size_t rj = 0; rj < radii.size(); ++rj) {
    const double r = radii[rj];
    int below = 0;
    for (double t : ts)
      if (t <= r) ++below;
    if (below < 4) {
      out.skipped += centers.size();
      continue;
    }

    const std::int64_t nc = std::int64_t(centers.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t ci = 0; ci < nc; ++ci) {
      CarlesonBallRow row;
      row.ball = family.ball(std::size_t(ci), rj);
      std::vector<double> S(ts.size(), 0.0);
      double first_sup = 0.0;
      std::size_t count = 0;
      for_each_ball_node(d, row.ball, [&](std::size_t i) {
        for (std::size_t j = 0; j < ts.size(); ++j) S[j] += gsq[j][i];
        first_sup = std::max(first_sup, gsq[0][i]);
        ++count;
      });
      for (auto& s : S) s *= measure;
      const double scale = std::pow(r, -params.lambda);
      row.value = scale * resolved_time_integral(S, ts, dtau, r, &row.heights_used,
                                                 &row.truncated_top);
      row.collar_bound = scale * ts.front() * ts.front() * first_sup * double(count) * measure;
      rows[std::size_t(ci)] = row;
    }

    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      out.table.push_back(rows[ci]);
      if (rows[ci].value > out.value) {
        out.value = rows[ci].value;
        out.argmax = rows[ci].ball;
        out.collar_bound = rows[ci].collar_bound;
      }
    }
  }
  if (out.table.empty()) throw std::runtime_error("carleson_functional: every ball was skipped");
  return out;
}

NormValue square_function_norm(const OperatorEngine& engine, const GridFunction& f,
                               const NormParams& params, const HeightGrid& heights,
                               const BallFamily& family, Exec exec) {
  const GridDomain& d = engine.domain();
  validate_norm_params(params, d.dim);
  if (!(f.domain() == d)) throw std::invalid_argument("square_function_norm: domain mismatch");
  if (!(d == family.domain()))
    throw std::invalid_argument("square_function_norm: family domain mismatch");

  const auto& ts = heights.heights();
  const double dtau = heights.log_step();
  const double measure = d.cell_measure();

  // |d_t e^{-t sqrt(L)} f|^2 per height, spectral coefficients.
  std::vector<std::vector<double>> wsq(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    GridFunction w = engine.poisson_dt_apply(ts[j], f);
    wsq[j].resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wsq[j][i] = w[i] * w[i];
  }

  NormValue out;
  const auto& centers = family.centers();
  const auto& radii = family.radii();
  std::vector<double> values(centers.size());
  bool any = false;

  for (std::size_t rj = 0; rj < radii.size(); ++rj) {
    const double r = radii[rj];
    int below = 0;
    for (double t : ts)
      if (t <= r) ++below;
    if (below < 4) continue;
    any = true;

    const std::int64_t nc = std::int64_t(centers.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
    for (std::int64_t ci = 0; ci < nc; ++ci) {
      Ball b = family.ball(std::size_t(ci), rj);
      std::vector<double> S(ts.size(), 0.0);
      for_each_ball_node(d, b, [&](std::size_t i) {
        for (std::size_t j = 0; j < ts.size(); ++j) S[j] += wsq[j][i];
      });
      for (auto& s : S) s *= measure;
      int used = 0;
      bool trunc = false;
      values[std::size_t(ci)] =
          std::pow(r, -params.lambda) * resolved_time_integral(S, ts, dtau, r, &used, &trunc);
    }

    double radius_max = 0.0;
    std::size_t radius_arg = 0;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (values[ci] > radius_max) {
        radius_max = values[ci];
        radius_arg = ci;
      }
    }
    out.profile.push_back({r, radius_max});
    if (radius_max > out.raw_max) {
      out.raw_max = radius_max;
      out.argmax_ball = family.ball(radius_arg, rj);
    }
  }
  if (!any) throw std::runtime_error("square_function_norm: every ball was skipped");
  out.value = out.raw_max;
  return out;
}

TraceDiagnostics trace_recover(const SolutionField& field, const OperatorEngine& engine,
                               const NormParams& params, std::span<const double> k_schedule,
                               double consistency_tol, double inner_fraction) {
  const GridDomain& d = field.domain();
  validate_norm_params(params, d.dim);
  if (!(d == engine.domain())) throw std::invalid_argument("trace_recover: domain mismatch");
  if (k_schedule.size() < 2)
    throw std::invalid_argument("trace_recover: k_schedule needs at least two entries");
  for (std::size_t i = 0; i + 1 < k_schedule.size(); ++i)
    if (!(k_schedule[i] > 0.0 && k_schedule[i + 1] > k_schedule[i]))
      throw std::invalid_argument("trace_recover: k_schedule must be positive and increasing");

  const double bound = inner_fraction * d.half_width;
  auto inner_sup_diff = [&](const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto x = d.point(i);
      bool inner = true;
      for (int ax = 0; ax < d.dim; ++ax) inner = inner && std::abs(x[ax]) <= bound;
      if (inner) m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
  };

  TraceDiagnostics diag(d);
  diag.k_schedule.assign(k_schedule.begin(), k_schedule.end());

  const BallFamily family = BallFamily::make_default(d);
  std::vector<GridFunction> fks;
  fks.reserve(k_schedule.size());
  for (double k : k_schedule) {
    GridFunction fk = field.interpolate_slice(1.0 / k);
    diag.fk_morrey_norms.push_back(morrey_norm(fk, params, family).value);
    fks.push_back(std::move(fk));
  }

  bool growing = true;
  for (std::size_t i = 0; i + 1 < diag.fk_morrey_norms.size(); ++i)
    growing = growing && diag.fk_morrey_norms[i + 1] > diag.fk_morrey_norms[i];
  if (growing && diag.fk_morrey_norms.back() > 2.0 * diag.fk_morrey_norms.front())
    throw std::runtime_error("no uniform trace bound: f_k Morrey norms grow across the schedule");

  for (std::size_t i = 0; i + 1 < fks.size(); ++i)
    diag.cauchy_increments.push_back(inner_sup_diff(fks[i + 1], fks[i]));

  diag.recovered = fks.back();

  const auto& ts = field.heights().heights();
  for (int j = 0; j < field.slice_count(); ++j) {
    GridFunction rebuilt = engine.poisson_apply(ts[std::size_t(j)], diag.recovered);
    diag.reconstruction_error =
        std::max(diag.reconstruction_error, inner_sup_diff(field.slice(j), rebuilt));
  }

  double lo = diag.fk_morrey_norms.front(), hi = lo;
  for (double v : diag.fk_morrey_norms) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  diag.norms_uniform = lo > 0.0 ? (hi / lo - 1.0 <= 0.1) : (hi == 0.0);
  diag.extension_consistent =
      diag.reconstruction_error <= consistency_tol * (1.0 + diag.recovered.sup_norm());
  return diag;
}

void write_solution_field(const SolutionField& field, const std::string& base) {
  const GridDomain& d = field.domain();
  std::ofstream meta(base + ".meta", std::ios::trunc);
  if (!meta) throw std::runtime_error("cannot open for writing: " + base + ".meta");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d.half_width);
  meta << "dim = " << d.dim << "\n"
       << "half_width = " << buf << "\n"
       << "points_per_axis = " << d.points_per_axis << "\n"
       << "boundary = " << to_string(d.boundary) << "\n"
       << "provenance = "
       << (field.provenance() == FieldProvenance::Extended ? "extended" : "external") << "\n"
       << "slices = " << field.slice_count() << "\n";
  for (int j = 0; j < field.slice_count(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", field.heights().heights()[std::size_t(j)]);
    meta << "height_" << j << " = " << buf << "\n";
    write_f64_array(field.slice(j).values(), base + ".slice" + std::to_string(j) + ".f64");
  }
  if (field.boundary())
    write_f64_array(field.boundary()->values(), base + ".boundary.f64");
}

SolutionField read_solution_field(const std::string& base) {
  std::ifstream meta(base + ".meta");
  if (!meta) throw std::runtime_error("missing field header: " + base + ".meta");
  int dim = 0, n = 0, count = 0;
  double half_width = 0.0;
  std::string boundary, provenance;
  std::vector<double> heights;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    ls >> key >> eq;
    if (key == "dim") ls >> dim;
    else if (key == "half_width") ls >> half_width;
    else if (key == "points_per_axis") ls >> n;
    else if (key == "boundary") ls >> boundary;
    else if (key == "provenance") ls >> provenance;
    else if (key == "slices") ls >> count;
    else if (key.rfind("height_", 0) == 0) {
      double t = 0.0;
      ls >> t;
      heights.push_back(t);
    }
  }
  GridDomain domain(dim, half_width, n, boundary_from_string(boundary));
  if (int(heights.size()) != count || count < 2)
    throw std::runtime_error("inconsistent field header: " + base + ".meta");
  HeightGrid hg(domain, heights.front(), heights.back(), count);

  std::vector<GridFunction> slices;
  for (int j = 0; j < count; ++j)
    slices.emplace_back(domain, read_f64_array(base + ".slice" + std::to_string(j) + ".f64"));

  std::optional<GridFunction> boundary_fn;
  std::ifstream probe(base + ".boundary.f64", std::ios::binary);
  if (probe) {
    probe.close();
    boundary_fn = GridFunction(domain, read_f64_array(base + ".boundary.f64"));
  }
  auto provenance_kind =
      provenance == "extended" ? FieldProvenance::Extended : FieldProvenance::External;
  return SolutionField(domain, hg, std::move(slices), provenance_kind, std::move(boundary_fn));
}

}  // namespace campanato
