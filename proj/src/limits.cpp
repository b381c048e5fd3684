#include "campanato/limits.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace campanato {

std::vector<double> geometric_schedule(double t0, double ratio, int count) {
  if (!(t0 > 0.0) || !(ratio > 1.0) || count < 2)
    throw std::invalid_argument("geometric_schedule: need t0 > 0, ratio > 1, count >= 2");
  std::vector<double> t(static_cast<std::size_t>(count));
  t[0] = t0;
  for (int j = 1; j < count; ++j) t[std::size_t(j)] = t[std::size_t(j - 1)] * ratio;
  return t;
}

namespace {

void require_geometric(std::span<const double> t) {
  if (t.size() < 2) throw std::invalid_argument("schedule needs at least two times");
  const double ratio = t[1] / t[0];
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (!(t[j] > 0.0) || !(t[j + 1] > t[j]))
      throw std::invalid_argument("schedule must be positive and increasing");
    if (std::abs(t[j + 1] / t[j] / ratio - 1.0) > 1e-9)
      throw std::invalid_argument("schedule must be geometric");
  }
}

struct FitPoint {
  double log_t;
  double log_d;
};

DecayFit fit_log_log(const std::vector<FitPoint>& pts) {
  if (pts.size() < 4)
    throw std::runtime_error("insufficient dynamic range: fewer than 4 usable fit points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    sx += p.log_t;
    sy += p.log_d;
    sxx += p.log_t * p.log_t;
    sxy += p.log_t * p.log_d;
  }
  const double n = double(pts.size());
  DecayFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points_used = int(pts.size());
  for (const auto& p : pts)
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(p.log_d - (fit.intercept + fit.slope * p.log_t)));
  fit.power_law = fit.max_residual <= 0.1;
  return fit;
}

// Times where the deviation has sunk into roundoff are excluded from fits.
bool above_noise(double dev, double scale) {
  return dev > 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
}

}  // namespace

LimitDiagnostics sigma_limit(const OperatorEngine& engine, const GridFunction& f,
                             std::span<const double> t_schedule, double tol) {
  require_geometric(t_schedule);
  const double t_final_min = std::pow(engine.domain().half_width / 2.0, engine.spec().order_m);
  if (!(t_schedule.back() >= t_final_min))
    throw std::invalid_argument("sigma_limit: final time must reach (R/2)^m");

  auto iterates = engine.apply_many(
      engine.spec().order_m == 1.0 ? SemigroupKind::Poisson : SemigroupKind::Heat, t_schedule, f);

  LimitDiagnostics diag(engine.domain());
  diag.t_schedule.assign(t_schedule.begin(), t_schedule.end());
  for (std::size_t j = 0; j + 1 < iterates.size(); ++j)
    diag.sup_deviations.push_back(sup_diff(iterates[j], iterates[j + 1]));

  diag.converged = true;
  const double slack = 1e-15 * (1.0 + f.sup_norm());
  for (std::size_t j = 0; j + 1 < diag.sup_deviations.size(); ++j) {
    if (diag.sup_deviations[j + 1] > diag.sup_deviations[j] + slack) {
      diag.converged = false;
      diag.offending_pair = {int(j), int(j + 1)};
      break;
    }
  }
  if (diag.converged && !(diag.sup_deviations.back() <= tol)) diag.converged = false;

  diag.limit = iterates.back();
  diag.limit_sup = diag.limit.sup_norm();
  return diag;
}

KernelMembership kernel_membership(const OperatorEngine& engine, const GridFunction& f,
                                   std::span<const double> t_list, double tol) {
  if (t_list.size() < 2 || !(t_list.back() / t_list.front() >= 100.0))
    throw std::invalid_argument("kernel_membership: t_list must span at least two decades");
  KernelMembership out;
  for (double t : t_list)
    out.max_deviation = std::max(out.max_deviation, sup_diff(engine.semigroup_apply(t, f), f));
  out.threshold = tol * (1.0 + f.sup_norm());
  out.member = out.max_deviation <= out.threshold;
  return out;
}

DecayFit check_semigroup_gap_decay(const OperatorEngine& engine, const GridFunction& f,
                                   const NormParams& params, double K,
                                   std::span<const double> t_grid) {
  validate_norm_params(params, engine.domain().dim);
  if (!(K > 1.0)) throw std::invalid_argument("check_semigroup_gap_decay: K must exceed 1");
  const double scale = f.sup_norm();
  std::vector<FitPoint> pts;
  for (double t : t_grid) {
    double dev = sup_diff(engine.semigroup_apply(t, f), engine.semigroup_apply(K * t, f));
    if (above_noise(dev, scale)) pts.push_back({std::log(t), std::log(dev)});
  }
  return fit_log_log(pts);
}

DecayFit check_linfty_bound(const OperatorEngine& engine, const GridFunction& f,
                            const NormParams& params, std::span<const double> t_grid) {
  validate_norm_params(params, engine.domain().dim);
  const double scale = f.sup_norm();
  std::vector<FitPoint> pts;
  for (double t : t_grid) {
    double sup = engine.semigroup_apply(t, f).sup_norm();
    if (above_noise(sup, scale)) pts.push_back({std::log(t), std::log(sup)});
  }
  return fit_log_log(pts);
}

double check_weighted_difference(const OperatorEngine& engine, const GridFunction& f,
                                 const NormParams& params, double t, double delta,
                                 const BallFamily& family) {
  validate_norm_params(params, engine.domain().dim);
  if (!(delta > 0.0)) throw std::invalid_argument("check_weighted_difference: delta must be > 0");
  const double normalizer = campanato_operator(f, engine, params, family).value;
  if (normalizer == 0.0)
    throw std::runtime_error("degenerate normalizer: f is a semigroup fixed point");

  const GridDomain& d = engine.domain();
  const GridFunction diff = engine.semigroup_apply(t, f) - f;
  const double tm = std::pow(t, 1.0 / params.m);
  double lhs = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    auto x = d.point(i);
    double r2 = 0.0;
    for (int a = 0; a < d.dim; ++a) r2 += x[a] * x[a];
    lhs += pow_abs(diff[i], params.p) *
           std::pow(tm + std::sqrt(r2), -(double(d.dim) + delta));
  }
  lhs *= d.cell_measure();

  const double rate =
      std::pow(t, -(double(d.dim) - params.lambda + delta) / params.m);
  return lhs / (rate * std::pow(normalizer, params.p));
}

}  // namespace campanato
