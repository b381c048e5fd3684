#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "campanato/grid.hpp"

using namespace campanato;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("domain validation and layout") {
  CHECK_THROWS_AS(GridDomain(0, 1.0, 8, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(GridDomain(4, 1.0, 8, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(GridDomain(1, -1.0, 8, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(GridDomain(1, 1.0, 7, Boundary::Periodic), std::invalid_argument);
  CHECK_THROWS_AS(GridDomain(3, 1.0, 1024, Boundary::Periodic), std::invalid_argument);

  GridDomain d(2, 2.0, 8, Boundary::Periodic);
  CHECK(d.spacing() == doctest::Approx(0.5));
  CHECK(d.point_count() == 64);
  CHECK(d.coord(0) == doctest::Approx(-2.0));
  CHECK(d.coord(4) == doctest::Approx(0.0));
  auto idx = d.unflatten(d.flatten({3, 5, 0}));
  CHECK(idx[0] == 3);
  CHECK(idx[1] == 5);
}

TEST_CASE("axis distance uses the min-image rule only on periodic domains") {
  GridDomain p(1, 1.0, 16, Boundary::Periodic);
  CHECK(std::abs(p.axis_distance(0.9, -0.9)) == doctest::Approx(0.2));
  GridDomain t(1, 1.0, 16, Boundary::TruncatedDirichlet);
  CHECK(t.axis_distance(0.9, -0.9) == doctest::Approx(1.8));
}

TEST_CASE("sample: constant cases and the non-finite error naming the node") {
  GridDomain d(1, 1.0, 64, Boundary::Periodic);
  GridFunction zero = sample(d, [](const std::array<double, 3>&) { return 0.0; });
  GridFunction one = sample(d, [](const std::array<double, 3>&) { return 1.0; });
  for (std::size_t i = 0; i < zero.size(); ++i) {
    CHECK(zero[i] == 0.0);
    CHECK(one[i] == 1.0);
  }
  CHECK_THROWS_WITH_AS(
      sample(d, [](const std::array<double, 3>& x) { return 1.0 / x[0]; }),
      doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("singular node takes the Gauss cell average") {
  GridDomain d(1, 1.0, 512, Boundary::Periodic);
  const double gamma = 0.25;
  auto expr = [gamma](const std::array<double, 3>& x) {
    return std::pow(std::abs(x[0]), -gamma);
  };
  GridFunction f = sample_regularized(d, expr);
  f.require_finite("test");

  // Exact cell average around the singular node is (h/2)^{-gamma}/(1-gamma).
  const double h = d.spacing();
  const double exact = std::pow(0.5 * h, -gamma) / (1.0 - gamma);
  const std::size_t center = d.flatten({256, 0, 0});
  CHECK(d.point(center)[0] == doctest::Approx(0.0));
  // The 16-point Gauss rule resolves the integrable singularity to a few
  // percent; that is the regularization's contract, not a quadrature claim.
  CHECK(f[center] == doctest::Approx(exact).epsilon(0.05));
  // Non-singular nodes are plain samples.
  CHECK(f[center + 1] == expr(d.point(center + 1)));
}

TEST_CASE("ball_lp_integral: zero, interval measure, bump vs dense-grid oracle") {
  GridDomain d(1, 1.0, 512, Boundary::Periodic);
  GridFunction zero(d);
  Ball b = make_ball(d, {0.0, 0.0, 0.0}, 0.5);
  CHECK(ball_lp_integral(zero, b, 2.0) == 0.0);

  GridFunction one = sample(d, [](const std::array<double, 3>&) { return 1.0; });
  for (double r : {0.25, 0.5, 0.8}) {
    Ball br = make_ball(d, {0.0, 0.0, 0.0}, r);
    CHECK(std::abs(ball_lp_integral(one, br, 1.0) - 2.0 * r) <= d.spacing() * 1.0001);
  }

  auto bump = [](const std::array<double, 3>& x) { return std::exp(-x[0] * x[0] / 0.0625); };
  GridFunction f = sample(d, bump);
  Ball cover = make_ball(d, {0.0, 0.0, 0.0}, 0.9);
  double val = ball_lp_integral(f, cover, 2.0);

  GridDomain fine(1, 1.0, 8192, Boundary::Periodic);
  GridFunction ff = sample(fine, bump);
  double oracle = ball_lp_integral(ff, make_ball(fine, {0.0, 0.0, 0.0}, 0.9), 2.0);
  CHECK(val == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("ball_mean: constants, odd symmetry, linear function") {
  GridDomain d(1, 1.0, 256, Boundary::Periodic);
  GridFunction c = sample(d, [](const std::array<double, 3>&) { return 3.5; });
  Ball b = make_ball(d, {0.0, 0.0, 0.0}, 0.3);
  CHECK(ball_mean(c, b) == doctest::Approx(3.5));

  GridFunction odd = sample(d, [](const std::array<double, 3>& x) { return std::sin(kPi * x[0]); });
  CHECK(std::abs(ball_mean(odd, b)) < 1e-14);

  GridFunction lin = sample(d, [](const std::array<double, 3>& x) { return x[0]; });
  Ball ba = make_ball(d, {0.25, 0.0, 0.0}, 0.3);
  CHECK(std::abs(ball_mean(lin, ba) - 0.25) < d.spacing());
}

TEST_CASE("quadrature consistency: p=1 integral equals count * measure * mean") {
  GridDomain d(1, 1.0, 128, Boundary::Periodic);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  GridFunction f(d);
  GridFunction af(d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = dist(rng);
    af[i] = std::abs(f[i]);
  }
  Ball b = make_ball(d, {0.3, 0.0, 0.0}, 0.4);
  double lhs = ball_lp_integral(f, b, 1.0);
  double rhs = double(ball_node_count(d, b)) * d.cell_measure() * ball_mean(af, b);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("monotonicity under nested balls") {
  GridDomain d(2, 1.0, 32, Boundary::TruncatedDirichlet);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  GridFunction f(d);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  std::uniform_real_distribution<double> cpos(-0.8, 0.8);
  std::uniform_real_distribution<double> rad(d.spacing(), 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 3> c{cpos(rng), cpos(rng), 0.0};
    double r1 = rad(rng), r2 = rad(rng);
    if (r1 > r2) std::swap(r1, r2);
    Ball small = make_ball(d, c, r1);
    Ball big = make_ball(d, c, r2);
    CHECK(ball_lp_integral(f, small, 2.0) <= ball_lp_integral(f, big, 2.0) + 1e-15);
  }
}

TEST_CASE("periodic balls wrap, truncated balls clip") {
  GridDomain p(1, 1.0, 64, Boundary::Periodic);
  GridDomain t(1, 1.0, 64, Boundary::TruncatedDirichlet);
  Ball bp = make_ball(p, {-1.0, 0.0, 0.0}, 0.25);
  Ball bt = make_ball(t, {-1.0, 0.0, 0.0}, 0.25);
  std::size_t np = ball_node_count(p, bp), nt = ball_node_count(t, bt);
  CHECK(np == 2 * std::size_t(0.25 / p.spacing()) + 1);
  CHECK(nt == std::size_t(0.25 / t.spacing()) + 1);

  // A radius-R ball on the torus covers every node exactly once.
  Ball all = make_ball(p, {0.5, 0.0, 0.0}, 1.0);
  CHECK(ball_node_count(p, all) == p.point_count());
}

TEST_CASE("ball validation") {
  GridDomain d(1, 1.0, 64, Boundary::Periodic);
  CHECK_THROWS_AS(make_ball(d, {0.0, 0.0, 0.0}, 0.5 * d.spacing()), std::invalid_argument);
  CHECK_THROWS_AS(make_ball(d, {0.0, 0.0, 0.0}, 1.5), std::invalid_argument);
  Ball b = make_ball(d, {0.26, 0.0, 0.0}, 0.25);
  CHECK(b.center[0] == doctest::Approx(d.coord(d.snap_index(0.26))));
}

TEST_CASE("default family covers the dyadic scales and refinement keeps pairs") {
  GridDomain d(1, 1.0, 256, Boundary::Periodic);
  BallFamily fam = BallFamily::make_default(d);
  CHECK(fam.stride() == 16);
  CHECK(fam.radii().front() == doctest::Approx(1.0));
  CHECK(fam.radii().back() >= 2.0 * d.spacing());
  CHECK(fam.radii().back() * fam.ratio() < 2.0 * d.spacing());

  BallFamily fine = fam.refine();
  CHECK(fine.stride() == 8);
  for (double r : fam.radii()) {
    bool found = false;
    for (double rr : fine.radii()) found = found || rr == r;
    CHECK(found);
  }
  for (const auto& c : fam.centers()) {
    bool found = false;
    for (const auto& cc : fine.centers()) found = found || cc == c;
    CHECK(found);
  }
}

TEST_CASE("family radius floor is the grid spacing") {
  GridDomain d(1, 1.0, 64, Boundary::Periodic);
  CHECK_THROWS_AS(BallFamily::make(d, 4, 0.5, 12), std::invalid_argument);
  BallFamily fam = BallFamily::make(d, 4, 0.5, 5);
  CHECK(fam.ball_count() == fam.centers().size() * 5);
}

TEST_CASE("grid binary round trip with sidecar header") {
  GridDomain d(2, 1.5, 16, Boundary::TruncatedDirichlet);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> dist;
  GridFunction f(d);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);

  auto path = (std::filesystem::temp_directory_path() / "campanato_grid_io_test.f64").string();
  write_grid_function(f, path);
  GridFunction g = read_grid_function(path);
  CHECK(g.domain() == d);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".meta");
}
