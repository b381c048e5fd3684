#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "campanato/config.hpp"
#include "campanato/corpus.hpp"
#include "campanato/experiments.hpp"
#include "campanato/report.hpp"

using namespace campanato;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  REQUIRE(bool(is));
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string tiny_equivalence_config() {
  return R"(# smoke configuration
experiment.kind = equivalence31
domain.dim = 1
domain.half_width = 1.0
domain.points_per_axis = 64
domain.boundary = truncated_dirichlet
operator.kind = schrodinger
operator.m = 2
potential.kind = constant
potential.value = 1.0
norms.p = 2
norms.lambda = 0.5
corpus.spec = constants:1,modes:2,random_trig:2
corpus.seed = 7
)";
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing: values, comments, error reporting") {
  auto cfg = Config::parse_string("a.b = 3\n# comment\nname = hello world\nlist = 1, 2.5, -3\n");
  CHECK(cfg.get_int("a.b") == 3);
  CHECK(cfg.get_double("a.b") == 3.0);
  CHECK(cfg.get_string("name") == "hello world");
  auto list = cfg.get_double_list("list");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);
  CHECK(cfg.get_double("missing", 9.5) == 9.5);

  CHECK_THROWS_AS(cfg.get_string("missing"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_double("name"), std::invalid_argument);
  CHECK_THROWS_AS(Config::parse_string("no equals sign"), std::invalid_argument);
  CHECK_THROWS_AS(Config::parse_file("/nonexistent/path.conf"), std::invalid_argument);
}

TEST_CASE("corpus generation: counts, determinism, unknown generators") {
  GridDomain d(1, 1.0, 64, Boundary::Periodic);
  auto spec = parse_corpus_spec("modes:3", 1, 2.0, 0.5);
  auto corpus = generate_corpus(spec, d);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].name == "mode_1");
  CHECK(corpus[2].name == "mode_3");

  auto full = parse_corpus_spec(
      "constants:2,modes:4,random_trig:5,bumps:4,indicators:2,morrey_singular:3", 42, 2.0, 0.5);
  auto c1 = generate_corpus(full, d);
  auto c2 = generate_corpus(full, d);
  REQUIRE(c1.size() == 20);
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].name == c2[i].name);
    CHECK(sup_diff(c1[i].f, c2[i].f) == 0.0);
  }

  auto reseeded = full;
  reseeded.seed = 43;
  auto c3 = generate_corpus(reseeded, d);
  bool differs = false;
  for (std::size_t i = 0; i < c1.size(); ++i) differs = differs || sup_diff(c1[i].f, c3[i].f) > 0.0;
  CHECK(differs);

  CHECK_THROWS_AS(parse_corpus_spec("", 1, 2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(generate_corpus(parse_corpus_spec("gibberish:2", 1, 2.0, 0.5), d),
                  std::invalid_argument);
}

TEST_CASE("equivalence experiment passes on the smoke config and is byte-deterministic") {
  auto cfg = Config::parse_string(tiny_equivalence_config());
  auto dir1 = fresh_dir("campanato_cli_test1");
  auto dir2 = fresh_dir("campanato_cli_test2");
  CHECK(run_experiment(cfg, dir1.string()) == RunStatus::Pass);
  CHECK(run_experiment(cfg, dir2.string()) == RunStatus::Pass);
  CHECK(slurp(dir1 / "equivalence31_table.csv") == slurp(dir2 / "equivalence31_table.csv"));
  CHECK(slurp(dir1 / "equivalence31_report.txt") == slurp(dir2 / "equivalence31_report.txt"));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("exit-code contract: invalid configuration and failed criteria") {
  auto dir = fresh_dir("campanato_cli_test3");

  auto bad = Config::parse_string("experiment.kind = equivalence31\ndomain.dim = 7\n");
  CHECK(run_experiment(bad, dir.string()) == RunStatus::ConfigInvalid);

  auto unknown = Config::parse_string("experiment.kind = nonsense\n");
  CHECK(run_experiment(unknown, dir.string()) == RunStatus::ConfigInvalid);

  // An impossible tolerance turns the same passing run into a numerical fail.
  auto cfg = Config::parse_string(tiny_equivalence_config());
  cfg.set("tolerances.sigma_sup", "1e-300");
  CHECK(run_experiment(cfg, dir.string()) == RunStatus::NumericalFail);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reverse Holder experiment honors expected verdicts") {
  auto dir = fresh_dir("campanato_cli_test4");
  std::string base = R"(experiment.kind = rh_certify
domain.dim = 1
domain.half_width = 1.0
domain.points_per_axis = 128
domain.boundary = truncated_dirichlet
rh.q = 2
rh.budget = 5
)";
  auto certified = Config::parse_string(base + "potential.kind = power_law\nrh.expect = certified\n");
  CHECK(run_experiment(certified, dir.string()) == RunStatus::Pass);

  auto diverging = Config::parse_string(base + "potential.kind = half_space\nrh.expect = diverging\n");
  CHECK(run_experiment(diverging, dir.string()) == RunStatus::Pass);

  auto wrong = Config::parse_string(base + "potential.kind = half_space\nrh.expect = certified\n");
  CHECK(run_experiment(wrong, dir.string()) == RunStatus::NumericalFail);
  std::filesystem::remove_all(dir);
}

TEST_CASE("theorem 4.2 suites refuse under-certified potentials") {
  auto dir = fresh_dir("campanato_cli_test5");
  std::string cfg_text = R"(experiment.kind = dirichlet_forward42
domain.dim = 1
domain.half_width = 1.0
domain.points_per_axis = 64
domain.boundary = truncated_dirichlet
operator.kind = schrodinger
potential.kind = half_space
norms.p = 2
norms.lambda = 0.5
corpus.spec = modes:2
heights.count = 24
)";
  CHECK(run_experiment(Config::parse_string(cfg_text), dir.string()) == RunStatus::ConfigInvalid);
  std::filesystem::remove_all(dir);
}

TEST_CASE("engine-build, norm table and semigroup checks write their outputs") {
  auto dir = fresh_dir("campanato_cli_test6");
  auto cfg = Config::parse_string(tiny_equivalence_config());
  CHECK(run_engine_build(cfg, dir.string()) == RunStatus::Pass);
  CHECK(std::filesystem::exists(dir / "engine_report.txt"));
  auto report = slurp(dir / "engine_report.txt");
  CHECK(report.find("route = eigen") != std::string::npos);

  CHECK(run_norm_table(cfg, dir.string()) == RunStatus::Pass);
  CHECK(std::filesystem::exists(dir / "norms_table.csv"));

  CHECK(run_semigroup_checks(cfg, dir.string()) == RunStatus::Pass);
  auto semi = slurp(dir / "semigroup_report.txt");
  CHECK(semi.find("pass = true") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("norm table report carries the full serialization schema") {
  auto dir = fresh_dir("campanato_cli_test7");
  auto cfg = Config::parse_string(tiny_equivalence_config());
  REQUIRE(run_norm_table(cfg, dir.string()) == RunStatus::Pass);
  auto report = slurp(dir / "norms_report.txt");
  for (const char* key : {"norm = morrey", "norm = campanato_classical",
                          "norm = campanato_operator", "value = ", "p = 2", "lambda = 0.5",
                          "argmax_center = ", "argmax_radius = ", "profile_0 = "})
    CHECK(report.find(key) != std::string::npos);
  auto csv = slurp(dir / "norms_table.csv");
  CHECK(csv.find("argmax_center_0") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("every shipped desk-scale config runs to a pass") {
  // The coarse 3d config is excluded: its dense eigendecomposition is a
  // documented minutes-long build.
  const char* configs[] = {"equivalence31.conf",    "schrodinger41.conf",
                           "kernel_bounds.conf",    "lemma_checks.conf",
                           "rh_powerlaw.conf",      "rh_halfspace.conf",
                           "dirichlet_forward.conf", "dirichlet_forward_mode.conf",
                           "trace_inverse.conf",    "smoke_equivalence.conf"};
  auto dir = fresh_dir("campanato_cli_test8");
  for (const char* name : configs) {
    CAPTURE(name);
    auto path = std::filesystem::path(CAMPANATO_CONFIG_DIR) / name;
    REQUIRE(std::filesystem::exists(path));
    auto cfg = Config::parse_file(path.string());
    CHECK(run_experiment(cfg, (dir / name).string()) == RunStatus::Pass);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("float formatting round-trips 17 significant digits") {
  double v = 0.1234567890123456789;
  auto cfg = Config::parse_string("x = " + format_double(v) + "\n");
  CHECK(cfg.get_double("x") == v);
}
