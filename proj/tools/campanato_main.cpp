// Command-line harness: every subcommand reads a flat key = value config
// and writes its reports into --out.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "campanato/experiments.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string out_dir = "out";
};

void add_common(CLI::App* sub, SubArgs& args) {
  sub->add_option("--config", args.config_path, "configuration file (key = value)")->required();
  sub->add_option("--out", args.out_dir, "output directory");
}

int run(const std::string& name, const SubArgs& args) {
  using campanato::Config;
  using campanato::RunStatus;
  Config cfg;
  try {
    cfg = Config::parse_file(args.config_path);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return int(RunStatus::ConfigInvalid);
  }

  try {
    RunStatus status;
    if (name == "engine-build") {
      status = campanato::run_engine_build(cfg, args.out_dir);
    } else if (name == "norm") {
      status = campanato::run_norm_table(cfg, args.out_dir);
    } else if (name == "semigroup") {
      status = campanato::run_semigroup_checks(cfg, args.out_dir);
    } else if (name == "limits") {
      cfg.set("experiment.kind", "lemma_checks");
      status = campanato::run_experiment(cfg, args.out_dir);
    } else if (name == "rh-check") {
      cfg.set("experiment.kind", "rh_certify");
      status = campanato::run_experiment(cfg, args.out_dir);
    } else if (name == "dirichlet") {
      cfg.set("experiment.kind", "dirichlet_forward42");
      status = campanato::run_experiment(cfg, args.out_dir);
    } else if (name == "trace") {
      cfg.set("experiment.kind", "trace_inverse42");
      status = campanato::run_experiment(cfg, args.out_dir);
    } else {
      status = campanato::run_experiment(cfg, args.out_dir);
    }
    if (status == RunStatus::ConfigInvalid) std::fprintf(stderr, "%s: invalid configuration\n", name.c_str());
    if (status == RunStatus::NumericalFail) std::fprintf(stderr, "%s: numerical criteria failed\n", name.c_str());
    return int(status);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "%s failed: %s\n", name.c_str(), err.what());
    return int(campanato::RunStatus::NumericalFail);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semigroup-adapted Campanato/Morrey norm toolkit"};
  app.require_subcommand(1);

  const char* names[] = {"engine-build", "norm",      "semigroup", "limits",
                         "rh-check",     "dirichlet", "trace",     "experiment"};
  const char* descs[] = {
      "build the operator engine and report its spectrum",
      "corpus norm table (Morrey / Campanato / type-(p;beta))",
      "semigroup law, commutation and contraction checks",
      "long-time limit and decay-exponent checks",
      "reverse Holder certification of the potential",
      "Poisson extension, Carleson functional, square function",
      "boundary trace recovery round trip",
      "dispatch on experiment.kind from the config"};

  SubArgs args[8];
  for (int i = 0; i < 8; ++i) add_common(app.add_subcommand(names[i], descs[i]), args[i]);

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 8; ++i)
    if (app.get_subcommand(names[i])->parsed()) return run(names[i], args[i]);
  return int(campanato::RunStatus::ConfigInvalid);
}
