#pragma once

#include <string>

#include "campanato/config.hpp"
#include "campanato/corpus.hpp"

namespace campanato {

enum class ExperimentKind {
  Equivalence31,
  Schrodinger41,
  DirichletForward42,
  TraceInverse42,
  KernelBounds,
  LemmaChecks,
  RhCertify
};

ExperimentKind experiment_kind_from_string(const std::string& s);

/// Exit-code contract: 0 = all configured pass-criteria met, 2 = numerical
/// criteria failed, 3 = configuration invalid.
enum class RunStatus : int { Pass = 0, NumericalFail = 2, ConfigInvalid = 3 };

/// Dispatches on experiment.kind, writes one structured-text report and one
/// CSV table into out_dir. Identical config and seed give byte-identical
/// CSV output.
RunStatus run_experiment(const Config& cfg, const std::string& out_dir);

// Direct entry points for the CLI subcommands that are not full experiment
// kinds.
RunStatus run_engine_build(const Config& cfg, const std::string& out_dir);
RunStatus run_norm_table(const Config& cfg, const std::string& out_dir);
RunStatus run_semigroup_checks(const Config& cfg, const std::string& out_dir);

}  // namespace campanato
