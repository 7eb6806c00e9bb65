#pragma once

#include <optional>
#include <string>

#include "parnewt/problem_spec.hpp"

namespace parnewt {

/// Exit codes of the CLI contract: 0 success, 1 analysis failure
/// (non-convergence, ellipticity loss, ...), 2 spec/usage error.
enum ExitCode : int { kOk = 0, kAnalysisFailure = 1, kSpecError = 2 };

/// Dispatches one subcommand: solve, newton-trace, vmo, perturb-sweep,
/// mms-verify, convergence, check-hypotheses. Writes deterministic CSV
/// reports (plus status.csv with the machine-readable outcome) under
/// out_dir and returns the exit code.
int run_subcommand(const std::string& command, const ProblemSpec& spec,
                   const std::string& out_dir, std::optional<std::uint64_t> seed_override);

}  // namespace parnewt
