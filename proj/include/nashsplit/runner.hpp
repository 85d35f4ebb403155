#pragma once

#include <optional>
#include <string>

#include "nashsplit/games.hpp"
#include "nashsplit/solver.hpp"

namespace nashsplit {

/// One batch solve: problem source, solver configuration, output paths.
struct RunRequest {
  std::string problem_path;                 // used when inline_problem is empty
  std::optional<ProblemSpec> inline_problem;
  SolverConfig config;
  std::string trace_path;   // CSV; empty writes no trace
  std::string report_path;  // JSON; empty writes no report
  bool quiet = false;
};

/// Exit codes: 0 Converged, 1 input/configuration error, 2 MaxIters,
/// 3 Diverged.
int run(const RunRequest& req);

/// Runs the monotonicity / Lipschitz / cocoercivity samplers and prints one
/// PASS/FAIL line each. Returns 0 when every applicable check passes.
int run_check(const std::string& problem_path, int samples, std::uint64_t seed,
              bool quiet = false);

/// Prints the brute-force equilibrium where a desk-scale oracle exists
/// (support enumeration for zero-sum games). Returns 0 on success, 1 when the
/// problem kind has no oracle.
int run_oracle(const std::string& problem_path, bool quiet = false);

/// Writes the trace of a report as CSV ('.' decimal separator, 17 significant
/// digits): header plus one row per recorded point.
void write_trace_csv(const SolveReport& report, const std::string& path);

/// Structured report: status, iterations, residuals, final point, certificate.
void write_report_json(const ProblemSpec& spec, const SolveReport& report,
                       const std::string& path);

}  // namespace nashsplit
