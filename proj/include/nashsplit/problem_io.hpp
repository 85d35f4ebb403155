#pragma once

#include <string>

#include "nashsplit/games.hpp"

namespace nashsplit {

/// Load and fully validate a problem file (single self-describing JSON schema
/// with a top-level "kind" discriminator). Throws ParseError with the file
/// position or the offending field named; DimensionError for shape problems.
ProblemSpec load_problem(const std::string& path);

/// Parse a problem from JSON text (same contract as load_problem).
ProblemSpec parse_problem(const std::string& text, const std::string& origin);

/// Serialize a spec back to its file representation. Round trips: loading the
/// produced text yields an equivalent spec (same structure, chi to 1e-12).
std::string problem_to_json(const ProblemSpec& spec);
void write_problem(const ProblemSpec& spec, const std::string& path);

}  // namespace nashsplit
