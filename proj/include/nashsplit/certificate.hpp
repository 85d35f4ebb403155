#pragma once

#include <string>
#include <vector>

namespace nashsplit {

/// Per-player optimality diagnostics produced by an oracle independent of the
/// solver: each gap compares the player's objective at the candidate point
/// against the best value the oracle can find with the other players fixed.
struct EquilibriumCertificate {
  enum class Status { Verified, Failed, Unverifiable };

  Status status = Status::Unverifiable;
  std::vector<double> player_gaps;
  double max_gap = 0.0;
  double tolerance = 0.0;
  /// Distance of the candidate from the feasible set (0 when free).
  double feasibility_residual = 0.0;
  std::string note;
};

}  // namespace nashsplit
