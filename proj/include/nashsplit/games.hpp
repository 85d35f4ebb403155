#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nashsplit/certificate.hpp"
#include "nashsplit/operators.hpp"
#include "nashsplit/prox.hpp"
#include "nashsplit/space.hpp"

namespace nashsplit {

enum class ProblemKind {
  ZeroSumGame,
  SaddleProblem,
  Gne,
  CyclicProx,
  CyclicProjection,
  Custom,
};

std::string to_string(ProblemKind kind);

/// Fully assembled instance: the common-penalty prox, the stacked-gradient
/// operator, and enough metadata to serialize and verify the problem.
struct ProblemSpec {
  SpaceLayout layout;
  ProxFunction f;
  MonotoneOperator b;
  ProblemKind kind;

  // Serializable ingredients, present when the kind carries them.
  std::optional<LinearMap> zero_sum_matrix;
  std::optional<LinearMap> saddle_q1, saddle_m, saddle_q2;
  std::optional<LinearMap> gradient_matrix;      // Gne / custom linear
  std::optional<std::vector<double>> gradient_offset;

  /// Optional per-player objectives for the grid verifier. Builders synthesize
  /// them for linear-gradient problems; library users may supply their own.
  std::vector<std::function<double(const BlockVector&)>> player_objectives;
};

/// Two-player zero-sum game on mixed strategies: player 1 minimizes
/// x1^T L x2 over the simplex, player 2 maximizes it.
ProblemSpec build_zero_sum(const LinearMap& l);

/// Quadratic-bilinear saddle instance: players trade off
/// 1/2 x1^T Q1 x1 + x1^T M x2 - 1/2 x2^T Q2 x2 under the common penalty f.
ProblemSpec build_saddle(const LinearMap& q1, const LinearMap& m,
                         const LinearMap& q2, ProxFunction f);

/// Generalized Nash equilibrium: joint feasible set C (a single indicator,
/// not necessarily a product) and a monotone stacked-gradient operator.
ProblemSpec build_gne(ProxFunction c, MonotoneOperator gradients);

/// GNE/custom instance with linear gradients B x = A x + offset.
ProblemSpec build_gne_linear(SpaceLayout layout, ProxFunction c, LinearMap a,
                             std::vector<double> offset = {});

/// Cyclic proximation: m players on one base space, each pulling its strategy
/// toward the next player's through prox_{f_i}.
ProblemSpec build_cyclic_prox(std::vector<ProxFunction> parts);

/// Cyclic projection: cyclic proximation with set indicators.
ProblemSpec build_cyclic_projection(std::vector<ProxFunction> sets);

/// Custom linear problem (f + linear monotone gradients), serializable.
ProblemSpec build_custom_linear(SpaceLayout layout, ProxFunction f, LinearMap a,
                                std::vector<double> offset = {},
                                bool cocoercive = false);

struct ZeroSumSolution {
  std::vector<double> x1;
  std::vector<double> x2;
  double value = 0.0;
};

/// Exact equilibrium by support enumeration (desk scale: dimensions <= 6).
/// For each support pair the indifference system is solved; solutions must be
/// valid mixed strategies admitting no profitable pure deviation.
ZeroSumSolution zero_sum_oracle(const LinearMap& l);

/// Per-player optimality certificate at x, produced by an oracle independent
/// of the solver: vertex best responses for zero-sum games, a dense grid over
/// the feasible slice for small GNE instances, and the cyclic fixed-point
/// residuals for cyclic kinds. Problems the desk-scale oracles cannot handle
/// report Unverifiable rather than passing silently.
EquilibriumCertificate verify_equilibrium(const ProblemSpec& spec,
                                          const BlockVector& x,
                                          double tolerance = 1e-6);

}  // namespace nashsplit
