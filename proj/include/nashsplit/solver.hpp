#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nashsplit/certificate.hpp"
#include "nashsplit/operators.hpp"
#include "nashsplit/prox.hpp"
#include "nashsplit/space.hpp"

namespace nashsplit {

enum class Method { Fbf, Fb };

/// Step-size sequence. Auto derives (epsilon, gamma) from the operator's chi;
/// Constant uses one gamma; Sequence indexes into the given values and then
/// repeats the last one.
struct GammaSchedule {
  enum class Kind { Auto, Constant, Sequence };
  Kind kind = Kind::Auto;
  double constant = 0.0;
  std::vector<double> values;

  static GammaSchedule automatic() { return {}; }
  static GammaSchedule constant_step(double gamma) {
    return {Kind::Constant, gamma, {}};
  }
  static GammaSchedule sequence(std::vector<double> values) {
    return {Kind::Sequence, 0.0, std::move(values)};
  }
};

/// Absolutely summable perturbation sequence. Geometric draws a seeded random
/// direction per iteration and scales it to magnitude * rho^n, so the norms
/// sum to magnitude / (1 - rho).
struct ErrorSchedule {
  enum class Kind { Zero, Geometric };
  Kind kind = Kind::Zero;
  double rho = 0.0;
  double magnitude = 0.0;
  std::uint64_t seed = 0;

  bool is_zero() const { return kind == Kind::Zero || magnitude == 0.0; }
};

ErrorSchedule make_zero_errors();
ErrorSchedule make_geometric_errors(double rho, double magnitude,
                                    std::uint64_t seed);

/// Evaluate the n-th perturbation of a schedule into `out`.
void error_term(const ErrorSchedule& schedule, std::uint64_t base_seed,
                int channel, long n, BlockVector& out);

struct StepDefaults {
  double epsilon = 0.0;
  double gamma = 0.0;
};

/// Step-size defaults staying inside the admissible ranges: gamma = 0.9/chi
/// for Fbf (range ]0, 1/chi[), gamma = 1.8/chi for Fb (range ]0, 2/chi[),
/// gamma = 1 when chi = 0 (pure proximal iteration).
StepDefaults default_gamma(double chi, Method method);

struct TracePoint {
  long iter = 0;
  double residual = 0.0;
  double gamma = 0.0;
  std::vector<double> block_norms;
  std::optional<BlockVector> x;  // filled when capture_iterates is set
  std::optional<BlockVector> p;  // Fbf proximal point, when captured
};

struct SolverConfig {
  Method method = Method::Fbf;
  /// Epsilon of the step-range theorems; 0 selects the default for chi.
  double epsilon = 0.0;
  GammaSchedule gamma;
  long max_iters = 1'000'000;
  double tol = 1e-8;
  ErrorSchedule errors_a;  // on the first gradient step
  ErrorSchedule errors_b;  // added after the prox
  ErrorSchedule errors_c;  // on the second gradient step (Fbf only)
  long trace_every = 1;
  bool capture_iterates = false;
  std::uint64_t seed = 0;
  /// Optional streaming sink, called once per recorded trace point.
  std::function<void(const TracePoint&)> trace_sink;
};

enum class SolveStatus { Converged, MaxIters, Diverged };

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  long iterations = 0;
  BlockVector final_x;
  double final_residual = 0.0;
  double gamma_last = 0.0;
  double epsilon = 0.0;
  double chi = 0.0;
  std::vector<TracePoint> trace;
  /// || x_N - prox_{gamma f}(x_N - gamma B x_N) || at termination; under the
  /// zero-error model the x and p sequences share their limit.
  double final_xp_gap = 0.0;
  /// Fb with capture_iterates: || B x_n - B x_final || per recorded point.
  std::vector<double> grad_gap_trace;
  std::optional<EquilibriumCertificate> equilibrium_check;

  SolveReport() : final_x(SpaceLayout({1})) {}
};

/// Normalized fixed-point residual || x - prox_{gamma f}(x - gamma B x) ||
/// / (1 + || x ||); zero exactly on zer(df + B).
double residual(const ProxFunction& f, const MonotoneOperator& b,
                const BlockVector& x, double gamma);

/// Forward-backward-forward iteration: two gradient steps around one prox.
/// Refuses configurations whose steps leave [epsilon, (1-epsilon)/chi].
SolveReport solve_fbf(const ProxFunction& f, const MonotoneOperator& b,
                      const BlockVector& x0, const SolverConfig& cfg);

/// Forward-backward iteration for cocoercive operators; steps may range in
/// [epsilon, (2-epsilon)/chi].
SolveReport solve_fb(const ProxFunction& f, const MonotoneOperator& b,
                     const BlockVector& x0, const SolverConfig& cfg);

}  // namespace nashsplit
